//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p germ-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{naive, random_poly, rank_mod_p, residual_oracle, rng, LARGE_PRIME};
use germ_core::conformal::{stabilizer_generators, ApproxPoly, LinearMap2, Mode};
use germ_core::determinacy::{check_inclusion, determinacy_bound, Certification};
use germ_core::harmonic::{f, g, laplacian, laplacian_power, sample_homogeneous, sample_l_harmonic, SampleSpec};
use germ_core::jet::{compose_truncated, DiffeoJet};
use germ_core::rational::{factorial, int, rat};
use germ_core::reduction::{
    action_matrix, full_reduce, operator_verdict, paper_diffeo_crosscheck, reduce_step, residual_monomials,
    uniqueness_check, Clause,
};
use germ_core::report::emit_report;
use germ_core::{Monomial, Poly, Rational};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
    extra: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            extra: Vec::new(),
        }
    }
}

fn leading(k: u32) -> Poly {
    if k == 5 {
        f(5)
    } else {
        g(k)
    }
}

fn tail(degree: u32, seed: u64) -> Poly {
    sample_homogeneous(&SampleSpec::homogeneous(degree, seed, 9))
}

fn coeffs(r: &germ_core::reduction::ReductionReport) -> Vec<Rational> {
    r.residual.iter().map(|t| t.coefficient.clone()).collect()
}

/// Reduces degree `t` over the generator with random intermediate degrees in
/// the tail; compares support and coefficients with direct differentiation.
fn step_suite(k: u32, t: u32, trials: u64, seed_base: u64) -> (usize, Vec<String>) {
    let mut ok = 0;
    let mut failures = Vec::new();
    for i in 0..trials {
        let lower = (k + 1..t).fold(Poly::zero(), |acc, d| &acc + &tail(d, seed_base + 1000 * d as u64 + i));
        let rho = tail(t, seed_base + i);
        let rep = reduce_step(&leading(k), &(&lower + &rho), t).unwrap();
        let support: Vec<Monomial> = rep.residual.iter().map(|r| r.monomial).collect();
        if support == residual_monomials(k, t).unwrap() && coeffs(&rep) == residual_oracle(k, t, &rho) {
            ok += 1;
        } else if failures.len() < 3 {
            failures.push(format!("({k},{t}) trial {i}: rho = {rho}"));
        }
    }
    (ok, failures)
}

fn ac1() -> Outcome {
    let mut ok = 0;
    for i in 0..100 {
        let rho = tail(6, i);
        let c = naive::derivative_at_origin(&naive::laplacian_power(&naive::from(&rho), 3), 0, 0) / factorial(6);
        let want = &f(5) + &Poly::term(c, Monomial::new(6, 0));
        if full_reduce(&(&f(5) + &rho), 5, 6).unwrap().normal_form == want {
            ok += 1;
        }
    }
    Outcome::new(ok == 100, format!("order 5, degree 6: {ok}/100 normal forms equal f5 + (Δ³ρ/6!)x^6 exactly"))
}

fn ac2() -> Outcome {
    let (a, fa) = step_suite(6, 7, 100, 10_000);
    let (b, fb) = step_suite(6, 8, 100, 20_000);
    let mut o = Outcome::new(
        a == 100 && b == 100,
        format!("order 6: degree 7 {a}/100 match (∂x, ∂y)Δ³; degree 8 {b}/100 match Δ⁴/8!"),
    );
    o.extra = fa.into_iter().chain(fb).collect();
    o
}

fn ac3() -> Outcome {
    let (a, fa) = step_suite(7, 8, 100, 30_000);
    let (b, fb) = step_suite(7, 9, 100, 40_000);
    let (c, fc) = step_suite(7, 10, 100, 50_000);
    let verdict = operator_verdict(7, 8).unwrap();
    let mut o = Outcome::new(
        a == 100 && b == 100 && c == 100 && verdict.derived_matches_solver,
        format!(
            "order 7 over g7: degree 8 {a}/100, degree 9 {b}/100, degree 10 {c}/100; degree-8 operators vs solver: {}",
            if verdict.stated_matches_solver { "match" } else { "mismatch (corrected operator emitted)" }
        ),
    );
    o.extra = emit_report(&verdict, false).lines().map(String::from).collect();
    o.extra.extend(fa.into_iter().chain(fb).chain(fc));
    o
}

fn ac4() -> Outcome {
    let mut parts = Vec::new();
    let mut all = true;
    for (k, t) in [(5, 6), (6, 7), (6, 8), (7, 8), (7, 9), (7, 10)] {
        let l = t - k + 2;
        let ok = (0..50)
            .filter(|&s| {
                let rho = sample_l_harmonic(&SampleSpec::l_harmonic(t, l, 700 + s, 9));
                let rep = reduce_step(&leading(k), &rho, t).unwrap();
                rep.residual.iter().all(|r| r.coefficient == int(0))
            })
            .count();
        all &= ok == 50;
        parts.push(format!("({k},{t},Δ^{l}) {ok}/50"));
    }
    Outcome::new(all, format!("polyharmonic tails reduce to zero: {}", parts.join(", ")))
}

fn ac5() -> Outcome {
    let expected = [(7, 6, 6), (8, 6, 6), (9, 8, 8), (9, 6, 6), (10, 8, 8), (11, 10, 10)];
    let dims = [1, 2, 1, 3, 2, 1];
    let mut all = true;
    let mut got = Vec::new();
    for ((c, want), dim) in Clause::all().zip(expected).zip(dims) {
        let a = action_matrix(&leading(c.k), c.t).unwrap();
        let (r, cl) = a.shape();
        let rank = a.rank();
        let modular = rank_mod_p(&a.matrix, LARGE_PRIME);
        all &= (r, cl, rank) == want && modular == rank && r - rank == dim && residual_monomials(c.k, c.t).unwrap().len() == dim;
        got.push(format!("({r},{cl},{rank})"));
    }
    Outcome::new(all, format!("action matrices (rows, cols, rank): {}", got.join(" ")))
}

fn ac6() -> Outcome {
    let mut all = true;
    let mut parts = Vec::new();
    let mut extra = Vec::new();
    for (k, d) in [(3, 3), (4, 5), (5, 6), (6, 8), (7, 10)] {
        let c = check_inclusion(&f(k), d);
        all &= c.holds;
        parts.push(format!("(f{k},{d}) rank {}/{} {}", c.rank, c.required_rank, if c.holds { "holds" } else { "FAILS" }));
        if !c.holds {
            let rep = determinacy_bound(k).unwrap();
            extra.push(format!(
                "f{k}: inclusion first holds at degree {}; certificate: {:?}",
                rep.minimal_inclusion_degree.map_or("none".to_string(), |d| d.to_string()),
                rep.certification
            ));
        }
    }
    let c4 = check_inclusion(&f(4), 4);
    let up = determinacy_bound(4).unwrap();
    let upgrade_noted = up.certification == Certification::InclusionWithUpgrade && !up.notes.is_empty();
    all &= !c4.holds && c4.witness.is_some() && upgrade_noted;
    parts.push(format!(
        "(f4,4) rank {}/{} {} (witness {}), upgrade noted: {}",
        c4.rank,
        c4.required_rank,
        if c4.holds { "holds" } else { "fails" },
        c4.witness.map(|w| w.to_string()).unwrap_or_default(),
        upgrade_noted
    ));
    let mut o = Outcome::new(all, parts.join("; "));
    o.extra = extra;
    o
}

fn ac7() -> Outcome {
    let gens = stabilizer_generators(5);
    let x6 = Poly::monomial(6, 0);
    let reflection = gens.iter().find(|m| m.mode() == Mode::Exact).unwrap();
    let exact_ok = laplacian_power(&reflection.compose_exact(&x6).unwrap(), 3) == Poly::constant(factorial(6));
    let rotation = gens.iter().find(|m| m.mode() == Mode::Approx).unwrap();
    let rotated: ApproxPoly = rotation.compose_approx(&x6);
    let value = (0..3).fold(rotated, |p, _| p.laplacian()).coeff(Monomial::ONE);
    let approx_err = (value - 720.0).abs();
    let mut r = rng(4242);
    let mut agree = 0;
    for _ in 0..50 {
        let c = rat(r.random_range(-40..=40), r.random_range(1..=6));
        let ct = if r.random_bool(0.5) { c.clone() } else { rat(r.random_range(-40..=40), r.random_range(1..=6)) };
        let v = uniqueness_check(&c, &ct);
        if v.equivalent == (c == ct) && v.invariance.iter().all(|i| i.holds) {
            agree += 1;
        }
    }
    Outcome::new(
        exact_ok && approx_err < 1e-9 && agree == 50,
        format!(
            "Δ³ invariance: reflection exact = {exact_ok}, 2π/5 rotation |Δ³ - 720| = {approx_err:.1e}; uniqueness_check agrees on {agree}/50 pairs"
        ),
    )
}

fn ac8() -> Outcome {
    let mut r = rng(88);
    let same = (0..50)
        .filter(|_| {
            let rho = common::random_homogeneous_rational(&mut r, 6);
            let rep = paper_diffeo_crosscheck(5, 6, &rho).unwrap();
            rep.printed_jet == rep.solved_jet
        })
        .count();
    let mut extra = Vec::new();
    let mut reported = true;
    for (k, t) in [(6, 8), (7, 10)] {
        for m in Monomial::of_degree(t) {
            let rho = Poly::monomial(m.ex, m.ey);
            let rep = paper_diffeo_crosscheck(k, t, &rho).unwrap();
            // Independent comparison of the two coordinate changes.
            let printed = germ_core::reduction::printed_diffeo(k, t, &rho).unwrap();
            let differs = printed.px != rep.solved_phi.px || printed.py != rep.solved_phi.py;
            reported &= differs == !rep.phi_discrepancies.is_empty();
            for d in &rep.phi_discrepancies {
                extra.push(format!(
                    "({k},{t}) rho = {rho}: {:?}-coordinate {} printed {}, solver {}",
                    d.coordinate, d.monomial, d.printed, d.solved
                ));
            }
            for d in &rep.display_discrepancies {
                extra.push(format!(
                    "({k},{t}) rho = {rho}: displayed residual {} printed {}, solver {}",
                    d.monomial, d.printed, d.solved
                ));
            }
        }
    }
    let mut o = Outcome::new(
        same == 50 && reported,
        format!("order-5 printed change gives the solver's 6-jet on {same}/50 tails; misprint reports for (6,8), (7,10): {} entries", extra.len()),
    );
    o.extra = extra;
    o
}

fn random_diffeo(r: &mut rand_chacha::ChaCha8Rng, k: u32) -> DiffeoJet {
    loop {
        let hx = random_poly(r, 3, 4);
        let hy = random_poly(r, 3, 4);
        let px = &Poly::x() + &(&hx - &hx.truncated(1));
        let py = &(&Poly::y() + &(&hy - &hy.truncated(1))) + &Poly::term(rat(r.random_range(-3..=3), 2), Monomial::new(1, 0));
        if let Ok(phi) = DiffeoJet::new(px, py, k) {
            return phi;
        }
    }
}

fn ac9() -> Outcome {
    let mut r = rng(9);
    let mut counts = Vec::new();
    let mut all = true;
    let mut tally = |name: &str, n: usize, ok: usize| {
        all &= ok == n;
        counts.push(format!("{name} {ok}/{n}"));
    };

    let ring = (0..200)
        .filter(|_| {
            let (a, b, c) = (random_poly(&mut r, 5, 6), random_poly(&mut r, 5, 6), random_poly(&mut r, 5, 6));
            &(&a * &b) * &c == &a * &(&b * &c)
                && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
                && &a * &b == &b * &a
                && &a * &b == naive::to(&naive::mul(&naive::from(&a), &naive::from(&b)))
        })
        .count();
    tally("ring axioms", 200, ring);

    let functorial = (0..100)
        .filter(|_| {
            let p = random_poly(&mut r, 6, 6);
            let (phi, psi) = (random_diffeo(&mut r, 6), random_diffeo(&mut r, 6));
            let whole = compose_truncated(&p, &phi.compose(&psi), 6).unwrap().body;
            let staged = compose_truncated(&compose_truncated(&p, &phi, 6).unwrap().body, &psi, 6).unwrap().body;
            whole == staged
        })
        .count();
    tally("functoriality", 100, functorial);

    let product = (0..100)
        .filter(|_| {
            let (p, q) = (random_poly(&mut r, 6, 6), random_poly(&mut r, 6, 6));
            let cross = &(&p.partial_x() * &q.partial_x()) + &(&p.partial_y() * &q.partial_y());
            laplacian(&(&p * &q)) == &(&(&p * &laplacian(&q)) + &(&q * &laplacian(&p))) + &cross.scale(&int(2))
        })
        .count();
    tally("product rule", 100, product);

    let rot = LinearMap2::exact([[rat(3, 5), rat(-4, 5)], [rat(4, 5), rat(3, 5)]]).unwrap();
    let equivariant = (0..100)
        .filter(|_| {
            let p = random_poly(&mut r, 7, 7);
            laplacian(&rot.compose_exact(&p).unwrap()) == rot.compose_exact(&laplacian(&p)).unwrap()
        })
        .count();
    tally("rotation equivariance", 100, equivariant);

    let text = (0..500)
        .filter(|_| {
            let p = random_poly(&mut r, 9, 10);
            p.to_string().parse::<Poly>().ok() == Some(p)
        })
        .count();
    tally("parse/format", 500, text);

    let json = (0..50)
        .filter(|i| {
            let rho = tail(6 + (i % 5) as u32, 300 + *i as u64);
            let k = [5, 6, 6, 7, 7][(i % 5) as usize];
            let t = [6, 7, 8, 8, 9][(i % 5) as usize];
            let rep = reduce_step(&leading(k), &rho.homogeneous_component(t), t).unwrap();
            let back: germ_core::reduction::ReductionReport =
                serde_json::from_str(&emit_report(&rep, true)).unwrap();
            let p = random_poly(&mut r, 8, 8);
            let pb: Poly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
            back == rep && pb == p
        })
        .count();
    tally("JSON round-trip", 50, json);

    Outcome::new(all, counts.join(", "))
}

struct Criterion {
    id: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "AC1", limit: Duration::from_secs(5), run: ac1 },
        Criterion { id: "AC2", limit: Duration::from_secs(10), run: ac2 },
        Criterion { id: "AC3", limit: Duration::from_secs(20), run: ac3 },
        Criterion { id: "AC4", limit: Duration::from_secs(10), run: ac4 },
        Criterion { id: "AC5", limit: Duration::from_secs(1), run: ac5 },
        Criterion { id: "AC6", limit: Duration::from_secs(5), run: ac6 },
        Criterion { id: "AC7", limit: Duration::from_secs(1), run: ac7 },
        Criterion { id: "AC8", limit: Duration::from_secs(10), run: ac8 },
        Criterion { id: "AC9", limit: Duration::from_secs(10), run: ac9 },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= c.limit;
        failed += usize::from(!pass);
        println!(
            "{} {} {} ({:.2}s, limit {}s)",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        for line in &out.extra {
            println!("    {line}");
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
