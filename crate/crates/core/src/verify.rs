//! Seeded verification plans, one per theorem clause.
//!
//! Every trial derives its own seed from the plan seed and the trial index,
//! so trials are independent and can run in any order; results are always
//! reported by trial index.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal;
use crate::determinacy::{bound_for, check_inclusion, determinacy_bound, Certification};
use crate::harmonic::{
    apply_symbol, f, g, laplacian_power, sample_homogeneous, sample_l_harmonic, SampleSpec, PRNG_NAME,
};
use crate::poly::{Monomial, Poly};
use crate::rational::{factorial, rat, Rational};
use crate::reduction::{
    full_reduce, operator_verdict, reduce_step, residual_monomials, OperatorVerdict, ReductionReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "1.2")]
    T1_2,
    #[serde(rename = "1.3.2")]
    T1_3_2,
    #[serde(rename = "1.3.3")]
    T1_3_3,
    #[serde(rename = "1.4.2")]
    T1_4_2,
    #[serde(rename = "1.4.3")]
    T1_4_3,
    #[serde(rename = "1.4.4")]
    T1_4_4,
    #[serde(rename = "cor1.5")]
    Cor1_5,
    #[serde(rename = "cor1.6")]
    Cor1_6,
    #[serde(rename = "cor1.7")]
    Cor1_7,
    #[serde(rename = "prop2.4")]
    Prop2_4,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::T1_2,
        Theorem::T1_3_2,
        Theorem::T1_3_3,
        Theorem::T1_4_2,
        Theorem::T1_4_3,
        Theorem::T1_4_4,
        Theorem::Cor1_5,
        Theorem::Cor1_6,
        Theorem::Cor1_7,
        Theorem::Prop2_4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::T1_2 => "1.2",
            Theorem::T1_3_2 => "1.3.2",
            Theorem::T1_3_3 => "1.3.3",
            Theorem::T1_4_2 => "1.4.2",
            Theorem::T1_4_3 => "1.4.3",
            Theorem::T1_4_4 => "1.4.4",
            Theorem::Cor1_5 => "cor1.5",
            Theorem::Cor1_6 => "cor1.6",
            Theorem::Cor1_7 => "cor1.7",
            Theorem::Prop2_4 => "prop2.4",
        }
    }

    /// `(k, t)` pairs exercised by the plan.
    fn pairs(&self) -> &'static [(u32, u32)] {
        match self {
            Theorem::T1_2 | Theorem::Cor1_5 => &[(5, 6)],
            Theorem::T1_3_2 => &[(6, 7)],
            Theorem::T1_3_3 => &[(6, 8)],
            Theorem::T1_4_2 => &[(7, 8)],
            Theorem::T1_4_3 => &[(7, 9)],
            Theorem::T1_4_4 => &[(7, 10)],
            Theorem::Cor1_6 => &[(6, 7), (6, 8)],
            Theorem::Cor1_7 => &[(7, 8), (7, 9), (7, 10)],
            Theorem::Prop2_4 => &[],
        }
    }

    fn summary_subject(&self) -> &'static str {
        match self {
            Theorem::T1_2 => "residuals match Δ³ formula",
            Theorem::T1_3_2 => "residuals match (∂x, ∂y)Δ³ formulas",
            Theorem::T1_3_3 => "residuals match Δ⁴ formula",
            Theorem::T1_4_2 => "residuals match (∂x²-3∂y², ∂x∂y, ∂y²)Δ³ formulas",
            Theorem::T1_4_3 => "residuals match (∂x, ∂y)Δ⁴ formulas",
            Theorem::T1_4_4 => "residuals match Δ⁵ formula",
            Theorem::Cor1_5 | Theorem::Cor1_6 | Theorem::Cor1_7 => "polyharmonic tails reduce to zero",
            Theorem::Prop2_4 => "determinacy certificates reproduced",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown theorem {0:?}; expected one of 1.2, 1.3.2, 1.3.3, 1.4.2, 1.4.3, 1.4.4, cor1.5, cor1.6, cor1.7, prop2.4")]
pub struct UnknownTheorem(pub String);

impl FromStr for Theorem {
    type Err = UnknownTheorem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTheorem(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyPlan {
    pub theorem: Theorem,
    pub trials: u32,
    pub seed: u64,
    pub coefficient_bound: u32,
}

impl VerifyPlan {
    pub fn new(theorem: Theorem, trials: u32, seed: u64) -> Self {
        VerifyPlan {
            theorem,
            trials,
            seed,
            coefficient_bound: 9,
        }
    }

    pub fn with_bound(mut self, bound: u32) -> Self {
        self.coefficient_bound = bound;
        self
    }
}

/// Seed of trial `index`: first output of the plan generator on stream `index`.
pub fn trial_seed(plan_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(plan_seed);
    rng.set_stream(index);
    rng.next_u64()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, else runs sequentially.
    #[default]
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u64,
    pub seed: u64,
    pub clause: String,
    pub input: Poly,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub plan: VerifyPlan,
    pub prng: String,
    pub checks: usize,
    pub passed: usize,
    pub summary: String,
    /// Jet orders at which the clauses were checked.
    pub jet_orders: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operator_verdicts: Vec<OperatorVerdict>,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty() && self.passed == self.checks
    }
}

type CheckResult = Result<(), Counterexample>;

fn sample(degree: u32, seed: u64, bound: u32) -> Poly {
    sample_homogeneous(&SampleSpec::homogeneous(degree, seed, bound))
}

/// `σ(∂) Δ^m rho / norm`, computed by direct differentiation.
fn direct(rho: &Poly, m: u32, symbol: &str, norm: Rational) -> Rational {
    let sym: Poly = symbol.parse().expect("static symbol");
    apply_symbol(&sym, &laplacian_power(rho, m)).coeff(Monomial::ONE) / norm
}

fn expected_residual(k: u32, t: u32, rho: &Poly) -> Vec<Rational> {
    let fct = factorial;
    match (k, t) {
        (5, 6) => vec![direct(rho, 3, "1", fct(6))],
        (6, 7) => vec![direct(rho, 3, "x", fct(7)), direct(rho, 3, "y", fct(6))],
        (6, 8) => vec![direct(rho, 4, "1", fct(8))],
        (7, 8) => vec![
            direct(rho, 3, "x^2 - 3*y^2", fct(8)),
            direct(rho, 3, "x*y", fct(7)),
            direct(rho, 3, "y^2", fct(6) * fct(2)),
        ],
        (7, 9) => vec![direct(rho, 4, "x", fct(9)), direct(rho, 4, "y", fct(8))],
        (7, 10) => vec![direct(rho, 5, "1", fct(10))],
        _ => unreachable!(),
    }
}

fn format_coeffs(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn clause_tag(k: u32, t: u32) -> String {
    crate::reduction::Clause::new(k, t).expect("plan pairs are supported").tag().into()
}

fn fail(trial: u64, seed: u64, clause: String, input: Poly, expected: String, found: String) -> CheckResult {
    Err(Counterexample {
        trial,
        seed,
        clause,
        input,
        expected,
        found,
    })
}

fn leading_for(k: u32) -> Poly {
    if k == 5 {
        f(5)
    } else {
        g(k)
    }
}

fn step_coeffs(r: &ReductionReport) -> Vec<Rational> {
    r.residual.iter().map(|t| t.coefficient.clone()).collect()
}

/// Full pipeline on `f_5 + rho_6`.
fn trial_order_five(trial: u64, seed: u64, bound: u32) -> CheckResult {
    let rho = sample(6, seed, bound);
    let h = &f(5) + &rho;
    let c = direct(&rho, 3, "1", factorial(6));
    let want = &f(5) + &Poly::term(c, Monomial::new(6, 0));
    match full_reduce(&h, 5, 6) {
        Ok(r) if r.normal_form == want => Ok(()),
        Ok(r) => fail(trial, seed, clause_tag(5, 6), h, want.to_string(), r.normal_form.to_string()),
        Err(e) => fail(trial, seed, clause_tag(5, 6), h, want.to_string(), e.to_string()),
    }
}

/// One reduction step at degree `t` over the clause generator, with random
/// lower-degree terms between `k + 1` and `t - 1` left in place.
fn trial_step(k: u32, t: u32, trial: u64, seed: u64, bound: u32) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower = (k + 1..t).fold(Poly::zero(), |acc, d| &acc + &sample(d, rng.next_u64(), bound));
    let rho = sample(t, rng.next_u64(), bound);
    let tail = &lower + &rho;
    let want = expected_residual(k, t, &rho);
    let input = &leading_for(k) + &tail;
    match reduce_step(&leading_for(k), &tail, t) {
        Ok(r) => {
            let got = step_coeffs(&r);
            let support_ok = r.residual.iter().map(|t| t.monomial).eq(residual_monomials(k, t).unwrap());
            if got == want && support_ok && r.formula_check {
                Ok(())
            } else {
                fail(trial, seed, r.paper_clause, input, format_coeffs(&want), format_coeffs(&got))
            }
        }
        Err(e) => fail(trial, seed, clause_tag(k, t), input, format_coeffs(&want), e.to_string()),
    }
}

fn absorption_power(k: u32, t: u32) -> u32 {
    t - k + 2
}

/// Corollaries: an `l`-harmonic tail of degree `t` is absorbed completely.
fn trial_absorption(k: u32, t: u32, trial: u64, seed: u64, bound: u32) -> CheckResult {
    let l = absorption_power(k, t);
    let rho = sample_l_harmonic(&SampleSpec::l_harmonic(t, l, seed, bound));
    let input = &leading_for(k) + &rho;
    match reduce_step(&leading_for(k), &rho, t) {
        Ok(r) if r.residual.iter().all(|c| c.coefficient == rat(0, 1)) => Ok(()),
        Ok(r) => fail(trial, seed, r.paper_clause.clone(), input, "all zero".into(), format_coeffs(&step_coeffs(&r))),
        Err(e) => fail(trial, seed, clause_tag(k, t), input, "all zero".into(), e.to_string()),
    }
}

/// Random invertible rational linear map with small entries.
fn random_linear(rng: &mut ChaCha8Rng, bound: i64) -> conformal::LinearMap2 {
    loop {
        let mut e = || rat((rng.next_u64() % (2 * bound as u64 + 1)) as i64 - bound, 1);
        let m = [[e(), e()], [e(), e()]];
        if let Ok(map) = conformal::LinearMap2::exact(m) {
            return map;
        }
    }
}

/// Determinacy: certificate for `f_k` and its invariance under a random linear change.
fn trial_determinacy(trial: u64, seed: u64, _bound: u32) -> CheckResult {
    let k = 3 + (trial % 5) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = random_linear(&mut rng, 3);
    let h = map.compose_exact(&f(k)).expect("exact map");
    let report = determinacy_bound(k).expect("k in range");
    let certified = matches!(
        report.certification,
        Certification::Inclusion | Certification::InclusionWithUpgrade
    );
    let b = bound_for(k);
    for d in [b, b + 1] {
        let (a, moved) = (check_inclusion(&f(k), d), check_inclusion(&h, d));
        if a.rank != moved.rank || a.holds != moved.holds {
            return fail(
                trial,
                seed,
                "Prop2.4".into(),
                h,
                format!("rank {} at degree {d}", a.rank),
                format!("rank {}", moved.rank),
            );
        }
    }
    if !certified {
        return fail(trial, seed, "Prop2.4".into(), f(k), format!("f_{k} certified at {b}"), format!("{:?}", report.certification));
    }
    Ok(())
}

fn run_check(theorem: Theorem, index: u64, plan: &VerifyPlan) -> Vec<CheckResult> {
    let seed = trial_seed(plan.seed, index);
    let b = plan.coefficient_bound;
    match theorem {
        Theorem::T1_2 => vec![trial_order_five(index, seed, b)],
        Theorem::T1_3_2 | Theorem::T1_3_3 | Theorem::T1_4_2 | Theorem::T1_4_3 | Theorem::T1_4_4 => {
            let (k, t) = theorem.pairs()[0];
            vec![trial_step(k, t, index, seed, b)]
        }
        Theorem::Cor1_5 | Theorem::Cor1_6 | Theorem::Cor1_7 => theorem
            .pairs()
            .iter()
            .enumerate()
            .map(|(j, &(k, t))| trial_absorption(k, t, index, trial_seed(seed, j as u64), b))
            .collect(),
        Theorem::Prop2_4 => vec![trial_determinacy(index, seed, b)],
    }
}

fn run_all(plan: &VerifyPlan, exec: Execution) -> Vec<Vec<CheckResult>> {
    let indices = 0..plan.trials as u64;
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            indices
                .into_par_iter()
                .map(|i| run_check(plan.theorem, i, plan))
                .collect()
        }
        _ => indices.map(|i| run_check(plan.theorem, i, plan)).collect(),
    }
}

pub fn verify(plan: &VerifyPlan) -> VerifyReport {
    verify_with(plan, Execution::default())
}

pub fn verify_with(plan: &VerifyPlan, exec: Execution) -> VerifyReport {
    let results = run_all(plan, exec);
    let checks = results.iter().map(Vec::len).sum();
    let counterexamples: Vec<Counterexample> = results.into_iter().flatten().filter_map(Result::err).collect();
    let passed = checks - counterexamples.len();
    let operator_verdicts = plan
        .theorem
        .pairs()
        .iter()
        .filter(|_| !matches!(plan.theorem, Theorem::Cor1_5 | Theorem::Cor1_6 | Theorem::Cor1_7))
        .map(|&(k, t)| operator_verdict(k, t).expect("supported pair"))
        .collect();
    let jet_orders = match plan.theorem {
        Theorem::Prop2_4 => (3..=7).map(bound_for).collect(),
        t => t.pairs().iter().map(|&(_, t)| t).collect(),
    };
    VerifyReport {
        plan: *plan,
        prng: PRNG_NAME.into(),
        checks,
        passed,
        summary: format!("{passed}/{checks} {}", plan.theorem.summary_subject()),
        jet_orders,
        operator_verdicts,
        counterexamples,
    }
}

/// The polyharmonic degree used by each corollary clause.
pub fn corollary_harmonicity(k: u32, t: u32) -> u32 {
    absorption_power(k, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.name()));
        }
        assert!("1.5".parse::<Theorem>().is_err());
    }

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..50).map(|i| trial_seed(42, i)).collect();
        let b: Vec<u64> = (0..50).map(|i| trial_seed(42, i)).collect();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), a.len());
    }

    #[test]
    fn small_plans_pass() {
        for t in Theorem::ALL {
            let r = verify(&VerifyPlan::new(t, 4, 7));
            assert!(r.ok(), "{t}: {:?}", r.counterexamples);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let plan = VerifyPlan::new(Theorem::T1_3_2, 8, 11);
        assert_eq!(verify_with(&plan, Execution::Sequential), verify_with(&plan, Execution::Parallel));
    }

    #[test]
    fn summary_wording() {
        let r = verify(&VerifyPlan::new(Theorem::T1_2, 3, 42));
        assert_eq!(r.summary, "3/3 residuals match Δ³ formula");
        assert_eq!(r.prng, PRNG_NAME);
    }
}
