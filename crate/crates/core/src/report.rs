//! Text and JSON rendering for every report type.
//!
//! JSON is the serde form of each type (rationals as `"p/q"`, polynomials as
//! canonical text). Text output names the clause each step instantiates and
//! echoes every jet order used.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::conformal::{check_fixes, stabilizer_generators, FixVerdict, LinearMap2};
use crate::determinacy::{Certification, DeterminacyReport, InclusionCertificate};
use crate::harmonic::{self, laplacian_power};
use crate::poly::Poly;
use crate::reduction::{
    ClassificationResult, CrosscheckReport, OperatorVerdict, ReductionReport, ResidualTerm,
};
use crate::verify::VerifyReport;

pub trait Report: Serialize {
    fn render_text(&self) -> String;
}

/// Renders `report` as pretty JSON or as text.
pub fn emit_report<R: Report + ?Sized>(report: &R, json: bool) -> String {
    if json {
        serde_json::to_string_pretty(report).expect("report types serialize infallibly")
    } else {
        report.render_text()
    }
}

pub fn format_map(m: &LinearMap2) -> String {
    match m {
        LinearMap2::Exact(e) => format!("exact [[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1]),
        LinearMap2::Approx(e) => format!(
            "approx [[{:.12}, {:.12}], [{:.12}, {:.12}]]",
            e[0][0], e[0][1], e[1][0], e[1][1]
        ),
    }
}

fn residual_poly(terms: &[ResidualTerm]) -> Poly {
    Poly::from_terms(terms.iter().map(|t| (t.monomial, t.coefficient.clone())))
}

fn check_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISMATCH"
    }
}

impl Report for ReductionReport {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "[{}] {}_{} leading, degree {} reduced (jet order {})",
            self.paper_clause, self.leading_kind, self.leading_degree, self.target_degree, self.jet_order
        );
        let _ = writeln!(s, "  residual: {}", residual_poly(&self.residual));
        let _ = writeln!(s, "  phi: x -> {}", self.phi.px);
        let _ = writeln!(s, "       y -> {}", self.phi.py);
        let _ = writeln!(
            s,
            "  action rank {}; formula {}; stated formula {}",
            self.rank,
            check_word(self.formula_check),
            check_word(self.stated_formula_check)
        );
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

impl Report for ClassificationResult {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let class = self.arnold_class.as_deref().map(|a| format!(" ({a})")).unwrap_or_default();
        let _ = writeln!(s, "order {}: {}{}", self.order, self.label, class);
        let jet = self.jet_order.map(|j| format!(" (jet order {j})")).unwrap_or_default();
        let approx = if self.approx { " [approx]" } else { "" };
        let _ = writeln!(s, "normal form: {}{}{}", self.normal_form, jet, approx);
        if let Some(m) = &self.leading_map {
            let _ = writeln!(s, "leading map: {}", format_map(m));
        }
        for step in &self.steps {
            for line in step.render_text().lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

impl Report for InclusionCertificate {
    fn render_text(&self) -> String {
        let mut s = format!(
            "degree {}: {} products, rank {} of {} -> {}",
            self.k,
            self.generator_count,
            self.rank,
            self.required_rank,
            if self.holds { "inclusion holds" } else { "inclusion fails" }
        );
        if let Some(w) = &self.witness {
            let _ = write!(s, " (witness {w})");
        }
        s.push('\n');
        s
    }
}

impl Report for DeterminacyReport {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let cert = match self.certification {
            Certification::Convention => "by convention",
            Certification::Inclusion => "by inclusion",
            Certification::InclusionWithUpgrade => "by inclusion one degree up plus absorption",
            Certification::NotCertified => "NOT certified",
        };
        let _ = writeln!(s, "f_{} is {}-determined: bound {} certified {}", self.k, self.bound, self.bound, cert);
        let _ = write!(s, "  at bound: {}", self.at_bound.render_text());
        if let Some(a) = &self.above_bound {
            let _ = write!(s, "  above bound: {}", a.render_text());
        }
        if let Some(u) = &self.upgrade {
            let _ = writeln!(
                s,
                "  absorption at degree {}: action {}x{} rank {} ({})",
                u.target_degree,
                u.rows,
                u.cols,
                u.rank,
                if u.surjective { "surjective" } else { "not surjective" }
            );
        }
        if let Some(d) = self.minimal_inclusion_degree {
            let _ = writeln!(s, "  inclusion first holds at degree {d}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

impl Report for VerifyReport {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "verify {}: {} (trials {}, seed {}, bound {}, jet orders {:?})",
            self.plan.theorem, self.summary, self.plan.trials, self.plan.seed, self.plan.coefficient_bound, self.jet_orders
        );
        let _ = writeln!(s, "  prng: {}", self.prng);
        for v in &self.operator_verdicts {
            for line in v.render_text().lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        for c in &self.counterexamples {
            let _ = writeln!(
                s,
                "  COUNTEREXAMPLE [{}] trial {} seed {}: input {}; expected {}; found {}",
                c.clause, c.trial, c.seed, c.input, c.expected, c.found
            );
        }
        s
    }
}

impl Report for OperatorVerdict {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "[{}] operators: derived vs solver {}; stated vs solver {}",
            self.paper_clause,
            check_word(self.derived_matches_solver),
            check_word(self.stated_matches_solver)
        );
        for c in &self.checks {
            let _ = write!(s, "  {}: {} {}", c.monomial, c.stated, if c.stated_matches { "match" } else { "mismatch" });
            if let Some(fix) = &c.corrected {
                let _ = write!(s, ", corrected {fix}");
            }
            s.push('\n');
        }
        s
    }
}

impl Report for CrosscheckReport {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "[{}] printed coordinate change vs solver on {}: {}",
            self.paper_clause,
            self.rho,
            if self.agrees() { "agree" } else { "disagree" }
        );
        let _ = writeln!(s, "  printed jet: {}", self.printed_jet);
        let _ = writeln!(s, "  solver jet:  {}", self.solved_jet);
        for d in &self.phi_discrepancies {
            let _ = writeln!(
                s,
                "  {:?}-coordinate {}: printed {}, solver {}",
                d.coordinate, d.monomial, d.printed, d.solved
            );
        }
        for d in &self.display_discrepancies {
            let _ = writeln!(s, "  residual {}: printed {}, solver {}", d.monomial, d.printed, d.solved);
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

/// `Δ^power` of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaplacianReport {
    pub input: Poly,
    pub power: u32,
    pub result: Poly,
}

impl LaplacianReport {
    pub fn compute(input: Poly, power: u32) -> Self {
        let result = laplacian_power(&input, power);
        LaplacianReport { input, power, result }
    }
}

impl Report for LaplacianReport {
    fn render_text(&self) -> String {
        format!("Δ^{} ({}) = {}\n", self.power, self.input, self.result)
    }
}

/// Generators of the linear stabilizer of `f_k` and their fixing check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub k: u32,
    pub f_k: Poly,
    pub generators: Vec<LinearMap2>,
    pub checks: Vec<FixVerdict>,
}

impl StabilizerReport {
    pub fn compute(k: u32) -> Self {
        let fk = harmonic::f(k);
        let generators = stabilizer_generators(k);
        let checks = generators.iter().map(|g| check_fixes(&fk, g)).collect();
        StabilizerReport {
            k,
            f_k: fk,
            generators,
            checks,
        }
    }
}

impl Report for StabilizerReport {
    fn render_text(&self) -> String {
        let mut s = format!("stabilizer of f_{} = {}\n", self.k, self.f_k);
        for (g, c) in self.generators.iter().zip(&self.checks) {
            let _ = writeln!(
                s,
                "  {}: {} (max residual {:e})",
                format_map(g),
                if c.fixes { "fixes" } else { "does NOT fix" },
                c.max_residual
            );
        }
        s
    }
}
