//! Reduction of the terms above a harmonic leading part.
//!
//! For a leading term `L` of degree `k` and a target degree `t > k`, the
//! coordinate change `id + (P, Q)` with `P`, `Q` homogeneous of degree
//! `d = t - k + 1` changes the degree-`t` component of `L + tail` by exactly
//! `P L_x + Q L_y`: every other effect lands in degree `t + 1` or higher, and
//! nothing of degree below `t` moves. The degree-`t` part therefore reduces to
//! a complement of the image of this linear map (the *action matrix*), and the
//! supported clauses fix that complement to a handful of `x`-heavy monomials.

mod crosscheck;
mod formula;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{self, ApproxPoly, ConformalError, LinearMap2, Mode};
use crate::harmonic::{self, generator_kind, harmonic_generator, HarmonicKind};
use crate::jet::{compose_truncated, jet_equal, DiffeoJet};
use crate::linalg::Matrix;
use crate::poly::{Monomial, Order, Poly};
use crate::rational::{self, to_f64, Rational};

pub use crosscheck::{paper_diffeo_crosscheck, printed_diffeo, CrosscheckReport, Discrepancy, PhiDiscrepancy};
pub use formula::{
    derived_operators, operator_verdict, pinned_functional, residual_formula, stated_operators,
    stated_residual_formula, OperatorCheck, OperatorVerdict, ResidualOperator,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("unsupported (order, target degree) pair ({k}, {t})")]
    UnsupportedPair { k: u32, t: u32 },
    #[error("leading term must equal f_k or g_k exactly, got {0}")]
    NotAGenerator(String),
    #[error("leading term must be a nonzero homogeneous polynomial, got {0}")]
    BadLeading(String),
    #[error("leading term has zero gradient")]
    DegenerateLeading,
    #[error("target degree {t} must exceed the leading degree {k}")]
    TargetTooLow { k: u32, t: u32 },
    #[error("depth {depth} outside the supported range {min}..={max} for order {k}")]
    BadDepth { k: u32, depth: u32, min: u32, max: u32 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("unsupported: germ does not vanish at the origin")]
    NotAGerm,
    #[error("unsupported: the zero germ has no leading term")]
    ZeroGerm,
    #[error("unsupported: order {0} is outside 1..=7")]
    OrderOutOfRange(u32),
    #[error("unsupported: leading term of degree {k} is not harmonic (laplacian {laplacian})")]
    NonHarmonic { k: u32, laplacian: String },
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// One supported (leading degree, target degree) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub k: u32,
    pub t: u32,
}

pub const SUPPORTED_PAIRS: [(u32, u32); 6] = [(5, 6), (6, 7), (6, 8), (7, 8), (7, 9), (7, 10)];

impl Clause {
    pub fn new(k: u32, t: u32) -> Result<Clause, ReductionError> {
        if SUPPORTED_PAIRS.contains(&(k, t)) {
            Ok(Clause { k, t })
        } else {
            Err(ReductionError::UnsupportedPair { k, t })
        }
    }

    pub fn all() -> impl Iterator<Item = Clause> {
        SUPPORTED_PAIRS.iter().map(|&(k, t)| Clause { k, t })
    }

    /// Theorem-clause tag carried in reports, e.g. `"Thm1.4(3)"`.
    pub fn tag(&self) -> &'static str {
        match (self.k, self.t) {
            (5, 6) => "Thm1.2(2)",
            (6, 7) => "Thm1.3(2)",
            (6, 8) => "Thm1.3(3)",
            (7, 8) => "Thm1.4(2)",
            (7, 9) => "Thm1.4(3)",
            (7, 10) => "Thm1.4(4)",
            _ => unreachable!("clauses are validated on construction"),
        }
    }

    /// Degree of the coordinate-change correction, `t - k + 1`.
    pub fn perturbation_degree(&self) -> u32 {
        self.t - self.k + 1
    }

    /// Power of the Laplacian inside every residual operator, `t - k + 2`.
    pub fn laplacian_power(&self) -> u32 {
        self.t - self.k + 2
    }

    /// Order of the extra derivative applied after the Laplacian power, `2k - t - 4`.
    pub fn operator_order(&self) -> u32 {
        2 * self.k - self.t - 4
    }

    /// Generator used for this order: `f_5`, `g_6`, `g_7`.
    pub fn leading_kind(&self) -> HarmonicKind {
        if self.k == 5 {
            HarmonicKind::F
        } else {
            HarmonicKind::G
        }
    }

    pub fn leading(&self) -> Poly {
        harmonic_generator(self.k, self.leading_kind())
    }

    pub fn residual_monomials(&self) -> Vec<Monomial> {
        (0..=self.operator_order())
            .map(|j| Monomial::new(self.t - j, j))
            .collect()
    }
}

/// Monomials that survive the degree-`t` reduction over a degree-`k` generator.
pub fn residual_monomials(k: u32, t: u32) -> Result<Vec<Monomial>, ReductionError> {
    Ok(Clause::new(k, t)?.residual_monomials())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coordinate {
    X,
    Y,
}

/// Matrix of `(P, Q) -> deg-t part of P L_x + Q L_y` over homogeneous `P`, `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionMatrix {
    pub leading_degree: u32,
    pub target_degree: u32,
    /// Row labels: degree-`t` monomials in canonical order.
    pub rows: Vec<Monomial>,
    /// Column labels: the x-coordinate corrections first, then the y-coordinate ones.
    pub columns: Vec<(Coordinate, Monomial)>,
    pub matrix: Matrix,
}

impl ActionMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.matrix.rows(), self.matrix.cols())
    }
}

pub fn action_matrix(leading: &Poly, t: u32) -> Result<ActionMatrix, ReductionError> {
    let k = match leading.order() {
        Order::Finite(k) if leading.is_homogeneous() => k,
        _ => return Err(ReductionError::BadLeading(leading.to_string())),
    };
    if t <= k {
        return Err(ReductionError::TargetTooLow { k, t });
    }
    let (lx, ly) = (leading.partial_x(), leading.partial_y());
    if lx.is_zero() && ly.is_zero() {
        return Err(ReductionError::DegenerateLeading);
    }
    let d = t - k + 1;
    let monos = Monomial::of_degree(d);
    let columns: Vec<(Coordinate, Monomial)> = [Coordinate::X, Coordinate::Y]
        .into_iter()
        .flat_map(|c| monos.iter().map(move |m| (c, *m)))
        .collect();
    let cols: Vec<Vec<Rational>> = columns
        .iter()
        .map(|(c, m)| {
            let grad = match c {
                Coordinate::X => &lx,
                Coordinate::Y => &ly,
            };
            (&Poly::monomial(m.ex, m.ey) * grad).coeff_vector(t)
        })
        .collect();
    Ok(ActionMatrix {
        leading_degree: k,
        target_degree: t,
        rows: Monomial::of_degree(t),
        matrix: Matrix::from_columns(&cols, t as usize + 1),
        columns,
    })
}

/// A residual monomial with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub monomial: Monomial,
    #[serde(with = "rational::serde_pq")]
    pub coefficient: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub paper_clause: String,
    pub leading_kind: HarmonicKind,
    pub leading_degree: u32,
    pub target_degree: u32,
    pub jet_order: u32,
    pub phi: DiffeoJet,
    pub residual: Vec<ResidualTerm>,
    /// Residual equals the Laplacian-operator evaluation of `residual_formula`.
    pub formula_check: bool,
    /// Residual equals the operators exactly as printed in the theorem statement.
    pub stated_formula_check: bool,
    pub rank: usize,
    #[serde(with = "rational::serde_pq_matrix")]
    pub action_matrix: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

struct StepOutcome {
    phi: DiffeoJet,
    residual: Vec<ResidualTerm>,
    composed: Poly,
    action: ActionMatrix,
    rank: usize,
}

/// Solves for the correction that leaves only `residual` monomials in degree `t`,
/// applies it to `germ` at `jet_order`, and checks the result by composition.
fn solve_step(
    leading: &Poly,
    germ: &Poly,
    t: u32,
    residual: &[Monomial],
    jet_order: u32,
) -> Result<StepOutcome, ReductionError> {
    let action = action_matrix(leading, t)?;
    let rank = action.rank();
    let n = t as usize + 1;
    // [A | -E] (u; r) = -rho  <=>  rho + A u = E r
    let neg_unit: Vec<Vec<Rational>> = residual
        .iter()
        .map(|m| {
            let mut v = vec![Rational::from_integer(0.into()); n];
            v[m.index_in_degree()] = Rational::from_integer((-1).into());
            v
        })
        .collect();
    let system = action.matrix.augment(&Matrix::from_columns(&neg_unit, n));
    let rho: Vec<Rational> = germ.coeff_vector(t).into_iter().map(|c| -c).collect();
    let sol = system.solve(&rho).ok_or_else(|| {
        ReductionError::Invariant(format!(
            "degree-{t} system is inconsistent (action rank {rank}, {} residual monomials)",
            residual.len()
        ))
    })?;
    let ncols = action.columns.len();
    let d = t - action.leading_degree + 1;
    let half = d as usize + 1;
    let dx = Poly::from_coeff_vector(d, &sol[..half]);
    let dy = Poly::from_coeff_vector(d, &sol[half..ncols]);
    let residual_terms: Vec<ResidualTerm> = residual
        .iter()
        .zip(&sol[ncols..])
        .map(|(m, c)| ResidualTerm {
            monomial: *m,
            coefficient: c.clone(),
        })
        .collect();

    let phi = DiffeoJet::perturbation(&dx, &dy, jet_order);
    let composed = compose_truncated(&germ.truncated(jet_order), &phi, jet_order)
        .map_err(|e| ReductionError::Invariant(e.to_string()))?
        .body;

    let expected = Poly::from_terms(residual_terms.iter().map(|r| (r.monomial, r.coefficient.clone())));
    if composed.homogeneous_component(t) != expected {
        return Err(ReductionError::Invariant(format!(
            "composition left degree-{t} part {} instead of {}",
            composed.homogeneous_component(t),
            expected
        )));
    }
    if t > 0 && !jet_equal(&composed, germ, t - 1) {
        return Err(ReductionError::Invariant(format!(
            "degree-{t} step changed lower-degree terms"
        )));
    }
    Ok(StepOutcome {
        phi,
        residual: residual_terms,
        composed,
        action,
        rank,
    })
}

fn generator_for_clause(leading: &Poly, t: u32) -> Result<(Clause, HarmonicKind), ReductionError> {
    let (k, kind) = generator_kind(leading).ok_or_else(|| ReductionError::NotAGenerator(leading.to_string()))?;
    Ok((Clause::new(k, t)?, kind))
}

fn clause_notes(clause: Clause, kind: HarmonicKind) -> Vec<String> {
    let mut notes = Vec::new();
    if clause == (Clause { k: 7, t: 9 }) {
        notes.push("degree 9 at order 7 is reduced over g_7, as are degrees 8 and 10".into());
    }
    if kind != clause.leading_kind() {
        notes.push(format!(
            "leading term is {}_{} while the clause is stated for {}_{}",
            kind,
            clause.k,
            clause.leading_kind(),
            clause.k
        ));
    }
    notes
}

fn build_report(
    clause: Clause,
    kind: HarmonicKind,
    rho: &Poly,
    outcome: &StepOutcome,
    jet_order: u32,
) -> Result<ReductionReport, ReductionError> {
    let predicted = residual_formula(clause.k, clause.t, rho)?;
    let stated = stated_residual_formula(clause.k, clause.t, rho)?;
    Ok(ReductionReport {
        paper_clause: clause.tag().to_string(),
        leading_kind: kind,
        leading_degree: clause.k,
        target_degree: clause.t,
        jet_order,
        phi: outcome.phi.clone(),
        residual: outcome.residual.clone(),
        formula_check: predicted == outcome.residual,
        stated_formula_check: stated == outcome.residual,
        rank: outcome.rank,
        action_matrix: outcome.action.matrix.to_rows(),
        notes: clause_notes(clause, kind),
    })
}

/// Reduces the degree-`t` part of `leading + tail` (at jet order `t`) to the
/// clause's residual monomials.
pub fn reduce_step(leading: &Poly, tail: &Poly, t: u32) -> Result<ReductionReport, ReductionError> {
    let (clause, kind) = generator_for_clause(leading, t)?;
    let germ = (leading + tail).truncated(t);
    let outcome = solve_step(leading, &germ, t, &clause.residual_monomials(), t)?;
    build_report(clause, kind, &germ.homogeneous_component(t), &outcome, t)
}

/// Highest target degree handled for each order.
pub fn max_depth(k: u32) -> Option<u32> {
    match k {
        5 => Some(6),
        6 => Some(8),
        7 => Some(10),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub order: u32,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arnold_class: Option<String>,
    pub normal_form: Poly,
    /// Jet order at which `normal_form` is meaningful; `None` when no jet was taken.
    pub jet_order: Option<u32>,
    pub approx: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leading_map: Option<LinearMap2>,
    pub steps: Vec<ReductionReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn label_for_order(k: u32) -> (&'static str, Option<&'static str>) {
    match k {
        1 => ("regular", None),
        2 => ("Morse", None),
        3 => ("D4-minus", None),
        4 => ("X_{1,0}", None),
        5 => ("harmonic-k5", Some("N_16")),
        6 => ("harmonic-k6", None),
        _ => ("harmonic-k7", None),
    }
}

/// Chains [`reduce_step`] over target degrees `k + 1 ..= depth`, carrying all
/// terms up to `depth` through every coordinate change.
pub fn full_reduce(h: &Poly, k: u32, depth: u32) -> Result<ClassificationResult, ReductionError> {
    let max = max_depth(k).ok_or(ReductionError::UnsupportedPair { k, t: depth })?;
    if depth <= k || depth > max {
        return Err(ReductionError::BadDepth {
            k,
            depth,
            min: k + 1,
            max,
        });
    }
    let leading = h.homogeneous_component(k);
    let (_, kind) = match generator_kind(&leading) {
        Some((kk, kind)) if kk == k => (kk, kind),
        _ => return Err(ReductionError::NotAGenerator(leading.to_string())),
    };
    if h.order() != Order::Finite(k) {
        return Err(ReductionError::BadLeading(format!("germ {h} does not have order {k}")));
    }

    let mut current = h.truncated(depth);
    let mut steps = Vec::new();
    for t in k + 1..=depth {
        let clause = Clause::new(k, t)?;
        let rho = current.homogeneous_component(t);
        let outcome = solve_step(&leading, &current, t, &clause.residual_monomials(), depth)?;
        steps.push(build_report(clause, kind, &rho, &outcome, depth)?);
        current = outcome.composed;
    }
    let (label, arnold) = label_for_order(k);
    Ok(ClassificationResult {
        order: k,
        label: label.into(),
        arnold_class: arnold.map(Into::into),
        normal_form: current,
        jet_order: Some(depth),
        approx: false,
        leading_map: None,
        steps,
        notes: Vec::new(),
    })
}

/// Classifies a germ by the degree of its harmonic leading term.
///
/// Orders 1 to 4 are labelled with their classical normal form `f_k` and not
/// reduced further. Orders 5 to 7 are brought to `f_5`, `g_6` or `g_7` by a
/// linear conformal map and then reduced up to degree 6, 8 or 10. When that
/// map is only known in floating point the exact reduction is skipped and
/// the result is flagged `approx`.
pub fn classify(h: &Poly) -> Result<ClassificationResult, ClassifyError> {
    let k = match h.order() {
        Order::Infinite => return Err(ClassifyError::ZeroGerm),
        Order::Finite(0) => return Err(ClassifyError::NotAGerm),
        Order::Finite(k) if k > 7 => return Err(ClassifyError::OrderOutOfRange(k)),
        Order::Finite(k) => k,
    };
    let leading = h.homogeneous_component(k);
    let lap = harmonic::laplacian(&leading);
    if !lap.is_zero() {
        return Err(ClassifyError::NonHarmonic {
            k,
            laplacian: lap.to_string(),
        });
    }
    let (label, arnold) = label_for_order(k);
    if k <= 4 {
        return Ok(ClassificationResult {
            order: k,
            label: label.into(),
            arnold_class: arnold.map(Into::into),
            normal_form: harmonic::f(k),
            jet_order: None,
            approx: false,
            leading_map: None,
            steps: Vec::new(),
            notes: vec![format!("order {k}: classical normal form, no reduction performed")],
        });
    }
    let target = if k == 5 { HarmonicKind::F } else { HarmonicKind::G };
    let depth = max_depth(k).expect("orders 5..=7 have a depth");
    let map = conformal::normalize_leading(&leading, k, target)?;
    match map.mode() {
        Mode::Exact => {
            let moved = map
                .compose_exact(&h.truncated(depth))
                .expect("exact maps compose exactly")
                .truncated(depth);
            let mut result = full_reduce(&moved, k, depth)?;
            result.leading_map = Some(map);
            Ok(result)
        }
        Mode::Approx => Ok(ClassificationResult {
            order: k,
            label: label.into(),
            arnold_class: arnold.map(Into::into),
            normal_form: harmonic_generator(k, target),
            jet_order: Some(k),
            approx: true,
            leading_map: Some(map),
            steps: Vec::new(),
            notes: vec![
                "leading normalization is irrational; exact tail reduction skipped, normal form shows the leading generator only".into(),
            ],
        }),
    }
}

/// Outcome of the invariance argument behind uniqueness of `f_5 + c x^6`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessVerdict {
    pub equivalent: bool,
    pub invariance: Vec<InvarianceCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceCheck {
    pub generator: LinearMap2,
    pub mode: Mode,
    /// `Δ^3((c x^6) ∘ phi) / (6! c)`, or `1` when `c = 0`.
    pub ratio: f64,
    pub holds: bool,
}

/// Relative tolerance on the approximate rotation path.
pub const UNIQUENESS_TOL: f64 = 1e-9;

/// Checks `Δ^3((c x^6) ∘ phi) = 6! c` for each stabilizer generator `phi` of
/// `f_5`, for both constants, then reports whether `c = c_tilde`.
pub fn uniqueness_check(c: &Rational, c_tilde: &Rational) -> UniquenessVerdict {
    let six_fact = rational::factorial(6);
    let mut invariance = Vec::new();
    for constant in [c, c_tilde] {
        let term = Poly::term(constant.clone(), Monomial::new(6, 0));
        let expected = constant * &six_fact;
        for phi in conformal::stabilizer_generators(5) {
            let (holds, ratio) = match phi.compose_exact(&term) {
                Some(moved) => {
                    let got = harmonic::laplacian_power(&moved, 3).coeff(Monomial::ONE);
                    let ratio = if expected == Rational::from_integer(0.into()) {
                        1.0
                    } else {
                        to_f64(&(&got / &expected))
                    };
                    (got == expected, ratio)
                }
                None => {
                    let moved: ApproxPoly = phi.compose_approx(&term);
                    let got = (0..3).fold(moved, |p, _| p.laplacian()).coeff(Monomial::ONE);
                    let want = to_f64(&expected);
                    let holds = (got - want).abs() <= UNIQUENESS_TOL * want.abs().max(1.0);
                    (holds, if want == 0.0 { 1.0 } else { got / want })
                }
            };
            invariance.push(InvarianceCheck {
                mode: phi.mode(),
                generator: phi,
                ratio,
                holds,
            });
        }
    }
    UniquenessVerdict {
        equivalent: c == c_tilde,
        invariance,
    }
}
