//! Linear conformal maps that bring a homogeneous harmonic leading term to a
//! generator, and the dihedral stabilizer of `f_k`.
//!
//! A nonzero `h` in the degree-`k` harmonic space is `a f_k + b g_k`, i.e.
//! `Re((a - ib) z^k)`. Precomposing with `z -> mu z` multiplies the complex
//! coefficient by `mu^k`, so normalizing to `f_k` (resp. `g_k = Re(-i z^k)`)
//! means taking a `k`-th root of `1/(a - ib)` (resp. `-i/(a - ib)`). Roots of
//! rationals are usually irrational, hence the exact/approximate split.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harmonic::{self, HarmonicKind};
use crate::jet::{compose_truncated, DiffeoJet};
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly};
use crate::rational::{int, parse_pq, reconstruct, to_f64, to_pq_string, Rational};

/// Smallest `|det|` accepted for an approximate map.
pub const APPROX_DET_MIN: f64 = 1e-9;
/// Relative tolerance of the approximate conformality test.
pub const APPROX_CONFORMAL_TOL: f64 = 1e-12;
/// Coefficientwise tolerance for approximate compositions.
pub const APPROX_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConformalError {
    #[error("leading term is zero")]
    Zero,
    #[error("expected a homogeneous polynomial of degree {k}, found monomial {monomial}")]
    NotHomogeneous { k: u32, monomial: String },
    #[error("leading term is not harmonic: laplacian is {laplacian}")]
    NotHarmonic { laplacian: String },
    #[error("linear map is singular")]
    Singular,
    #[error("malformed linear map: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// `(x, y) -> (a x + b y, c x + d y)` for entries `[[a, b], [c, d]]`.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum LinearMap2 {
    Exact([[Rational; 2]; 2]),
    Approx([[f64; 2]; 2]),
}

impl LinearMap2 {
    pub fn exact(entries: [[Rational; 2]; 2]) -> Result<Self, ConformalError> {
        let [[a, b], [c, d]] = &entries;
        if (a * d - b * c).is_zero() {
            return Err(ConformalError::Singular);
        }
        Ok(LinearMap2::Exact(entries))
    }

    pub fn approx(entries: [[f64; 2]; 2]) -> Result<Self, ConformalError> {
        let [[a, b], [c, d]] = entries;
        let det = a * d - b * c;
        if !det.is_finite() || det.abs() <= APPROX_DET_MIN {
            return Err(ConformalError::Singular);
        }
        Ok(LinearMap2::Approx(entries))
    }

    pub fn identity() -> Self {
        LinearMap2::Exact([[int(1), int(0)], [int(0), int(1)]])
    }

    /// Multiplication by the complex number `re + i im`.
    pub fn complex_exact(re: Rational, im: Rational) -> Result<Self, ConformalError> {
        LinearMap2::exact([[re.clone(), -im.clone()], [im, re]])
    }

    pub fn rotation_approx(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        LinearMap2::Approx([[c, -s], [s, c]])
    }

    pub fn mode(&self) -> Mode {
        match self {
            LinearMap2::Exact(_) => Mode::Exact,
            LinearMap2::Approx(_) => Mode::Approx,
        }
    }

    pub fn entries_f64(&self) -> [[f64; 2]; 2] {
        match self {
            LinearMap2::Exact(e) => e.clone().map(|row| row.map(|v| to_f64(&v))),
            LinearMap2::Approx(e) => *e,
        }
    }

    /// Columns orthogonal and of equal length.
    pub fn is_conformal(&self) -> bool {
        match self {
            LinearMap2::Exact([[a, b], [c, d]]) => {
                (a * b + c * d).is_zero() && (a * a + c * c) == (b * b + d * d)
            }
            LinearMap2::Approx([[a, b], [c, d]]) => {
                let n1 = a * a + c * c;
                let n2 = b * b + d * d;
                let scale = n1.max(n2).max(f64::MIN_POSITIVE);
                (a * b + c * d).abs() <= APPROX_CONFORMAL_TOL * scale
                    && (n1 - n2).abs() <= APPROX_CONFORMAL_TOL * scale
            }
        }
    }

    /// Squared length of the first column, the factor by which the map scales
    /// the Laplacian when it is conformal.
    pub fn conformal_factor_exact(&self) -> Option<Rational> {
        match self {
            LinearMap2::Exact([[a, _], [c, _]]) => Some(a * a + c * c),
            LinearMap2::Approx(_) => None,
        }
    }

    pub fn as_diffeo(&self, jet_order: u32) -> Option<DiffeoJet> {
        let LinearMap2::Exact([[a, b], [c, d]]) = self else {
            return None;
        };
        let lin = |p: &Rational, q: &Rational| &Poly::x().scale(p) + &Poly::y().scale(q);
        Some(DiffeoJet {
            px: lin(a, b),
            py: lin(c, d),
            jet_order: jet_order.max(1),
        })
    }

    /// `p ∘ self` in exact arithmetic; `None` for approximate maps.
    pub fn compose_exact(&self, p: &Poly) -> Option<Poly> {
        let k = p.degree().unwrap_or(0).max(1);
        let phi = self.as_diffeo(k)?;
        Some(compose_truncated(p, &phi, k).expect("linear maps fix the origin").body)
    }

    /// `p ∘ self` evaluated in floating point, for either mode.
    pub fn compose_approx(&self, p: &Poly) -> ApproxPoly {
        let [[a, b], [c, d]] = self.entries_f64();
        let u = ApproxPoly::linear(a, b);
        let v = ApproxPoly::linear(c, d);
        let mut out = ApproxPoly::default();
        for (m, coeff) in p.terms() {
            let term = u.pow(m.ex).mul(&v.pow(m.ey)).scale(to_f64(coeff));
            out = out.add(&term);
        }
        out
    }
}

impl Serialize for LinearMap2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            mode: Mode,
            entries: &'a [[String; 2]; 2],
        }
        let entries = match self {
            LinearMap2::Exact(e) => e.clone().map(|row| row.map(|v| to_pq_string(&v))),
            LinearMap2::Approx(e) => e.map(|row| row.map(|v| v.to_string())),
        };
        Wire {
            mode: self.mode(),
            entries: &entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearMap2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Wire {
            mode: Mode,
            entries: [[String; 2]; 2],
        }
        let w = Wire::deserialize(d)?;
        let bad = |s: &str| D::Error::custom(format!("bad matrix entry {s:?}"));
        match w.mode {
            Mode::Exact => {
                let mut out: [[Rational; 2]; 2] = Default::default();
                for (i, row) in w.entries.iter().enumerate() {
                    for (j, s) in row.iter().enumerate() {
                        out[i][j] = parse_pq(s).ok_or_else(|| bad(s))?;
                    }
                }
                LinearMap2::exact(out).map_err(D::Error::custom)
            }
            Mode::Approx => {
                let mut out = [[0.0; 2]; 2];
                for (i, row) in w.entries.iter().enumerate() {
                    for (j, s) in row.iter().enumerate() {
                        out[i][j] = s.parse().map_err(|_| bad(s))?;
                    }
                }
                LinearMap2::approx(out).map_err(D::Error::custom)
            }
        }
    }
}

/// Floating-point polynomial, used only on the approximate path.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ApproxPoly {
    pub terms: BTreeMap<Monomial, f64>,
}

impl ApproxPoly {
    fn linear(a: f64, b: f64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::new(1, 0), a);
        terms.insert(Monomial::new(0, 1), b);
        ApproxPoly { terms }
    }

    pub fn from_exact(p: &Poly) -> Self {
        ApproxPoly {
            terms: p.terms().map(|(m, c)| (*m, to_f64(c))).collect(),
        }
    }

    fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::ONE, 1.0);
        ApproxPoly { terms }
    }

    pub fn add(&self, other: &ApproxPoly) -> ApproxPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            *terms.entry(*m).or_insert(0.0) += c;
        }
        ApproxPoly { terms }
    }

    pub fn sub(&self, other: &ApproxPoly) -> ApproxPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> ApproxPoly {
        ApproxPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &ApproxPoly) -> ApproxPoly {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *terms.entry(*ma * *mb).or_insert(0.0) += ca * cb;
            }
        }
        ApproxPoly { terms }
    }

    fn pow(&self, e: u32) -> ApproxPoly {
        (0..e).fold(ApproxPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn laplacian(&self) -> ApproxPoly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.ex >= 2 {
                *terms.entry(Monomial::new(m.ex - 2, m.ey)).or_insert(0.0) += c * (m.ex * (m.ex - 1)) as f64;
            }
            if m.ey >= 2 {
                *terms.entry(Monomial::new(m.ex, m.ey - 2)).or_insert(0.0) += c * (m.ey * (m.ey - 1)) as f64;
            }
        }
        ApproxPoly { terms }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn coeff(&self, m: Monomial) -> f64 {
        self.terms.get(&m).copied().unwrap_or(0.0)
    }
}

fn check_homogeneous_harmonic(h: &Poly, k: u32) -> Result<(), ConformalError> {
    if h.is_zero() {
        return Err(ConformalError::Zero);
    }
    if let Some((m, _)) = h.terms().find(|(m, _)| m.degree() != k) {
        return Err(ConformalError::NotHomogeneous {
            k,
            monomial: m.to_string(),
        });
    }
    let lap = harmonic::laplacian(h);
    if !lap.is_zero() {
        return Err(ConformalError::NotHarmonic {
            laplacian: lap.to_string(),
        });
    }
    Ok(())
}

/// Coordinates `(a, b)` of `h = a f_k + b g_k`, found by an exact linear solve.
pub fn leading_as_complex(h: &Poly, k: u32) -> Result<(Rational, Rational), ConformalError> {
    check_homogeneous_harmonic(h, k)?;
    let [fk, gk] = harmonic::harmonic_basis(k);
    let basis = Matrix::from_columns(&[fk.coeff_vector(k), gk.coeff_vector(k)], k as usize + 1);
    let sol = basis
        .solve(&h.coeff_vector(k))
        .expect("degree-k harmonic polynomials lie in the span of f_k and g_k");
    Ok((sol[0].clone(), sol[1].clone()))
}

/// Exact Gaussian rationals, just enough to test a candidate root.
#[derive(Clone, Debug, PartialEq)]
struct GaussRational {
    re: Rational,
    im: Rational,
}

impl GaussRational {
    fn mul(&self, o: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn pow(&self, e: u32) -> GaussRational {
        (0..e).fold(
            GaussRational {
                re: Rational::one(),
                im: Rational::zero(),
            },
            |acc, _| acc.mul(self),
        )
    }
}

/// Linear conformal map `phi` with `h ∘ phi` equal to the `target` generator.
///
/// The multiplier is the principal `k`-th root of `1/(a - ib)` (target `F`) or
/// `-i/(a - ib)` (target `G`). It is returned exactly when that root is a
/// Gaussian rational, otherwise in floating point.
pub fn normalize_leading(h: &Poly, k: u32, target: HarmonicKind) -> Result<LinearMap2, ConformalError> {
    let (a, b) = leading_as_complex(h, k)?;
    let norm = &a * &a + &b * &b;
    // 1/(a - ib) = (a + ib)/norm; -i/(a - ib) = (b - ia)/norm.
    let w = match target {
        HarmonicKind::F => GaussRational {
            re: &a / &norm,
            im: &b / &norm,
        },
        HarmonicKind::G => GaussRational {
            re: &b / &norm,
            im: -&a / &norm,
        },
    };
    let (wr, wi) = (to_f64(&w.re), to_f64(&w.im));
    let modulus = wr.hypot(wi).powf(1.0 / k as f64);
    let arg = wi.atan2(wr) / k as f64;
    let (mr, mi) = (modulus * arg.cos(), modulus * arg.sin());

    let tol = 1e-12 * modulus.max(1.0);
    if let (Some(re), Some(im)) = (reconstruct(mr, tol, 1_000_000), reconstruct(mi, tol, 1_000_000)) {
        let mu = GaussRational { re, im };
        if mu.pow(k) == w {
            return LinearMap2::complex_exact(mu.re, mu.im);
        }
    }
    LinearMap2::approx([[mr, -mi], [mi, mr]])
}

/// One element `R_{2 pi index / k} ∘ diag(1, -1)^reflected` of the stabilizer of `f_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerElement {
    pub rotation_index: u32,
    pub reflected: bool,
}

/// Exact rational `(cos, sin)` of `2 pi j / n` when both are rational.
fn rational_root_of_unity(j: u32, n: u32) -> Option<(Rational, Rational)> {
    let j = j % n;
    // Rational points on the unit circle at angles 2 pi j/n occur only for
    // multiples of a quarter turn.
    if !(4 * j).is_multiple_of(n) {
        return None;
    }
    Some(match (4 * j) / n {
        0 => (int(1), int(0)),
        1 => (int(0), int(1)),
        2 => (int(-1), int(0)),
        _ => (int(0), int(-1)),
    })
}

impl StabilizerElement {
    pub fn to_map(&self, k: u32) -> LinearMap2 {
        let k = k.max(1);
        let sign = if self.reflected { -1 } else { 1 };
        match rational_root_of_unity(self.rotation_index, k) {
            Some((c, s)) => LinearMap2::Exact([
                [c.clone(), -s.clone() * int(sign)],
                [s, c * int(sign)],
            ]),
            None => {
                let theta = 2.0 * PI * (self.rotation_index % k) as f64 / k as f64;
                let (s, c) = theta.sin_cos();
                let sign = sign as f64;
                LinearMap2::Approx([[c, -s * sign], [s, c * sign]])
            }
        }
    }
}

/// The rotation by `2 pi / k` and the reflection `(x, y) -> (x, -y)`.
pub fn stabilizer_generators(k: u32) -> Vec<LinearMap2> {
    vec![
        StabilizerElement {
            rotation_index: 1,
            reflected: false,
        }
        .to_map(k),
        StabilizerElement {
            rotation_index: 0,
            reflected: true,
        }
        .to_map(k),
    ]
}

/// Result of checking `p ∘ phi = p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixVerdict {
    pub mode: Mode,
    pub fixes: bool,
    /// Largest coefficient of `p ∘ phi - p`; exactly zero when exact and fixing.
    pub max_residual: f64,
}

pub fn check_fixes(p: &Poly, phi: &LinearMap2) -> FixVerdict {
    match phi.compose_exact(p) {
        Some(q) => {
            let diff = &q - p;
            FixVerdict {
                mode: Mode::Exact,
                fixes: diff.is_zero(),
                max_residual: ApproxPoly::from_exact(&diff).max_abs(),
            }
        }
        None => {
            let r = phi.compose_approx(p).sub(&ApproxPoly::from_exact(p)).max_abs();
            FixVerdict {
                mode: Mode::Approx,
                fixes: r < APPROX_RESIDUAL_TOL,
                max_residual: r,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::{f, g};
    use crate::rational::rat;

    #[test]
    fn complex_coordinates_of_generators() {
        assert_eq!(leading_as_complex(&f(5), 5).unwrap(), (int(1), int(0)));
        assert_eq!(leading_as_complex(&g(6), 6).unwrap(), (int(0), int(1)));
        let h = &f(7).scale(&int(2)) - &g(7).scale(&int(3));
        assert_eq!(leading_as_complex(&h, 7).unwrap(), (int(2), int(-3)));
    }

    #[test]
    fn rejects_bad_leading_terms() {
        let p: Poly = "x^5 + x^6".parse().unwrap();
        assert!(matches!(leading_as_complex(&p, 5), Err(ConformalError::NotHomogeneous { .. })));
        let q: Poly = "x^5".parse().unwrap();
        assert!(matches!(leading_as_complex(&q, 5), Err(ConformalError::NotHarmonic { .. })));
        assert_eq!(leading_as_complex(&Poly::zero(), 5), Err(ConformalError::Zero));
    }

    #[test]
    fn normalizing_a_generator_is_the_identity() {
        assert_eq!(normalize_leading(&f(5), 5, HarmonicKind::F).unwrap(), LinearMap2::identity());
        assert_eq!(normalize_leading(&g(6), 6, HarmonicKind::G).unwrap(), LinearMap2::identity());
    }

    #[test]
    fn normalizing_a_scaled_generator_is_a_scaling() {
        let phi = normalize_leading(&f(5).scale(&int(32)), 5, HarmonicKind::F).unwrap();
        assert_eq!(
            phi,
            LinearMap2::Exact([[rat(1, 2), int(0)], [int(0), rat(1, 2)]])
        );
        assert_eq!(phi.compose_exact(&f(5).scale(&int(32))).unwrap(), f(5));
    }

    #[test]
    fn g5_to_f5_is_an_approximate_tenth_turn() {
        let phi = normalize_leading(&g(5), 5, HarmonicKind::F).unwrap();
        assert_eq!(phi.mode(), Mode::Approx);
        let [[a, b], [c, d]] = phi.entries_f64();
        let t = PI / 10.0;
        assert!((a - t.cos()).abs() < 1e-12 && (d - t.cos()).abs() < 1e-12);
        assert!((c - t.sin()).abs() < 1e-12 && (b + t.sin()).abs() < 1e-12);
        let r = phi.compose_approx(&g(5)).sub(&ApproxPoly::from_exact(&f(5))).max_abs();
        assert!(r < APPROX_RESIDUAL_TOL, "residual {r}");
    }

    #[test]
    fn stabilizer_fixes_fk() {
        for k in 1..=10 {
            for phi in stabilizer_generators(k) {
                let v = check_fixes(&f(k), &phi);
                assert!(v.fixes, "k={k} {phi:?} residual {}", v.max_residual);
            }
        }
        let gens = stabilizer_generators(4);
        assert_eq!(gens[0].mode(), Mode::Exact);
        assert_eq!(gens[0].compose_exact(&f(4)).unwrap(), f(4));
        assert_eq!(stabilizer_generators(5)[0].mode(), Mode::Approx);
    }

    #[test]
    fn reflection_parity() {
        let refl = &stabilizer_generators(1)[1];
        for k in 1..=10 {
            assert_eq!(refl.compose_exact(&f(k)).unwrap(), f(k));
            assert_eq!(refl.compose_exact(&g(k)).unwrap(), -g(k));
        }
    }

    #[test]
    fn json_shape() {
        let m = LinearMap2::Exact([[rat(3, 5), rat(-4, 5)], [rat(4, 5), rat(3, 5)]]);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["mode"], "exact");
        assert_eq!(v["entries"][0][1], "-4/5");
        let back: LinearMap2 = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let a = LinearMap2::rotation_approx(0.3);
        let v = serde_json::to_value(&a).unwrap();
        assert_eq!(v["mode"], "approx");
        let back: LinearMap2 = serde_json::from_value(v).unwrap();
        assert_eq!(back, a);
    }
}
