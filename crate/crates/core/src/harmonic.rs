//! Harmonic generators `f_k = Re (x+iy)^k`, `g_k = Im (x+iy)^k`, the Laplacian
//! calculus and seeded sampling of (poly)harmonic homogeneous polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly};
use crate::rational::{binomial, Rational};

/// Name and version of the generator behind every seeded sample.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HarmonicKind {
    /// Real part of `(x + iy)^k`.
    F,
    /// Imaginary part of `(x + iy)^k`.
    G,
}

impl fmt::Display for HarmonicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HarmonicKind::F => "f",
            HarmonicKind::G => "g",
        })
    }
}

/// Expands `Re (x+iy)^k` or `Im (x+iy)^k` from the binomial theorem.
pub fn harmonic_generator(k: u32, kind: HarmonicKind) -> Poly {
    // (iy)^j contributes i^j: real for even j, imaginary for odd j.
    let parity = match kind {
        HarmonicKind::F => 0,
        HarmonicKind::G => 1,
    };
    Poly::from_terms((0..=k).filter(|j| j % 2 == parity).map(|j| {
        let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
        (
            Monomial::new(k - j, j),
            Rational::from_integer(binomial(k, j) * sign),
        )
    }))
}

pub fn f(k: u32) -> Poly {
    harmonic_generator(k, HarmonicKind::F)
}

pub fn g(k: u32) -> Poly {
    harmonic_generator(k, HarmonicKind::G)
}

/// Which generator, if any, `p` is exactly equal to.
pub fn generator_kind(p: &Poly) -> Option<(u32, HarmonicKind)> {
    let k = p.order().finite()?;
    if !p.is_homogeneous() || k == 0 {
        return None;
    }
    [HarmonicKind::F, HarmonicKind::G]
        .into_iter()
        .find(|&kind| harmonic_generator(k, kind) == *p)
        .map(|kind| (k, kind))
}

pub fn partial_x(p: &Poly) -> Poly {
    p.partial_x()
}

pub fn partial_y(p: &Poly) -> Poly {
    p.partial_y()
}

pub fn laplacian(p: &Poly) -> Poly {
    &p.partial_x().partial_x() + &p.partial_y().partial_y()
}

pub fn laplacian_power(p: &Poly, l: u32) -> Poly {
    (0..l).fold(p.clone(), |acc, _| laplacian(&acc))
}

pub fn is_l_harmonic(p: &Poly, l: u32) -> bool {
    laplacian_power(p, l).is_zero()
}

pub fn harmonic_basis(k: u32) -> [Poly; 2] {
    [f(k), g(k)]
}

/// Applies the constant-coefficient operator whose symbol is `symbol`
/// (`x -> d/dx`, `y -> d/dy`) to `p`.
pub fn apply_symbol(symbol: &Poly, p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in symbol.terms() {
        let mut q = p.clone();
        for _ in 0..m.ex {
            q = q.partial_x();
        }
        for _ in 0..m.ey {
            q = q.partial_y();
        }
        out = &out + &q.scale(c);
    }
    out
}

/// Matrix of `Δ^l` from degree-`d` coefficient vectors to degree-`(d - 2l)` ones.
/// When `2l > d` the target space is zero-dimensional.
pub fn laplacian_power_matrix(d: u32, l: u32) -> Matrix {
    let src = Monomial::of_degree(d);
    let rows = if 2 * l <= d { (d - 2 * l + 1) as usize } else { 0 };
    let cols: Vec<Vec<Rational>> = src
        .iter()
        .map(|m| {
            let img = laplacian_power(&Poly::monomial(m.ex, m.ey), l);
            if rows == 0 {
                Vec::new()
            } else {
                img.coeff_vector(d - 2 * l)
            }
        })
        .collect();
    if rows == 0 {
        return Matrix::zeros(0, src.len());
    }
    Matrix::from_columns(&cols, rows)
}

/// Basis of homogeneous degree-`d` polynomials annihilated by `Δ^l`,
/// each scaled to coprime integer coefficients.
pub fn l_harmonic_basis(d: u32, l: u32) -> Vec<Poly> {
    let m = laplacian_power_matrix(d, l);
    let ker = if m.rows() == 0 {
        (0..=d as usize)
            .map(|i| {
                let mut v = vec![Rational::zero(); d as usize + 1];
                v[i] = Rational::one();
                v
            })
            .collect()
    } else {
        m.kernel()
    };
    ker.into_iter()
        .map(|v| Poly::from_coeff_vector(d, &primitive_integer_vector(&v)))
        .collect()
}

fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
    let gcd = if gcd.is_zero() { BigInt::one() } else { gcd };
    ints.into_iter().map(|n| Rational::from_integer(n / &gcd)).collect()
}

/// Parameters of a seeded random homogeneous polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub degree: u32,
    pub harmonicity: Option<u32>,
    pub seed: u64,
    pub coefficient_bound: u32,
}

impl SampleSpec {
    pub fn homogeneous(degree: u32, seed: u64, coefficient_bound: u32) -> Self {
        SampleSpec {
            degree,
            harmonicity: None,
            seed,
            coefficient_bound,
        }
    }

    pub fn l_harmonic(degree: u32, l: u32, seed: u64, coefficient_bound: u32) -> Self {
        SampleSpec {
            degree,
            harmonicity: Some(l),
            seed,
            coefficient_bound,
        }
    }
}

fn draw_nonzero(rng: &mut ChaCha8Rng, n: usize, bound: u32) -> Vec<i64> {
    let b = bound.max(1) as i64;
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-b..=b)).collect();
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

/// Homogeneous polynomial of degree `spec.degree` with integer coefficients in
/// `[-B, B]`, never zero. Ignores `spec.harmonicity`.
pub fn sample_homogeneous(spec: &SampleSpec) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let coeffs = draw_nonzero(&mut rng, spec.degree as usize + 1, spec.coefficient_bound);
    Poly::from_terms(
        Monomial::of_degree(spec.degree)
            .into_iter()
            .zip(coeffs.into_iter().map(|c| Rational::from_integer(c.into()))),
    )
}

/// Seeded integer combination (weights in `[-B, B]`) of the exact kernel basis of
/// `Δ^l` on degree `spec.degree`. `spec.harmonicity` defaults to 1.
pub fn sample_l_harmonic(spec: &SampleSpec) -> Poly {
    let l = spec.harmonicity.unwrap_or(1);
    let basis = l_harmonic_basis(spec.degree, l);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights = draw_nonzero(&mut rng, basis.len(), spec.coefficient_bound);
    basis
        .iter()
        .zip(weights)
        .fold(Poly::zero(), |acc, (b, w)| &acc + &b.scale(&Rational::from_integer(w.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use num_traits::Signed;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn generator_expansions() {
        assert_eq!(f(5), p("x^5 - 10*x^3*y^2 + 5*x*y^4"));
        assert_eq!(g(6), p("6*x^5*y - 20*x^3*y^3 + 6*x*y^5"));
        assert_eq!(f(3), p("x^3 - 3*x*y^2"));
        assert_eq!(f(4), p("x^4 - 6*x^2*y^2 + y^4"));
        assert_eq!(g(4), p("4*x^3*y - 4*x*y^3"));
        assert_eq!(f(2), p("x^2 - y^2"));
        assert_eq!(g(2), p("2*x*y"));
        assert_eq!(f(1), p("x"));
    }

    #[test]
    fn generators_are_harmonic() {
        for k in 1..=12 {
            assert!(laplacian(&f(k)).is_zero());
            assert!(laplacian(&g(k)).is_zero());
        }
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(laplacian_power(&p("x^6"), 3), Poly::constant(int(720)));
        assert_eq!(laplacian_power(&p("x^4*y^2"), 3), Poly::constant(int(144)));
        assert!(is_l_harmonic(&p("x^3 - 3*x*y^2"), 1));
        assert!(!is_l_harmonic(&p("x^6"), 3));
    }

    #[test]
    fn generator_kind_detection() {
        assert_eq!(generator_kind(&f(5)), Some((5, HarmonicKind::F)));
        assert_eq!(generator_kind(&g(7)), Some((7, HarmonicKind::G)));
        assert_eq!(generator_kind(&f(5).scale(&int(2))), None);
        assert_eq!(generator_kind(&Poly::zero()), None);
    }

    #[test]
    fn apply_symbol_matches_manual_derivatives() {
        let q = p("x^3*y^2 + y^5");
        assert_eq!(apply_symbol(&p("x*y"), &q), q.partial_x().partial_y());
        assert_eq!(apply_symbol(&p("x^2 + y^2"), &q), laplacian(&q));
    }

    #[test]
    fn kernel_dimensions() {
        assert_eq!(l_harmonic_basis(6, 3).len(), 6);
        for k in 2..=12 {
            assert_eq!(l_harmonic_basis(k, 1).len(), 2);
        }
        assert_eq!(l_harmonic_basis(3, 2).len(), 4);
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        for seed in 0..100 {
            let spec = SampleSpec::homogeneous(6, seed, 9);
            let a = sample_homogeneous(&spec);
            assert_eq!(a, sample_homogeneous(&spec));
            assert_eq!(a.degree(), Some(6));
            assert!(a.is_homogeneous());
            assert!(a.terms().all(|(_, c)| c.abs() <= int(9)));
        }
    }

    #[test]
    fn l_harmonic_samples() {
        for seed in 0..100 {
            let s = sample_l_harmonic(&SampleSpec::l_harmonic(6, 3, seed, 5));
            assert!(is_l_harmonic(&s, 3));
            assert!(s.is_homogeneous() && s.degree() == Some(6));
        }
    }

}
