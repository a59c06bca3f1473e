//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use germ_core::linalg::Matrix;
use germ_core::rational::{factorial, rat};
use germ_core::{Monomial, Poly, Rational};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(s: &str) -> Poly {
    s.parse().unwrap()
}

/// Sparse polynomial with small rational coefficients and degrees `0..=max_deg`.
pub fn random_poly(r: &mut ChaCha8Rng, max_deg: u32, terms: usize) -> Poly {
    Poly::from_terms((0..terms).map(|_| {
        let d = r.random_range(0..=max_deg);
        let ey = r.random_range(0..=d);
        (Monomial::new(d - ey, ey), rat(r.random_range(-9..=9), r.random_range(1..=4)))
    }))
}

/// Homogeneous degree-`d` polynomial with rational coefficients.
pub fn random_homogeneous_rational(r: &mut ChaCha8Rng, d: u32) -> Poly {
    Poly::from_terms(
        Monomial::of_degree(d)
            .into_iter()
            .map(|m| (m, rat(r.random_range(-20..=20), r.random_range(1..=7)))),
    )
}

pub fn poly_strategy(max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -30i64..=30, 1i64..=6), 0..=max_terms).prop_map(
        move |ts| {
            Poly::from_terms(ts.into_iter().map(|(a, b, n, d)| {
                let b = b.min(max_deg - a.min(max_deg));
                (Monomial::new(a, b), rat(n, d))
            }))
        },
    )
}

/// Independent reference arithmetic on `(ex, ey) -> coefficient` maps.
pub mod naive {
    use super::*;

    pub type Naive = BTreeMap<(u32, u32), Rational>;

    pub fn from(p: &Poly) -> Naive {
        p.terms().map(|(m, c)| ((m.ex, m.ey), c.clone())).collect()
    }

    pub fn to(n: &Naive) -> Poly {
        Poly::from_terms(n.iter().map(|(&(a, b), c)| (Monomial::new(a, b), c.clone())))
    }

    fn add_into(out: &mut Naive, key: (u32, u32), c: Rational) {
        let e = out.entry(key).or_insert_with(Rational::zero);
        *e += c;
    }

    pub fn mul(a: &Naive, b: &Naive) -> Naive {
        let mut out = Naive::new();
        for (&(a1, b1), c1) in a {
            for (&(a2, b2), c2) in b {
                add_into(&mut out, (a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `Δ(x^a y^b) = a(a-1) x^(a-2) y^b + b(b-1) x^a y^(b-2)`.
    pub fn laplacian(a: &Naive) -> Naive {
        let mut out = Naive::new();
        for (&(ex, ey), c) in a {
            if ex >= 2 {
                add_into(&mut out, (ex - 2, ey), c * Rational::from_integer((ex * (ex - 1)).into()));
            }
            if ey >= 2 {
                add_into(&mut out, (ex, ey - 2), c * Rational::from_integer((ey * (ey - 1)).into()));
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn laplacian_power(a: &Naive, l: u32) -> Naive {
        (0..l).fold(a.clone(), |acc, _| laplacian(&acc))
    }

    /// `∂x^i ∂y^j` evaluated at the origin.
    pub fn derivative_at_origin(a: &Naive, i: u32, j: u32) -> Rational {
        a.get(&(i, j))
            .map(|c| c * factorial(i) * factorial(j))
            .unwrap_or_else(Rational::zero)
    }
}

/// Residual coefficients by direct differentiation with the naive calculus.
pub fn residual_oracle(k: u32, t: u32, rho: &Poly) -> Vec<Rational> {
    let n = naive::from(rho);
    let lap = |m| naive::laplacian_power(&n, m);
    let d = naive::derivative_at_origin;
    let f = factorial;
    match (k, t) {
        (5, 6) => vec![d(&lap(3), 0, 0) / f(6)],
        (6, 7) => {
            let q = lap(3);
            vec![d(&q, 1, 0) / f(7), d(&q, 0, 1) / f(6)]
        }
        (6, 8) => vec![d(&lap(4), 0, 0) / f(8)],
        (7, 8) => {
            let q = lap(3);
            vec![
                (d(&q, 2, 0) - d(&q, 0, 2) * rat(3, 1)) / f(8),
                d(&q, 1, 1) / f(7),
                d(&q, 0, 2) / (f(6) * f(2)),
            ]
        }
        (7, 9) => {
            let q = lap(4);
            vec![d(&q, 1, 0) / f(9), d(&q, 0, 1) / f(8)]
        }
        (7, 10) => vec![d(&lap(5), 0, 0) / f(10)],
        _ => panic!("unsupported pair"),
    }
}

/// Rank over `Z/pZ` of an integer-valued rational matrix (entries are scaled
/// to integers first). Equals the rational rank unless `p` divides a minor.
pub fn rank_mod_p(m: &Matrix, p: i128) -> usize {
    let rows: Vec<Vec<i128>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|q| {
                    let num = q.numer().to_i128().unwrap().rem_euclid(p);
                    let den = q.denom().to_i128().unwrap().rem_euclid(p);
                    num * inv_mod(den, p) % p
                })
                .collect()
        })
        .collect();
    let mut a = rows;
    let (nr, nc) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..nc {
        let Some(piv) = (rank..nr).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        for i in 0..nr {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                let pivot_row = a[rank].clone();
                for (x, q) in a[i].iter_mut().zip(&pivot_row) {
                    *x = (*x - f * q).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn inv_mod(a: i128, p: i128) -> i128 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, p, a.rem_euclid(p));
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    assert_eq!(r, 1, "not invertible mod p");
    t.rem_euclid(p)
}

pub const LARGE_PRIME: i128 = 1_000_000_007;
