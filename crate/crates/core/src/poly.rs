//! Sparse bivariate polynomials over exact rationals.
//!
//! A [`Poly`] is a finite map from [`Monomial`] to a nonzero [`Rational`]
//! coefficient. Terms iterate in the canonical order: ascending total degree,
//! and within one degree by descending power of `x`, so that a homogeneous
//! component of degree `d` reads `x^d, x^(d-1)*y, ..., y^d`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{int, Rational};

/// `x^ex * y^ey`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub ex: u32,
    pub ey: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { ex: 0, ey: 0 };

    pub const fn new(ex: u32, ey: u32) -> Self {
        Monomial { ex, ey }
    }

    pub const fn degree(&self) -> u32 {
        self.ex + self.ey
    }

    /// All monomials of total degree `d` in canonical order (`x^d` first).
    pub fn of_degree(d: u32) -> Vec<Monomial> {
        (0..=d).map(|j| Monomial::new(d - j, j)).collect()
    }

    /// Position of this monomial inside [`Monomial::of_degree`] of its degree.
    pub fn index_in_degree(&self) -> usize {
        self.ey as usize
    }
}

impl std::ops::Mul for Monomial {
    type Output = Monomial;

    fn mul(self, other: Monomial) -> Monomial {
        Monomial::new(self.ex + other.ex, self.ey + other.ey)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.ex.cmp(&self.ex))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::text::write_monomial(f, *self, ["x", "y"])
    }
}

/// Order of a germ at the origin. The zero polynomial has infinite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::ONE)
    }

    pub fn x() -> Self {
        Poly::term(Rational::one(), Monomial::new(1, 0))
    }

    pub fn y() -> Self {
        Poly::term(Rational::one(), Monomial::new(0, 1))
    }

    pub fn monomial(ex: u32, ey: u32) -> Self {
        Poly::term(Rational::one(), Monomial::new(ex, ey))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn order(&self) -> Order {
        self.terms
            .keys()
            .next()
            .map_or(Order::Infinite, |m| Order::Finite(m.degree()))
    }

    /// Highest total degree present, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        match (self.terms.keys().next(), self.terms.keys().next_back()) {
            (Some(a), Some(b)) => a.degree() == b.degree(),
            _ => true,
        }
    }

    pub fn homogeneous_component(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .range(Monomial::new(d, 0)..=Monomial::new(0, d))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Distinct degrees carrying at least one term, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.terms.keys().map(Monomial::degree).collect();
        out.dedup();
        out
    }

    /// Drops every term of total degree above `k`.
    pub fn truncated(&self, k: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .take_while(|(m, _)| m.degree() <= k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Product with every term above degree `k` discarded as it is formed.
    pub fn mul_truncated(&self, other: &Poly, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            if ma.degree() > k {
                break;
            }
            for (mb, cb) in &other.terms {
                let m = *ma * *mb;
                if m.degree() > k {
                    break;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial_x(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.ex > 0)
                .map(|(m, c)| (Monomial::new(m.ex - 1, m.ey), c * int(m.ex as i64))),
        )
    }

    pub fn partial_y(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.ey > 0)
                .map(|(m, c)| (Monomial::new(m.ex, m.ey - 1), c * int(m.ey as i64))),
        )
    }

    /// Coefficients of the degree-`d` component, indexed like [`Monomial::of_degree`].
    pub fn coeff_vector(&self, d: u32) -> Vec<Rational> {
        Monomial::of_degree(d).into_iter().map(|m| self.coeff(m)).collect()
    }

    /// Inverse of [`Poly::coeff_vector`].
    pub fn from_coeff_vector(d: u32, coeffs: &[Rational]) -> Poly {
        assert_eq!(coeffs.len(), d as usize + 1, "coefficient vector length");
        Poly::from_terms(Monomial::of_degree(d).into_iter().zip(coeffs.iter().cloned()))
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| crate::rational::to_f64(c) * x.powi(m.ex as i32) * y.powi(m.ey as i32))
            .sum()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::format_poly(self))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl std::str::FromStr for Poly {
    type Err = crate::text::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::text::parse_poly(s)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(*ma * *mb, ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let p: Poly = s.parse().map_err(serde::de::Error::custom)?;
        let single = p.terms().next().filter(|(_, c)| p.len() == 1 && c.is_one()).map(|(m, _)| *m);
        single.ok_or_else(|| serde::de::Error::custom(format!("not a monomial: {s:?}")))
    }
}
