//! Jets of germs and polynomial coordinate changes fixing the origin.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Monomial, Order, Poly};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("coordinate function {coordinate} has nonzero constant term {constant}")]
    MovesOrigin { coordinate: &'static str, constant: String },
    #[error("linear part of the coordinate change is singular")]
    SingularLinearPart,
    #[error("jet order must be positive")]
    ZeroJetOrder,
}

/// A polynomial truncated at a declared jet order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermJet {
    pub body: Poly,
    pub jet_order: u32,
}

impl GermJet {
    pub fn order(&self) -> Order {
        self.body.order()
    }
}

pub fn truncate_jet(p: &Poly, k: u32) -> GermJet {
    GermJet {
        body: p.truncated(k),
        jet_order: k,
    }
}

pub fn jet_equal(p: &Poly, q: &Poly, k: u32) -> bool {
    p.truncated(k) == q.truncated(k)
}

/// Polynomial map `(x, y) -> (px, py)` fixing the origin, known up to `jet_order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffeoJet {
    pub px: Poly,
    pub py: Poly,
    pub jet_order: u32,
}

impl DiffeoJet {
    pub fn identity(jet_order: u32) -> Self {
        DiffeoJet {
            px: Poly::x(),
            py: Poly::y(),
            jet_order,
        }
    }

    /// Checks that the map fixes the origin and has an invertible linear part.
    pub fn new(px: Poly, py: Poly, jet_order: u32) -> Result<Self, JetError> {
        if jet_order == 0 {
            return Err(JetError::ZeroJetOrder);
        }
        let phi = DiffeoJet {
            px: px.truncated(jet_order),
            py: py.truncated(jet_order),
            jet_order,
        };
        phi.check_origin()?;
        let [[a, b], [c, d]] = phi.linear_part();
        if (a * d - b * c).is_zero() {
            return Err(JetError::SingularLinearPart);
        }
        Ok(phi)
    }

    /// Identity plus the given higher-order corrections.
    pub fn perturbation(dx: &Poly, dy: &Poly, jet_order: u32) -> Self {
        DiffeoJet {
            px: (&Poly::x() + dx).truncated(jet_order),
            py: (&Poly::y() + dy).truncated(jet_order),
            jet_order,
        }
    }

    fn check_origin(&self) -> Result<(), JetError> {
        for (name, p) in [("x", &self.px), ("y", &self.py)] {
            let c = p.coeff(Monomial::ONE);
            if !c.is_zero() {
                return Err(JetError::MovesOrigin {
                    coordinate: name,
                    constant: c.to_string(),
                });
            }
        }
        Ok(())
    }

    /// `[[dpx/dx, dpx/dy], [dpy/dx, dpy/dy]]` at the origin.
    pub fn linear_part(&self) -> [[Rational; 2]; 2] {
        let lin = |p: &Poly| [p.coeff(Monomial::new(1, 0)), p.coeff(Monomial::new(0, 1))];
        [lin(&self.px), lin(&self.py)]
    }

    pub fn is_identity_tangent(&self) -> bool {
        let [[a, b], [c, d]] = self.linear_part();
        a.is_one() && b.is_zero() && c.is_zero() && d.is_one()
    }

    /// `self ∘ inner`, i.e. `(x, y) -> self(inner(x, y))`, truncated at the smaller jet order.
    pub fn compose(&self, inner: &DiffeoJet) -> DiffeoJet {
        let k = self.jet_order.min(inner.jet_order);
        DiffeoJet {
            px: substitute(&self.px, &inner.px, &inner.py, k),
            py: substitute(&self.py, &inner.px, &inner.py, k),
            jet_order: k,
        }
    }
}

/// `p(u, v)` with all terms above degree `k` discarded. Requires `u`, `v` of order at least one.
fn substitute(p: &Poly, u: &Poly, v: &Poly, k: u32) -> Poly {
    let max_ex = p.terms().map(|(m, _)| m.ex).max().unwrap_or(0);
    let max_ey = p.terms().map(|(m, _)| m.ey).max().unwrap_or(0);
    let powers = |base: &Poly, n: u32| {
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(Poly::one());
        for i in 0..n as usize {
            let next = out[i].mul_truncated(base, k);
            out.push(next);
        }
        out
    };
    let (u_pows, v_pows) = (powers(u, max_ex.min(k)), powers(v, max_ey.min(k)));
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        if m.degree() > k {
            break;
        }
        let prod = u_pows[m.ex as usize].mul_truncated(&v_pows[m.ey as usize], k);
        out = &out + &prod.scale(c);
    }
    out
}

/// The `k`-jet of `p ∘ phi`.
pub fn compose_truncated(p: &Poly, phi: &DiffeoJet, k: u32) -> Result<GermJet, JetError> {
    if k == 0 {
        return Err(JetError::ZeroJetOrder);
    }
    phi.check_origin()?;
    Ok(GermJet {
        body: substitute(p, &phi.px, &phi.py, k),
        jet_order: k,
    })
}
