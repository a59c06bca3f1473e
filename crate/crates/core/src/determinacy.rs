//! Finite determinacy through the inclusion `m^k ⊂ m J_h + m^(k+1)`, decided by
//! exact rank computations on truncated jets.

use serde::{Deserialize, Serialize};

use crate::harmonic;
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;
use crate::reduction::action_matrix;

/// `[∂h/∂x, ∂h/∂y]`.
pub fn jacobian_generators(h: &Poly) -> Vec<Poly> {
    vec![h.partial_x(), h.partial_y()]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionCertificate {
    pub k: u32,
    pub generators: Vec<Poly>,
    /// Number of products `m * ∂h` with `1 <= deg m <= k`.
    pub generator_count: usize,
    pub rank: usize,
    pub required_rank: usize,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Monomial>,
}

/// Decides `m^k ⊂ m J_h + m^(k+1)`.
///
/// Modulo `m^(k+1)`, `m J_h` is spanned by the truncations of `m * ∂h/∂x`,
/// `m * ∂h/∂y` for monomials `m` of degree `1..=k`. A degree-`k` polynomial
/// lies in that span plus `m^(k+1)` exactly when some combination has no
/// terms below degree `k` and the given degree-`k` part, so the rank is taken
/// over the degree-`k` projection of the combinations that vanish below `k`.
/// For homogeneous `h` this is just the span of the degree-`k` products.
pub fn check_inclusion(h: &Poly, k: u32) -> InclusionCertificate {
    let generators = jacobian_generators(h);
    let products: Vec<Poly> = (1..=k)
        .flat_map(Monomial::of_degree)
        .flat_map(|m| {
            generators
                .iter()
                .map(move |g| (&Poly::monomial(m.ex, m.ey) * g).truncated(k))
        })
        .collect();

    // Products with terms below degree k can only help through combinations
    // in which those terms cancel; the rest contribute their top part as is.
    let (mixed, pure): (Vec<&Poly>, Vec<&Poly>) = products
        .iter()
        .filter(|p| !p.is_zero())
        .partition(|p| p.order().finite().is_some_and(|o| o < k));
    let mut top: Vec<Vec<Rational>> = pure.iter().map(|p| p.coeff_vector(k)).collect();
    if mixed.iter().any(|p| !p.homogeneous_component(k).is_zero()) {
        let low_rows: Vec<Monomial> = (0..k).flat_map(Monomial::of_degree).collect();
        let low = Matrix::from_columns(
            &mixed
                .iter()
                .map(|p| low_rows.iter().map(|m| p.coeff(*m)).collect())
                .collect::<Vec<Vec<Rational>>>(),
            low_rows.len(),
        );
        for combo in low.kernel() {
            let mut v = vec![Rational::default(); k as usize + 1];
            for (w, p) in combo.iter().zip(&mixed) {
                if *w == Rational::default() {
                    continue;
                }
                for (slot, coeff) in v.iter_mut().zip(p.coeff_vector(k)) {
                    *slot += w * coeff;
                }
            }
            top.push(v);
        }
    }
    let span = if top.is_empty() {
        Matrix::zeros(k as usize + 1, 0)
    } else {
        Matrix::from_columns(&top, k as usize + 1)
    };
    let rank = span.rank();
    let required_rank = k as usize + 1;
    let witness = (rank < required_rank)
        .then(|| {
            Monomial::of_degree(k)
                .into_iter()
                .find(|m| !span.spans(&Poly::monomial(m.ex, m.ey).coeff_vector(k)))
        })
        .flatten();
    InclusionCertificate {
        k,
        generators,
        generator_count: products.len(),
        rank,
        required_rank,
        holds: rank == required_rank,
        witness,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Orders 1 and 2: implicit function theorem and Morse lemma.
    Convention,
    /// The inclusion holds at the bound itself.
    Inclusion,
    /// The inclusion holds one degree above the bound and every term of that
    /// degree is absorbed by a coordinate change over `f_k`.
    InclusionWithUpgrade,
    NotCertified,
}

/// Surjectivity of the degree-`t` action over `f_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpgradeStep {
    pub target_degree: u32,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub surjective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminacyReport {
    pub k: u32,
    /// `max(k, 2k - 4)`.
    pub bound: u32,
    pub certification: Certification,
    pub at_bound: InclusionCertificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above_bound: Option<InclusionCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upgrade: Option<UpgradeStep>,
    /// Smallest degree at which the inclusion holds for `f_k`.
    pub minimal_inclusion_degree: Option<u32>,
    pub notes: Vec<String>,
}

pub fn bound_for(k: u32) -> u32 {
    k.max((2 * k).saturating_sub(4))
}

/// Certifies `f_k` as `max(k, 2k-4)`-determined.
pub fn determinacy_bound(k: u32) -> Result<DeterminacyReport, crate::reduction::ReductionError> {
    if !(1..=7).contains(&k) {
        return Err(crate::reduction::ReductionError::UnsupportedPair { k, t: bound_for(k) });
    }
    let fk = harmonic::f(k);
    let bound = bound_for(k);
    let at_bound = check_inclusion(&fk, bound);
    let minimal_inclusion_degree = (1..=2 * k + 2).find(|&d| check_inclusion(&fk, d).holds);
    let mut notes = Vec::new();

    let (certification, above_bound, upgrade) = if k <= 2 {
        notes.push(match k {
            1 => "order 1: certified by the implicit function theorem".to_string(),
            _ => "order 2: certified by the Morse lemma".to_string(),
        });
        (Certification::Convention, None, None)
    } else if at_bound.holds {
        (Certification::Inclusion, None, None)
    } else {
        let above = check_inclusion(&fk, bound + 1);
        let action = action_matrix(&fk, bound + 1)?;
        let (rows, cols) = action.shape();
        let rank = action.rank();
        let step = UpgradeStep {
            target_degree: bound + 1,
            rows,
            cols,
            rank,
            surjective: rank == rows,
        };
        let cert = if above.holds && step.surjective {
            notes.push(format!(
                "inclusion fails at degree {bound} (rank {} of {}) but holds at {}; every degree-{} term is absorbed by a coordinate change over f_{k} (action rank {rank} = {rows}), so {}-determinacy upgrades to {bound}",
                at_bound.rank,
                at_bound.required_rank,
                bound + 1,
                bound + 1,
                bound + 1
            ));
            Certification::InclusionWithUpgrade
        } else {
            notes.push(format!("no certificate at degree {bound}"));
            Certification::NotCertified
        };
        (cert, Some(above), Some(step))
    };
    Ok(DeterminacyReport {
        k,
        bound,
        certification,
        at_bound,
        above_bound,
        upgrade,
        minimal_inclusion_degree,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::f;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn generators_examples() {
        assert_eq!(jacobian_generators(&f(3)), vec![p("3*x^2 - 3*y^2"), p("-6*x*y")]);
        assert_eq!(jacobian_generators(&p("x^2 - y^2")), vec![p("2*x"), p("-2*y")]);
        assert_eq!(jacobian_generators(&p("5")), vec![Poly::zero(), Poly::zero()]);
    }

    #[test]
    fn low_order_inclusions() {
        assert!(check_inclusion(&f(3), 3).holds);
        assert!(check_inclusion(&f(4), 5).holds);
        let c = check_inclusion(&f(4), 4);
        assert!(!c.holds);
        assert!(c.witness.is_some());
        assert!(c.rank <= 4);
    }

    #[test]
    fn orders_five_to_seven_first_hold_one_above_the_bound() {
        for k in 5..=7 {
            let b = bound_for(k);
            let at = check_inclusion(&f(k), b);
            assert!(!at.holds);
            assert_eq!(at.rank, b as usize);
            assert!(check_inclusion(&f(k), b + 1).holds);
        }
    }

    #[test]
    fn non_homogeneous_germ_uses_lower_degrees() {
        // x + y^2 is a submersion: m^1 ⊂ m J + m^2 holds since J contains a unit.
        assert!(check_inclusion(&p("x + y^2"), 1).holds);
        assert!(check_inclusion(&p("x + y^2"), 3).holds);
        // x^2 + y^3 at degree 2: y^2 is not reached.
        let c = check_inclusion(&p("x^2 + y^3"), 2);
        assert!(!c.holds);
        assert_eq!(c.witness, Some(Monomial::new(0, 2)));
    }

    #[test]
    fn bounds_and_certification() {
        let expect = [(1, 1), (2, 2), (3, 3), (4, 4), (5, 6), (6, 8), (7, 10)];
        for (k, b) in expect {
            let r = determinacy_bound(k).unwrap();
            assert_eq!(r.bound, b);
            let want = match k {
                1 | 2 => Certification::Convention,
                3 => Certification::Inclusion,
                _ => Certification::InclusionWithUpgrade,
            };
            assert_eq!(r.certification, want, "k = {k}");
        }
        assert_eq!(determinacy_bound(4).unwrap().upgrade.unwrap().rows, 6);
        assert_eq!(determinacy_bound(5).unwrap().minimal_inclusion_degree, Some(7));
        assert!(determinacy_bound(8).is_err());
    }
}
