//! Exact classification of plane function-germs whose leading term is a
//! nonzero harmonic polynomial, under right-equivalence.
//!
//! Everything is computed over exact rationals: polynomial jets and their
//! compositions, the Laplacian calculus, the linear systems that produce
//! normalizing coordinate changes, and the rank checks behind finite
//! determinacy. See the crate README for a tour.

pub mod conformal;
pub mod determinacy;
pub mod harmonic;
pub mod jet;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod reduction;
pub mod report;
pub mod text;
pub mod verify;

pub use harmonic::HarmonicKind;
pub use jet::{compose_truncated, jet_equal, truncate_jet, DiffeoJet, GermJet};
pub use poly::{Monomial, Order, Poly};
pub use rational::Rational;
