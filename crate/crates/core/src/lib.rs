//! Rational matrix Nehari-Takagi solver on the unit disk.
//!
//! Given a stable minimal realization f0(z) = C (zI - A)^{-1} B and a budget
//! kappa, the crate computes the gramians, decides solvability from the
//! inertia of I - PQ, assembles the gamma-generating resolvent matrix, and
//! produces solutions f = T_A(eps) with ||f||_inf <= 1 whose Hankel operator
//! differs from that of f0 by rank at most kappa. Every structural claim is
//! re-checked numerically: Stein residuals, j-unitarity on the circle,
//! Krein-Langer factorizations, and Hankel ranks of difference sequences.

pub mod denominator;
pub mod error;
pub mod formats;
pub mod fourier;
pub mod function;
pub mod linalg;
pub mod nehari;
pub mod random;
pub mod realization;
pub mod resolvent;
pub mod schur;
pub mod stein;

pub use error::{Error, Result};
pub use function::{FnMatrix, MatrixFunction};
pub use linalg::{CMat, CVec};
pub use ndarray_linalg::c64;
pub use realization::{MinimalityReport, Realization};
pub use resolvent::{GammaGeneratingMatrix, MembershipReport, ResolventData};
pub use stein::{gramians, GramianPair, Orientation, PickData};

/// Tolerances shared across the pipeline; all overridable from the CLI.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Relative SVD cutoff for numerical ranks (minimality, pole order).
    pub rank: f64,
    /// Base width of the boundary band around eigenvalue 1 of PQ.
    pub inertia: f64,
    /// Relative cutoff for Hankel-rank decisions.
    pub hankel_rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: realization::DEFAULT_RANK_TOL,
            inertia: stein::DEFAULT_INERTIA_TOL,
            hankel_rank: 1e-6,
        }
    }
}
