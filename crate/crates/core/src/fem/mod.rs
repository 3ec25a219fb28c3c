//! Discrete spaces and linear algebra: quadratic Lagrange elements for the
//! order parameter, lowest-order Nedelec edge elements for the vector
//! potential, continuous P1 for the discrete divergence, sparse assembly of
//! the iterate-dependent forms, conjugate gradient solves, and the
//! divergence-free projection.

pub mod element;
pub mod export;
pub mod fields;
pub mod project;
pub mod quadrature;
pub mod solve;
pub mod space;
pub mod sparse;

pub use fields::{OrderField, PotentialField};
pub use quadrature::QuadratureRule;
pub use solve::{solve_spd, solve_spd_guess, solve_spd_projected, solve_spd_projected_guess, CgConfig};
pub use space::Discretization;
pub use sparse::SparseOperator;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("kappa must be positive (got {0})")]
    InvalidKappa(f64),
    #[error("vector length {got} does not match space dimension {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:.3e})")]
    CgDidNotConverge { iterations: usize, residual: f64 },
    #[error("conjugate gradient breakdown at iteration {iterations} (curvature {curvature:.3e}); operator not positive definite")]
    CgBreakdown { iterations: usize, curvature: f64 },
}

#[cfg(test)]
mod tests;
