//! Minimizers of the 2D Ginzburg-Landau free energy.
//!
//! The crate bundles three cooperating solvers:
//!
//! * [`solver`] — a finite-element nonlinear conjugate Sobolev gradient
//!   descent method on quadratic Lagrange / lowest-order Nedelec spaces,
//! * [`net`] — an unsupervised deep-Ritz network trained over a range of the
//!   material parameter kappa,
//! * [`pipeline`] — a hybrid driver that seeds the finite-element solver
//!   with network predictions, plus all file I/O and the `glenn` CLI.
//!
//! [`mesh`], [`fem`] and [`gl`] provide the discrete machinery underneath:
//! structured triangulations, sparse assembly and linear solves, and the
//! Ginzburg-Landau energy with its derivatives and line-search polynomials.

pub mod fem;
pub mod gl;
pub mod mesh;
pub mod net;
pub mod pipeline;
pub mod solver;
