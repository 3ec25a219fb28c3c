//! The Ginzburg-Landau energy and everything derived from it: full and
//! reduced energies, Frechet-derivative residuals, the quartic line-search
//! polynomial, gauge transformations, and the analytic reference fields.

pub mod energy;
pub mod fields;
pub mod quartic;

pub use energy::{compute_energy, compute_energy_analytic, residual, DualResidual};
pub use fields::{
    gauge_transform, initial_value, standard_fixed_a, standard_h_ext, AnalyticGauge,
    AnalyticScalar, AnalyticVector, RealScalarFn,
};
pub use quartic::{line_search_quartic, minimize_quartic, Direction, Quartic};

use std::sync::Arc;

use thiserror::Error;

use crate::fem::{Discretization, FemError, OrderField, PotentialField};

#[derive(Debug, Error)]
pub enum GlError {
    #[error("kappa must be positive (got {0})")]
    InvalidKappa(f64),
    #[error("initial value index must lie in 1..=5 (got {0})")]
    InitialValueIndex(usize),
    #[error("reduced model requires a fixed vector potential")]
    MissingFixedPotential,
    #[error("line-search polynomial has no positive minimizer (c1 = {c1:.3e}); not a descent direction")]
    NoPositiveMinimizer { c1: f64 },
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// Which energy is being minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Eq-style full energy in (u, A) including the |curl A - h_ext|^2 term.
    Full,
    /// Reduced energy in u alone, with A prescribed.
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    UnitSquare,
    LShape,
}

/// Problem definition: model kind, domain, external field, and (for the
/// reduced model) the prescribed vector potential.
#[derive(Clone)]
pub struct ProblemSpec {
    pub model: Model,
    pub domain: Domain,
    pub h_ext: RealScalarFn,
    pub fixed_a: Option<AnalyticVector>,
}

impl ProblemSpec {
    pub fn full(domain: Domain, h_ext: RealScalarFn) -> Self {
        Self {
            model: Model::Full,
            domain,
            h_ext,
            fixed_a: None,
        }
    }

    /// Full model with the standard external field.
    pub fn full_standard(domain: Domain) -> Self {
        Self::full(domain, standard_h_ext())
    }

    pub fn reduced(domain: Domain, fixed_a: AnalyticVector) -> Self {
        Self {
            model: Model::Reduced,
            domain,
            h_ext: standard_h_ext(),
            fixed_a: Some(fixed_a),
        }
    }

    /// Reduced model with the standard prescribed potential.
    pub fn reduced_standard(domain: Domain) -> Self {
        Self::reduced(domain, standard_fixed_a())
    }

    /// Full model with no applied field, for tests.
    pub fn full_zero_field(domain: Domain) -> Self {
        Self::full(domain, Arc::new(|_, _| 0.0))
    }

    pub fn is_full(&self) -> bool {
        self.model == Model::Full
    }

    /// The prescribed potential interpolated into the Nedelec space; the
    /// reduced model uses this interpolant in all discrete evaluations.
    pub fn fixed_potential(&self, disc: &Discretization) -> Result<PotentialField, GlError> {
        let a = self.fixed_a.as_ref().ok_or(GlError::MissingFixedPotential)?;
        let eval = a.eval.clone();
        Ok(disc.interpolate_potential(move |x, y| eval(x, y)))
    }
}

/// One iterate of the descent method: discrete fields plus the material
/// parameter and a cached energy value.
#[derive(Clone, Debug)]
pub struct GLState {
    u: OrderField,
    a: PotentialField,
    kappa: f64,
    energy_cache: Option<f64>,
}

impl GLState {
    pub fn new(u: OrderField, a: PotentialField, kappa: f64) -> Result<Self, GlError> {
        if kappa <= 0.0 {
            return Err(GlError::InvalidKappa(kappa));
        }
        Ok(Self {
            u,
            a,
            kappa,
            energy_cache: None,
        })
    }

    pub fn u(&self) -> &OrderField {
        &self.u
    }

    pub fn a(&self) -> &PotentialField {
        &self.a
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn energy_cache(&self) -> Option<f64> {
        self.energy_cache
    }

    pub fn set_energy_cache(&mut self, energy: f64) {
        self.energy_cache = Some(energy);
    }

    /// In-place update u += tau du, A += tau dA. Any mutation invalidates
    /// the cached energy.
    pub fn step(&mut self, tau: f64, du: &OrderField, da: &PotentialField) {
        self.u.axpy(tau, du);
        self.a.axpy(tau, da);
        self.energy_cache = None;
    }

    /// Replaces the potential (used to enforce the divergence constraint).
    pub fn replace_potential(&mut self, a: PotentialField) {
        self.a = a;
        self.energy_cache = None;
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.a.is_finite()
    }
}

#[cfg(test)]
mod tests;
