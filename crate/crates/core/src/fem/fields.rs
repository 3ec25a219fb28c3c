//! Coefficient vectors of the two discrete spaces: quadratic Lagrange for
//! the order parameter and lowest-order Nedelec for the vector potential.

use num_complex::Complex64;

use crate::mesh::Mesh2D;

/// Complex coefficients over the P2 dofs: vertex nodes then edge midpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderField {
    pub coeffs: Vec<Complex64>,
}

impl OrderField {
    pub fn zeros(mesh: &Mesh2D) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); mesh.num_vertices() + mesh.num_edges()],
        }
    }

    pub fn constant(mesh: &Mesh2D, value: Complex64) -> Self {
        Self {
            coeffs: vec![value; mesh.num_vertices() + mesh.num_edges()],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// self += alpha * other.
    pub fn axpy(&mut self, alpha: f64, other: &OrderField) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += alpha * o;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Interleaved real view [Re c0, Im c0, Re c1, ...].
    pub fn to_interleaved(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.re);
            out.push(c.im);
        }
        out
    }

    pub fn from_interleaved(data: &[f64]) -> Self {
        assert!(data.len() % 2 == 0);
        Self {
            coeffs: data
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        }
    }
}

/// Real coefficients over the edge dofs (global tangential moments).
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    pub coeffs: Vec<f64>,
}

impl PotentialField {
    pub fn zeros(mesh: &Mesh2D) -> Self {
        Self {
            coeffs: vec![0.0; mesh.num_edges()],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn axpy(&mut self, alpha: f64, other: &PotentialField) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += alpha * o;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}
