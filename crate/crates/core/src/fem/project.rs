//! Discrete divergence-free projection.
//!
//! A Nedelec field B is discretely divergence-free when (B, grad q) = 0 for
//! every continuous P1 function q. The projector removes the gradient part:
//! it solves the (singular, consistent) Neumann problem
//! (grad p, grad q) = (B, grad q) and subtracts grad p, which lies in the
//! Nedelec space exactly because the lowest-order space contains all P1
//! gradients. One vertex dof is pinned to fix the constant.

use super::solve::{solve_spd, CgConfig};
use super::sparse::{BandedCholesky, SparseOperator};
use super::FemError;
use crate::mesh::Mesh2D;

/// Flop guard for the banded direct factorization of the Poisson matrix;
/// badly numbered meshes fall back to conjugate gradients.
const BANDED_FLOP_LIMIT: f64 = 2.0e9;

pub struct DivFreeProjector {
    edges: Vec<(u32, u32)>,
    stiffness_pinned: SparseOperator,
    /// Diagonal of the unpinned stiffness, for normalized residuals.
    orig_diag: Vec<f64>,
    banded: Option<BandedCholesky>,
    num_vertices: usize,
}

impl DivFreeProjector {
    pub fn new(mesh: &Mesh2D) -> Self {
        let nv = mesh.num_vertices();
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for tri in &mesh.triangles {
            for &a in tri {
                for &b in tri {
                    rows[a].push(b as u32);
                }
            }
        }
        let mut stiffness = SparseOperator::from_adjacency(rows);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let area = mesh.signed_area(t);
            // P1 gradients are constant; (grad l_a, grad l_b) * area is the
            // exact local stiffness.
            let g = p1_gradients(mesh, t);
            for i in 0..3 {
                for j in 0..3 {
                    stiffness.add(tri[i], tri[j], area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
                }
            }
        }
        let orig_diag = stiffness.diagonal();
        stiffness.pin_dof(0);

        let bw = stiffness.bandwidth();
        let banded = if (nv as f64) * (bw as f64) * (bw as f64) <= BANDED_FLOP_LIMIT {
            BandedCholesky::factor(&stiffness)
        } else {
            None
        };

        Self {
            edges: mesh.edges.iter().map(|&(a, b)| (a as u32, b as u32)).collect(),
            stiffness_pinned: stiffness,
            orig_diag,
            banded,
            num_vertices: nv,
        }
    }

    /// (G p)_e = p[hi] - p[lo]: Nedelec coefficients of grad p, exact.
    pub fn apply_grad(&self, p: &[f64], out: &mut [f64]) {
        for (e, &(lo, hi)) in self.edges.iter().enumerate() {
            out[e] = p[hi as usize] - p[lo as usize];
        }
    }

    /// Transpose of `apply_grad`.
    pub fn apply_grad_transpose(&self, w: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (e, &(lo, hi)) in self.edges.iter().enumerate() {
            out[hi as usize] += w[e];
            out[lo as usize] -= w[e];
        }
    }

    /// Solves the pinned Poisson system in place.
    fn poisson_solve(&self, rhs: &mut Vec<f64>) -> Result<(), FemError> {
        rhs[0] = 0.0;
        if let Some(chol) = &self.banded {
            chol.solve(rhs);
            Ok(())
        } else {
            let sol = solve_spd(&self.stiffness_pinned, rhs, CgConfig::default())?;
            *rhs = sol;
            Ok(())
        }
    }

    /// Removes the discrete-gradient part of the edge coefficient vector.
    pub fn project(&self, mass: &SparseOperator, coeffs: &mut [f64]) -> Result<(), FemError> {
        let ne = self.edges.len();
        if coeffs.len() != ne {
            return Err(FemError::SizeMismatch {
                got: coeffs.len(),
                expected: ne,
            });
        }
        let mut mb = vec![0.0; ne];
        mass.matvec(coeffs, &mut mb);
        let mut rhs = vec![0.0; self.num_vertices];
        self.apply_grad_transpose(&mb, &mut rhs);
        self.poisson_solve(&mut rhs)?;
        for (e, &(lo, hi)) in self.edges.iter().enumerate() {
            coeffs[e] -= rhs[hi as usize] - rhs[lo as usize];
        }
        Ok(())
    }

    /// max over P1 basis functions q of |(B, grad q)| / (|B| |grad q|).
    pub fn div_residual(&self, mass: &SparseOperator, coeffs: &[f64], norm_b: f64) -> f64 {
        if norm_b == 0.0 {
            return 0.0;
        }
        let ne = self.edges.len();
        let mut mb = vec![0.0; ne];
        mass.matvec(coeffs, &mut mb);
        let mut r = vec![0.0; self.num_vertices];
        self.apply_grad_transpose(&mb, &mut r);
        let mut worst = 0.0f64;
        for q in 0..self.num_vertices {
            if self.orig_diag[q] > 0.0 {
                worst = worst.max(r[q].abs() / (norm_b * self.orig_diag[q].sqrt()));
            }
        }
        worst
    }

    pub fn uses_direct_factorization(&self) -> bool {
        self.banded.is_some()
    }
}

fn p1_gradients(mesh: &Mesh2D, t: usize) -> [[f64; 2]; 3] {
    let [a, b, c] = mesh.triangles[t];
    let p0 = mesh.vertices[a];
    let p1 = mesh.vertices[b];
    let p2 = mesh.vertices[c];
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    let gxi = [(p2[1] - p0[1]) / det, -(p2[0] - p0[0]) / det];
    let geta = [-(p1[1] - p0[1]) / det, (p1[0] - p0[0]) / det];
    [[-gxi[0] - geta[0], -gxi[1] - geta[1]], gxi, geta]
}
