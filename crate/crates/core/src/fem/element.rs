//! Per-element evaluation tables for the P2 Lagrange and lowest-order
//! Nedelec (Whitney edge) bases at the shared quadrature points.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::quadrature::{QuadratureRule, NQ};
use crate::mesh::Mesh2D;

/// Local P2 degrees of freedom: 3 vertex values followed by the midpoint
/// values of the local edges (v0,v1), (v1,v2), (v2,v0).
pub const P2_LOCAL_DOFS: usize = 6;
/// Local edge endpoints in traversal order.
pub const LOCAL_EDGE_VERTICES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// P2 shape function values at a barycentric point.
pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// P2 shape function gradients at a barycentric point with respect to the
/// reference coordinates (xi, eta) = (lambda1, lambda2).
fn p2_ref_grads(l: [f64; 3]) -> [[f64; 2]; 6] {
    // d lambda / d (xi, eta) for lambda = (1 - xi - eta, xi, eta).
    const DL: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut g = [[0.0; 2]; 6];
    for v in 0..3 {
        let f = 4.0 * l[v] - 1.0;
        g[v] = [f * DL[v][0], f * DL[v][1]];
    }
    for (k, (a, b)) in LOCAL_EDGE_VERTICES.into_iter().enumerate() {
        g[3 + k] = [
            4.0 * (l[a] * DL[b][0] + l[b] * DL[a][0]),
            4.0 * (l[a] * DL[b][1] + l[b] * DL[a][1]),
        ];
    }
    g
}

/// Reference-space tables of the P2 basis at the shared quadrature points.
pub struct P2Table {
    pub values: [[f64; 6]; NQ],
    pub ref_grads: [[[f64; 2]; 6]; NQ],
}

impl P2Table {
    pub fn reference() -> &'static P2Table {
        static TABLE: OnceLock<P2Table> = OnceLock::new();
        TABLE.get_or_init(|| {
            let rule = QuadratureRule::reference();
            assert_eq!(rule.len(), NQ);
            let mut values = [[0.0; 6]; NQ];
            let mut ref_grads = [[[0.0; 2]; 6]; NQ];
            for (q, &l) in rule.points.iter().enumerate() {
                values[q] = p2_values(l);
                ref_grads[q] = p2_ref_grads(l);
            }
            P2Table { values, ref_grads }
        })
    }
}

/// Geometry and basis data of one triangle, evaluated at every quadrature
/// point of the shared rule. Fixed-size storage keeps the hot assembly and
/// energy loops allocation-free.
pub struct ElementContext {
    /// Global P2 dof indices (3 vertices then 3 edge midpoints).
    pub p2_dofs: [usize; 6],
    /// Global edge dof indices.
    pub edge_dofs: [usize; 3],
    /// Jacobian determinant (2 x triangle area).
    pub det_j: f64,
    /// Physical coordinates of the quadrature points.
    pub points: [[f64; 2]; NQ],
    /// Physical P2 gradients, indexed [quad point][local dof].
    pub p2_grads: [[[f64; 2]; 6]; NQ],
    /// Whitney edge functions, indexed [quad point][local edge].
    pub whitney: [[[f64; 2]; 3]; NQ],
    /// Elementwise-constant curls of the Whitney functions.
    pub whitney_curl: [f64; 3],
    /// Barycentric gradients in physical coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementContext {
    pub fn new(mesh: &Mesh2D, t: usize) -> Self {
        let rule = QuadratureRule::reference();
        let table = P2Table::reference();
        let [a, b, c] = mesh.triangles[t];
        let p0 = mesh.vertices[a];
        let p1 = mesh.vertices[b];
        let p2 = mesh.vertices[c];

        let j = [
            [p1[0] - p0[0], p2[0] - p0[0]],
            [p1[1] - p0[1], p2[1] - p0[1]],
        ];
        let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        debug_assert!(det_j > 0.0, "triangle {t} has non-positive orientation");
        // Rows of J^{-T}: physical gradients of the reference coordinates.
        let gxi = [j[1][1] / det_j, -j[0][1] / det_j];
        let geta = [-j[1][0] / det_j, j[0][0] / det_j];
        let grad_lambda = [[-gxi[0] - geta[0], -gxi[1] - geta[1]], gxi, geta];

        let signs = [
            mesh.triangle_edges[t][0].sign as f64,
            mesh.triangle_edges[t][1].sign as f64,
            mesh.triangle_edges[t][2].sign as f64,
        ];

        let mut points = [[0.0; 2]; NQ];
        let mut p2_grads = [[[0.0; 2]; 6]; NQ];
        let mut whitney = [[[0.0; 2]; 3]; NQ];
        for (q, &l) in rule.points.iter().enumerate() {
            points[q] = [
                l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0],
                l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1],
            ];
            for d in 0..6 {
                let rg = table.ref_grads[q][d];
                p2_grads[q][d] = [
                    rg[0] * gxi[0] + rg[1] * geta[0],
                    rg[0] * gxi[1] + rg[1] * geta[1],
                ];
            }
            for (k, (va, vb)) in LOCAL_EDGE_VERTICES.into_iter().enumerate() {
                let (la, lb) = (l[va], l[vb]);
                let (ga, gb) = (grad_lambda[va], grad_lambda[vb]);
                whitney[q][k] = [
                    signs[k] * (la * gb[0] - lb * ga[0]),
                    signs[k] * (la * gb[1] - lb * ga[1]),
                ];
            }
        }

        let mut whitney_curl = [0.0; 3];
        for (k, (va, vb)) in LOCAL_EDGE_VERTICES.into_iter().enumerate() {
            let (ga, gb) = (grad_lambda[va], grad_lambda[vb]);
            whitney_curl[k] = signs[k] * 2.0 * (ga[0] * gb[1] - ga[1] * gb[0]);
        }

        let nv = mesh.num_vertices();
        let p2_dofs = [
            a,
            b,
            c,
            nv + mesh.triangle_edges[t][0].edge,
            nv + mesh.triangle_edges[t][1].edge,
            nv + mesh.triangle_edges[t][2].edge,
        ];
        let edge_dofs = [
            mesh.triangle_edges[t][0].edge,
            mesh.triangle_edges[t][1].edge,
            mesh.triangle_edges[t][2].edge,
        ];

        Self {
            p2_dofs,
            edge_dofs,
            det_j,
            points,
            p2_grads,
            whitney,
            whitney_curl,
            grad_lambda,
        }
    }

    /// Complex P2 function value at quadrature point `q`.
    pub fn eval_order(&self, coeffs: &[Complex64], q: usize) -> Complex64 {
        let vals = &P2Table::reference().values[q];
        let mut acc = Complex64::new(0.0, 0.0);
        for d in 0..6 {
            acc += coeffs[self.p2_dofs[d]] * vals[d];
        }
        acc
    }

    /// Complex P2 gradient at quadrature point `q`.
    pub fn eval_order_grad(&self, coeffs: &[Complex64], q: usize) -> [Complex64; 2] {
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for d in 0..6 {
            let c = coeffs[self.p2_dofs[d]];
            let g = self.p2_grads[q][d];
            acc[0] += c * g[0];
            acc[1] += c * g[1];
        }
        acc
    }

    /// Nedelec field value at quadrature point `q`.
    pub fn eval_potential(&self, coeffs: &[f64], q: usize) -> [f64; 2] {
        let mut acc = [0.0; 2];
        for k in 0..3 {
            let c = coeffs[self.edge_dofs[k]];
            acc[0] += c * self.whitney[q][k][0];
            acc[1] += c * self.whitney[q][k][1];
        }
        acc
    }

    /// Elementwise-constant curl of a Nedelec field.
    pub fn eval_potential_curl(&self, coeffs: &[f64]) -> f64 {
        (0..3)
            .map(|k| coeffs[self.edge_dofs[k]] * self.whitney_curl[k])
            .sum()
    }
}
