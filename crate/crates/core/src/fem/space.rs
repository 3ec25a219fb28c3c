//! The discretization bundle: mesh plus cached sparsity patterns, scatter
//! tables, mass matrices and the divergence projector.
//!
//! Complex P2 degrees of freedom are stored interleaved as (Re, Im) real
//! pairs; all assembled forms act on those real vectors with the real L2
//! pairing Re (v, w).

use std::sync::OnceLock;

use num_complex::Complex64;

use super::element::ElementContext;
use super::fields::{OrderField, PotentialField};
use super::project::DivFreeProjector;
use super::quadrature::{QuadratureRule, NQ};
use super::sparse::SparseOperator;
use super::FemError;
use crate::mesh::Mesh2D;

pub struct Discretization {
    mesh: Mesh2D,
    /// Zero-valued patterns, cloned by the assembly routines.
    a_pattern: SparseOperator,
    b_pattern: SparseOperator,
    /// Flat value indices per element: [t][l*6+m][rr, ri, ir, ii].
    a_scatter: Vec<[u32; 4]>,
    /// Flat value indices per element: [t][k*3+k2].
    b_scatter: Vec<u32>,
    p2_mass: SparseOperator,
    nedelec_mass: SparseOperator,
    projector: OnceLock<DivFreeProjector>,
}

impl Discretization {
    pub fn new(mesh: Mesh2D) -> Self {
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let np2 = nv + ne;
        let nt = mesh.num_triangles();

        // P2 adjacency (complex dofs) and the interleaved real pattern.
        let mut p2_rows: Vec<Vec<u32>> = vec![Vec::new(); np2];
        let mut a_rows: Vec<Vec<u32>> = vec![Vec::new(); 2 * np2];
        let mut b_rows: Vec<Vec<u32>> = vec![Vec::new(); ne];
        for t in 0..nt {
            let dofs = p2_dofs(&mesh, t);
            for &gl in &dofs {
                for &gm in &dofs {
                    p2_rows[gl].push(gm as u32);
                    a_rows[2 * gl].push(2 * gm as u32);
                    a_rows[2 * gl].push(2 * gm as u32 + 1);
                    a_rows[2 * gl + 1].push(2 * gm as u32);
                    a_rows[2 * gl + 1].push(2 * gm as u32 + 1);
                }
            }
            for k in 0..3 {
                for k2 in 0..3 {
                    b_rows[mesh.triangle_edges[t][k].edge]
                        .push(mesh.triangle_edges[t][k2].edge as u32);
                }
            }
        }
        let a_pattern = SparseOperator::from_adjacency(a_rows);
        let b_pattern = SparseOperator::from_adjacency(b_rows);
        let p2_pattern = SparseOperator::from_adjacency(p2_rows);

        let mut a_scatter = Vec::with_capacity(nt * 36);
        let mut b_scatter = Vec::with_capacity(nt * 9);
        for t in 0..nt {
            let dofs = p2_dofs(&mesh, t);
            for &gl in &dofs {
                for &gm in &dofs {
                    a_scatter.push([
                        a_pattern.entry_index(2 * gl, 2 * gm) as u32,
                        a_pattern.entry_index(2 * gl, 2 * gm + 1) as u32,
                        a_pattern.entry_index(2 * gl + 1, 2 * gm) as u32,
                        a_pattern.entry_index(2 * gl + 1, 2 * gm + 1) as u32,
                    ]);
                }
            }
            for k in 0..3 {
                for k2 in 0..3 {
                    b_scatter.push(b_pattern.entry_index(
                        mesh.triangle_edges[t][k].edge,
                        mesh.triangle_edges[t][k2].edge,
                    ) as u32);
                }
            }
        }

        let mut disc = Self {
            mesh,
            a_pattern,
            b_pattern,
            a_scatter,
            b_scatter,
            p2_mass: p2_pattern,
            nedelec_mass: SparseOperator::from_adjacency(Vec::new()),
            projector: OnceLock::new(),
        };
        disc.nedelec_mass = {
            let mut m = disc.b_pattern.clone();
            disc.assemble_nedelec_mass_into(&mut m);
            m
        };
        disc.assemble_p2_mass_in_place();
        disc
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn num_p2_dofs(&self) -> usize {
        self.mesh.num_vertices() + self.mesh.num_edges()
    }

    pub fn num_edge_dofs(&self) -> usize {
        self.mesh.num_edges()
    }

    /// Physical coordinates of P2 dof `d` (vertex or edge midpoint).
    pub fn p2_node(&self, d: usize) -> [f64; 2] {
        let nv = self.mesh.num_vertices();
        if d < nv {
            self.mesh.vertices[d]
        } else {
            self.mesh.edge_midpoint(d - nv)
        }
    }

    pub fn p2_mass(&self) -> &SparseOperator {
        &self.p2_mass
    }

    pub fn nedelec_mass(&self) -> &SparseOperator {
        &self.nedelec_mass
    }

    pub fn projector(&self) -> &DivFreeProjector {
        self.projector
            .get_or_init(|| DivFreeProjector::new(&self.mesh))
    }

    /// Fresh zero operator with the a_k sparsity (interleaved real dofs).
    pub fn new_a_operator(&self) -> SparseOperator {
        self.a_pattern.clone()
    }

    /// Fresh zero operator with the b_k / Nedelec mass sparsity.
    pub fn new_b_operator(&self) -> SparseOperator {
        self.b_pattern.clone()
    }

    fn check_order(&self, u: &OrderField) -> Result<(), FemError> {
        if u.len() != self.num_p2_dofs() {
            return Err(FemError::SizeMismatch {
                got: u.len(),
                expected: self.num_p2_dofs(),
            });
        }
        Ok(())
    }

    fn check_potential(&self, a: &PotentialField) -> Result<(), FemError> {
        if a.len() != self.num_edge_dofs() {
            return Err(FemError::SizeMismatch {
                got: a.len(),
                expected: self.num_edge_dofs(),
            });
        }
        Ok(())
    }

    /// Assembles the iterate-dependent form on the order-parameter space,
    ///
    ///   a_k(v, w) = (i/k grad v + A v, i/k grad w + A w)
    ///             + ((beta + |u|^2 + |A|^2) v, w)
    ///
    /// over interleaved real dofs. The result is symmetric: the diagonal
    /// Re/Re and Im/Im blocks carry the gradient + zeroth-order terms and
    /// the skew Re/Im coupling carries the A . grad transport term.
    pub fn assemble_a_k(
        &self,
        u: &OrderField,
        a: &PotentialField,
        kappa: f64,
        beta: f64,
    ) -> Result<SparseOperator, FemError> {
        let mut op = self.new_a_operator();
        self.assemble_a_k_into(&mut op, u, a, kappa, beta)?;
        Ok(op)
    }

    pub fn assemble_a_k_into(
        &self,
        op: &mut SparseOperator,
        u: &OrderField,
        a: &PotentialField,
        kappa: f64,
        beta: f64,
    ) -> Result<(), FemError> {
        if kappa <= 0.0 {
            return Err(FemError::InvalidKappa(kappa));
        }
        self.check_order(u)?;
        self.check_potential(a)?;
        op.clear_values();
        let rule = QuadratureRule::reference();
        let table = super::element::P2Table::reference();
        let inv_k2 = 1.0 / (kappa * kappa);
        let inv_k = 1.0 / kappa;

        for t in 0..self.mesh.num_triangles() {
            let ctx = ElementContext::new(&self.mesh, t);
            let mut coef = [0.0; NQ];
            let mut avec = [[0.0; 2]; NQ];
            for q in 0..NQ {
                let uq = ctx.eval_order(&u.coeffs, q);
                let aq = ctx.eval_potential(&a.coeffs, q);
                let a2 = aq[0] * aq[0] + aq[1] * aq[1];
                coef[q] = beta + uq.norm_sqr() + 2.0 * a2;
                avec[q] = aq;
            }

            let mut s = [[0.0; 6]; 6];
            let mut c = [[0.0; 6]; 6];
            for q in 0..NQ {
                let w = rule.weights[q] * ctx.det_j;
                let vals = &table.values[q];
                let grads = &ctx.p2_grads[q];
                let aq = avec[q];
                // A . grad(phi_l) for the transport coupling.
                let mut adotg = [0.0; 6];
                for l in 0..6 {
                    adotg[l] = aq[0] * grads[l][0] + aq[1] * grads[l][1];
                }
                for l in 0..6 {
                    for m in l..6 {
                        let gdot = grads[l][0] * grads[m][0] + grads[l][1] * grads[m][1];
                        s[l][m] += w * (inv_k2 * gdot + coef[q] * vals[l] * vals[m]);
                    }
                    for m in (l + 1)..6 {
                        c[l][m] += w * inv_k * (adotg[l] * vals[m] - adotg[m] * vals[l]);
                    }
                }
            }
            for l in 0..6 {
                for m in 0..l {
                    s[l][m] = s[m][l];
                    c[l][m] = -c[m][l];
                }
            }

            let base = t * 36;
            for l in 0..6 {
                for m in 0..6 {
                    let idx = self.a_scatter[base + l * 6 + m];
                    op.add_at(idx[0] as usize, s[l][m]);
                    op.add_at(idx[1] as usize, c[l][m]);
                    op.add_at(idx[2] as usize, -c[l][m]);
                    op.add_at(idx[3] as usize, s[l][m]);
                }
            }
        }
        Ok(())
    }

    /// Assembles the iterate-dependent form on the potential space,
    ///
    ///   b_k(B, C) = (curl B, curl C) + ((beta + |u|^2) B, C).
    pub fn assemble_b_k(
        &self,
        u: &OrderField,
        beta: f64,
    ) -> Result<SparseOperator, FemError> {
        let mut op = self.new_b_operator();
        self.assemble_b_k_into(&mut op, u, beta)?;
        Ok(op)
    }

    pub fn assemble_b_k_into(
        &self,
        op: &mut SparseOperator,
        u: &OrderField,
        beta: f64,
    ) -> Result<(), FemError> {
        self.check_order(u)?;
        op.clear_values();
        let rule = QuadratureRule::reference();
        for t in 0..self.mesh.num_triangles() {
            let ctx = ElementContext::new(&self.mesh, t);
            let mut local = [[0.0; 3]; 3];
            for q in 0..NQ {
                let w = rule.weights[q] * ctx.det_j;
                let coef = beta + ctx.eval_order(&u.coeffs, q).norm_sqr();
                for k in 0..3 {
                    for k2 in k..3 {
                        let wdot = ctx.whitney[q][k][0] * ctx.whitney[q][k2][0]
                            + ctx.whitney[q][k][1] * ctx.whitney[q][k2][1];
                        local[k][k2] +=
                            w * (ctx.whitney_curl[k] * ctx.whitney_curl[k2] + coef * wdot);
                    }
                }
            }
            let base = t * 9;
            for k in 0..3 {
                for k2 in 0..3 {
                    let v = if k2 >= k { local[k][k2] } else { local[k2][k] };
                    op.add_at(self.b_scatter[base + k * 3 + k2] as usize, v);
                }
            }
        }
        Ok(())
    }

    fn assemble_nedelec_mass_into(&self, op: &mut SparseOperator) {
        op.clear_values();
        let rule = QuadratureRule::reference();
        for t in 0..self.mesh.num_triangles() {
            let ctx = ElementContext::new(&self.mesh, t);
            let mut local = [[0.0; 3]; 3];
            for q in 0..NQ {
                let w = rule.weights[q] * ctx.det_j;
                for k in 0..3 {
                    for k2 in k..3 {
                        local[k][k2] += w
                            * (ctx.whitney[q][k][0] * ctx.whitney[q][k2][0]
                                + ctx.whitney[q][k][1] * ctx.whitney[q][k2][1]);
                    }
                }
            }
            let base = t * 9;
            for k in 0..3 {
                for k2 in 0..3 {
                    let v = if k2 >= k { local[k][k2] } else { local[k2][k] };
                    op.add_at(self.b_scatter[base + k * 3 + k2] as usize, v);
                }
            }
        }
    }

    fn assemble_p2_mass_in_place(&mut self) {
        let rule = QuadratureRule::reference();
        let table = super::element::P2Table::reference();
        let mut mass = std::mem::replace(
            &mut self.p2_mass,
            SparseOperator::from_adjacency(Vec::new()),
        );
        mass.clear_values();
        for t in 0..self.mesh.num_triangles() {
            let ctx = ElementContext::new(&self.mesh, t);
            let mut local = [[0.0; 6]; 6];
            for q in 0..NQ {
                let w = rule.weights[q] * ctx.det_j;
                let vals = &table.values[q];
                for l in 0..6 {
                    for m in l..6 {
                        local[l][m] += w * vals[l] * vals[m];
                    }
                }
            }
            for l in 0..6 {
                for m in 0..6 {
                    let v = if m >= l { local[l][m] } else { local[m][l] };
                    mass.add(ctx.p2_dofs[l], ctx.p2_dofs[m], v);
                }
            }
        }
        self.p2_mass = mass;
    }

    /// L2 norm of an order-parameter field.
    pub fn norm_order(&self, u: &OrderField) -> f64 {
        let n = u.len();
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for (k, c) in u.coeffs.iter().enumerate() {
            re[k] = c.re;
            im[k] = c.im;
        }
        (self.p2_mass.bilinear(&re, &re) + self.p2_mass.bilinear(&im, &im))
            .max(0.0)
            .sqrt()
    }

    /// L2 norm of a potential field.
    pub fn norm_potential(&self, a: &PotentialField) -> f64 {
        self.nedelec_mass.bilinear(&a.coeffs, &a.coeffs).max(0.0).sqrt()
    }

    /// Projects onto the discretely divergence-free subspace:
    /// returns B - grad p with (grad p, grad q) = (B, grad q) for all P1 q.
    pub fn project_div_free(&self, b: &PotentialField) -> Result<PotentialField, FemError> {
        self.check_potential(b)?;
        let mut coeffs = b.coeffs.clone();
        self.projector()
            .project(&self.nedelec_mass, &mut coeffs)?;
        Ok(PotentialField { coeffs })
    }

    /// In-place variant working on a raw coefficient slice.
    pub fn project_div_free_in_place(&self, coeffs: &mut [f64]) -> Result<(), FemError> {
        self.projector().project(&self.nedelec_mass, coeffs)
    }

    /// Largest normalized violation of the discrete divergence condition:
    /// max over P1 basis functions of |(B, grad phi)| / (|B| |grad phi|).
    pub fn div_residual(&self, b: &PotentialField) -> f64 {
        self.projector()
            .div_residual(&self.nedelec_mass, &b.coeffs, self.norm_potential(b))
    }

    /// Interpolates a complex-valued function at the P2 nodes.
    pub fn interpolate_order(&self, f: impl Fn(f64, f64) -> Complex64) -> OrderField {
        let mut coeffs = Vec::with_capacity(self.num_p2_dofs());
        for d in 0..self.num_p2_dofs() {
            let x = self.p2_node(d);
            coeffs.push(f(x[0], x[1]));
        }
        OrderField { coeffs }
    }

    /// Interpolates a vector field into the Nedelec space: each edge dof is
    /// the tangential moment along the (lo -> hi oriented) edge, computed by
    /// 2-point Gauss quadrature.
    pub fn interpolate_potential(&self, f: impl Fn(f64, f64) -> [f64; 2]) -> PotentialField {
        let rule = super::quadrature::edge_gauss2();
        let mut coeffs = Vec::with_capacity(self.num_edge_dofs());
        for e in 0..self.mesh.num_edges() {
            let (lo, _hi) = self.mesh.edges[e];
            let p = self.mesh.vertices[lo];
            let tv = self.mesh.edge_vector(e);
            let mut moment = 0.0;
            for &(s, w) in &rule {
                let val = f(p[0] + s * tv[0], p[1] + s * tv[1]);
                moment += w * (val[0] * tv[0] + val[1] * tv[1]);
            }
            coeffs.push(moment);
        }
        PotentialField { coeffs }
    }
}

pub(crate) fn p2_dofs(mesh: &Mesh2D, t: usize) -> [usize; 6] {
    let nv = mesh.num_vertices();
    let [a, b, c] = mesh.triangles[t];
    [
        a,
        b,
        c,
        nv + mesh.triangle_edges[t][0].edge,
        nv + mesh.triangle_edges[t][1].edge,
        nv + mesh.triangle_edges[t][2].edge,
    ]
}
