//! Conjugate gradient solvers: Jacobi-preconditioned CG for symmetric
//! positive definite systems and a projected variant that restricts the
//! iteration to the discretely divergence-free subspace.

use super::sparse::SparseOperator;
use super::FemError;

#[derive(Clone, Copy, Debug)]
pub struct CgConfig {
    /// Relative residual target |A x - b| <= rel_tol |b|.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iter: 0, // 0 = choose from the system size
        }
    }
}

fn effective_max_iter(cfg: &CgConfig, n: usize) -> usize {
    if cfg.max_iter > 0 {
        cfg.max_iter
    } else {
        (4 * n).max(200)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves A x = b for symmetric positive definite A by Jacobi-preconditioned
/// conjugate gradients, starting from zero.
pub fn solve_spd(op: &SparseOperator, rhs: &[f64], cfg: CgConfig) -> Result<Vec<f64>, FemError> {
    solve_spd_guess(op, rhs, None, cfg)
}

/// Like [`solve_spd`], but optionally warm-started; the residual target is
/// still relative to |b|, so a good guess only saves iterations.
pub fn solve_spd_guess(
    op: &SparseOperator,
    rhs: &[f64],
    guess: Option<&[f64]>,
    cfg: CgConfig,
) -> Result<Vec<f64>, FemError> {
    let n = op.n();
    if rhs.len() != n {
        return Err(FemError::SizeMismatch {
            got: rhs.len(),
            expected: n,
        });
    }
    let inv_diag: Vec<f64> = op
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let rhs_norm = dot(rhs, rhs).sqrt();
    if rhs_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = cfg.rel_tol * rhs_norm;

    let mut x = match guess {
        Some(g) if g.len() == n => g.to_vec(),
        _ => vec![0.0; n],
    };
    let mut r = rhs.to_vec();
    if guess.is_some() {
        let mut ax = vec![0.0; n];
        op.matvec(&x, &mut ax);
        for i in 0..n {
            r[i] -= ax[i];
        }
        if dot(&r, &r).sqrt() <= target {
            return Ok(x);
        }
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    let max_iter = effective_max_iter(&cfg, n);
    for it in 0..max_iter {
        op.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(FemError::CgBreakdown {
                iterations: it,
                curvature: pap,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= target {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(FemError::CgDidNotConverge {
        iterations: max_iter,
        residual: dot(&r, &r).sqrt() / rhs_norm,
    })
}

/// Solves the Galerkin problem restricted to a subspace V0:
/// find x in V0 with  y^T (B x - f) = 0 for all y in V0.
///
/// `project` must apply a mass-orthogonal projection onto V0 and `mass` is
/// the matrix of that inner product. The iteration is plain CG for the
/// operator P M^{-1} B, which is self-adjoint positive definite on V0 with
/// respect to the M inner product; every iterate stays in V0.
pub fn solve_spd_projected(
    op: &SparseOperator,
    rhs: &[f64],
    mass: &SparseOperator,
    project: &dyn Fn(&mut [f64]),
    cfg: CgConfig,
) -> Result<Vec<f64>, FemError> {
    solve_spd_projected_guess(op, rhs, mass, project, None, cfg)
}

/// Warm-startable variant of [`solve_spd_projected`]; the guess is projected
/// onto the constraint subspace before use.
pub fn solve_spd_projected_guess(
    op: &SparseOperator,
    rhs: &[f64],
    mass: &SparseOperator,
    project: &dyn Fn(&mut [f64]),
    guess: Option<&[f64]>,
    cfg: CgConfig,
) -> Result<Vec<f64>, FemError> {
    let n = op.n();
    if rhs.len() != n {
        return Err(FemError::SizeMismatch {
            got: rhs.len(),
            expected: n,
        });
    }

    let mass_cfg = CgConfig {
        rel_tol: 1e-13,
        max_iter: 0,
    };
    let apply_projected = |v: &[f64]| -> Result<Vec<f64>, FemError> {
        let mut w = solve_spd(mass, v, mass_cfg)?;
        project(&mut w);
        Ok(w)
    };
    let m_dot = |a: &[f64], b: &[f64]| mass.bilinear(a, b);

    // f = P M^{-1} rhs.
    let f = apply_projected(rhs)?;
    let ff = m_dot(&f, &f);
    if ff <= 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target2 = cfg.rel_tol * cfg.rel_tol * ff;

    let mut x = match guess {
        Some(g) if g.len() == n => {
            let mut x = g.to_vec();
            project(&mut x);
            x
        }
        _ => vec![0.0; n],
    };
    let mut r = f;
    let mut bp = vec![0.0; n];
    if guess.is_some() {
        op.matvec(&x, &mut bp);
        let ax = apply_projected(&bp)?;
        for i in 0..n {
            r[i] -= ax[i];
        }
    }
    let mut rr = m_dot(&r, &r);
    if rr <= target2 {
        project(&mut x);
        return Ok(x);
    }
    let mut p = r.clone();

    let max_iter = effective_max_iter(&cfg, n);
    for it in 0..max_iter {
        op.matvec(&p, &mut bp);
        // <A p, p>_M = p^T B p for p in V0.
        let pap = dot(&p, &bp);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(FemError::CgBreakdown {
                iterations: it,
                curvature: pap,
            });
        }
        let ap = apply_projected(&bp)?;
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = m_dot(&r, &r);
        if rr_new <= target2 {
            // Guard against drift out of the subspace over many updates.
            project(&mut x);
            return Ok(x);
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(FemError::CgDidNotConverge {
        iterations: max_iter,
        residual: (rr / ff).sqrt(),
    })
}
