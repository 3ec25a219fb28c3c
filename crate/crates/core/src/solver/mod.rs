//! Nonlinear conjugate Sobolev gradient descent for the discrete
//! Ginzburg-Landau problem.
//!
//! Each iteration solves two elliptic problems in the iterate-dependent
//! metric a_k + b_k, mixes the previous direction in with a Polak-Ribiere
//! parameter, orthogonalizes the potential direction against discrete
//! gradients, and takes the exact minimizer of the quartic energy profile
//! along the direction. The energy never increases.

use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::fem::{
    solve_spd_guess, solve_spd_projected_guess, CgConfig, Discretization, FemError, OrderField,
    PotentialField, SparseOperator,
};
use crate::gl::{
    compute_energy, line_search_quartic, minimize_quartic, Direction, GLState, GlError,
    ProblemSpec,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("initial order parameter is identically zero")]
    ZeroInitialOrderParameter,
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Gl(#[from] GlError),
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Stabilization parameter of the metric forms; zero suffices because
    /// the iterates carry enough mass, and a one-shot fallback to 1 kicks
    /// in whenever the order parameter nearly vanishes.
    pub beta: f64,
    /// Energy-increment termination threshold.
    pub tol: f64,
    pub max_iter: usize,
    /// Keep the full per-iteration history in the report.
    pub record_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: 0.0,
            tol: 1e-12,
            max_iter: 50_000,
            record_history: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Energy increment fell below the tolerance.
    ToleranceReached,
    /// The Sobolev gradient vanished to solver precision.
    GradientStagnation,
    MaxIterReached,
}

#[derive(Debug)]
pub struct SolveReport {
    pub final_state: GLState,
    /// Energy at iterate 0, 1, ...; non-increasing.
    pub energies: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub gamma_history: Vec<f64>,
    pub tau_history: Vec<f64>,
    /// Largest normalized discrete-divergence violation seen at any iterate
    /// (full model only).
    pub max_div_residual: f64,
}

impl SolveReport {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("at least the initial energy")
    }

    /// CSV dump: iteration, energy, gamma, tau. Row zero is the initial
    /// state; row k carries the parameters of the step that produced it.
    pub fn write_history_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "iteration,energy,gamma,tau")?;
        for (k, e) in self.energies.iter().enumerate() {
            if k == 0 {
                writeln!(out, "0,{e:.16e},,")?;
            } else {
                writeln!(
                    out,
                    "{k},{e:.16e},{:.16e},{:.16e}",
                    self.gamma_history[k - 1],
                    self.tau_history[k - 1]
                )?;
            }
        }
        Ok(())
    }
}

/// The two elliptic solves of one iteration plus the assembled metric.
struct GradientSystem {
    a_op: SparseOperator,
    b_op: Option<SparseOperator>,
    delta_flat: Vec<f64>,
    /// Solution of a_k(delta, v) = ((1 + beta + |A|^2) u, v).
    delta: OrderField,
    /// Solution of b_k(Delta, B) = (beta A - 1/k Re(i conj(u) grad u), B)
    /// + (h_ext, curl B) over the divergence-free subspace (full model).
    delta_a: Option<PotentialField>,
}

fn gradient_system(
    disc: &Discretization,
    state: &GLState,
    spec: &ProblemSpec,
    beta: f64,
    warm: Option<&StepMemory>,
    cg_cfg: CgConfig,
) -> Result<GradientSystem, SolverError> {
    let a_op = disc.assemble_a_k(state.u(), state.a(), state.kappa(), beta)?;
    let rhs_u = assemble_order_rhs(disc, state, beta);
    // The elliptic solutions drift slowly along the outer iteration, so the
    // previous ones are excellent initial guesses.
    let delta_flat = solve_spd_guess(
        &a_op,
        &rhs_u,
        warm.map(|m| m.delta_flat.as_slice()),
        cg_cfg,
    )?;
    let delta = OrderField::from_interleaved(&delta_flat);

    if spec.is_full() {
        let b_op = disc.assemble_b_k(state.u(), beta)?;
        let rhs_a = assemble_potential_rhs(disc, state, spec, beta);
        let project = |v: &mut [f64]| {
            disc.project_div_free_in_place(v)
                .expect("projection Poisson solve failed");
        };
        let delta_a = solve_spd_projected_guess(
            &b_op,
            &rhs_a,
            disc.nedelec_mass(),
            &project,
            warm.and_then(|m| (!m.delta_a.is_empty()).then_some(m.delta_a.as_slice())),
            cg_cfg,
        )?;
        Ok(GradientSystem {
            a_op,
            b_op: Some(b_op),
            delta_flat,
            delta,
            delta_a: Some(PotentialField { coeffs: delta_a }),
        })
    } else {
        Ok(GradientSystem {
            a_op,
            b_op: None,
            delta_flat,
            delta,
            delta_a: None,
        })
    }
}

/// Load vector ((1 + beta + |A|^2) u, v) over interleaved real P2 dofs.
fn assemble_order_rhs(disc: &Discretization, state: &GLState, beta: f64) -> Vec<f64> {
    use crate::fem::element::{ElementContext, P2Table};
    use crate::fem::quadrature::{QuadratureRule, NQ};

    let rule = QuadratureRule::reference();
    let table = P2Table::reference();
    let u = &state.u().coeffs;
    let a = &state.a().coeffs;
    let mut rhs = vec![0.0; 2 * disc.num_p2_dofs()];
    for t in 0..disc.mesh().num_triangles() {
        let ctx = ElementContext::new(disc.mesh(), t);
        let mut local = [[0.0; 2]; 6];
        for q in 0..NQ {
            let w = rule.weights[q] * ctx.det_j;
            let uq = ctx.eval_order(u, q);
            let aq = ctx.eval_potential(a, q);
            let coef = 1.0 + beta + aq[0] * aq[0] + aq[1] * aq[1];
            let vals = &table.values[q];
            for l in 0..6 {
                local[l][0] += w * coef * uq.re * vals[l];
                local[l][1] += w * coef * uq.im * vals[l];
            }
        }
        for l in 0..6 {
            rhs[2 * ctx.p2_dofs[l]] += local[l][0];
            rhs[2 * ctx.p2_dofs[l] + 1] += local[l][1];
        }
    }
    rhs
}

/// Load vector (beta A + 1/k Im(conj(u) grad u), B) + (h_ext, curl B) over
/// the Nedelec edge basis.
fn assemble_potential_rhs(
    disc: &Discretization,
    state: &GLState,
    spec: &ProblemSpec,
    beta: f64,
) -> Vec<f64> {
    use crate::fem::element::ElementContext;
    use crate::fem::quadrature::{QuadratureRule, NQ};

    let rule = QuadratureRule::reference();
    let inv_k = 1.0 / state.kappa();
    let u = &state.u().coeffs;
    let a = &state.a().coeffs;
    let mut rhs = vec![0.0; disc.num_edge_dofs()];
    for t in 0..disc.mesh().num_triangles() {
        let ctx = ElementContext::new(disc.mesh(), t);
        let h_mean = crate::gl::energy::element_mean_h(&ctx, spec);
        let mut local = [0.0; 3];
        for q in 0..NQ {
            let w = rule.weights[q] * ctx.det_j;
            let uq = ctx.eval_order(u, q);
            let gu = ctx.eval_order_grad(u, q);
            let aq = ctx.eval_potential(a, q);
            // beta A - 1/k Re(i conj(u) grad u); that real part equals
            // + 1/k Im(conj(u) grad u).
            let f = [
                beta * aq[0] + inv_k * (uq.conj() * gu[0]).im,
                beta * aq[1] + inv_k * (uq.conj() * gu[1]).im,
            ];
            for k in 0..3 {
                let wk = ctx.whitney[q][k];
                local[k] += w * (f[0] * wk[0] + f[1] * wk[1] + h_mean * ctx.whitney_curl[k]);
            }
        }
        for k in 0..3 {
            rhs[ctx.edge_dofs[k]] += local[k];
        }
    }
    rhs
}

/// Solves the two Sobolev-gradient subproblems at the current iterate and
/// returns (delta, Delta); the Sobolev gradient is (u, A) - (delta, Delta).
/// The reduced model skips the potential solve.
pub fn sobolev_gradient(
    disc: &Discretization,
    state: &GLState,
    spec: &ProblemSpec,
    beta: f64,
) -> Result<(OrderField, Option<PotentialField>), SolverError> {
    let sys = gradient_system(disc, state, spec, beta, None, CgConfig::default())?;
    Ok((sys.delta, sys.delta_a))
}

/// Memory carried between iterations: the previous Sobolev gradient, its
/// squared norm in the previous metric, and the previous direction.
pub struct StepMemory {
    grad_u_flat: Vec<f64>,
    grad_a: Vec<f64>,
    metric_norm2: f64,
    dir: Direction,
    delta_flat: Vec<f64>,
    delta_a: Vec<f64>,
    /// Relative tolerance for the inner elliptic solves, tightened as the
    /// outer energy converges. A loose direction is still a descent
    /// direction, and the quartic line search works on the exact energy.
    inner_rel_tol: f64,
}

/// Outcome of a single descent step.
pub struct StepOutcome {
    pub gamma: f64,
    pub tau: f64,
    /// Energy of the proposed next iterate.
    pub energy: f64,
    /// Slope of the line-search polynomial at zero.
    pub slope: f64,
    /// Proposed next iterate.
    pub state: GLState,
    /// The gradient became numerically zero: no descent possible.
    pub stagnated: bool,
}

/// One iteration of the descent: gradient solves, Polak-Ribiere update,
/// divergence orthogonalization, quartic step size. Does not commit the new
/// state; the caller enforces monotonicity and termination.
pub fn descent_step(
    disc: &Discretization,
    state: &GLState,
    spec: &ProblemSpec,
    config: &SolverConfig,
    memory: &mut Option<StepMemory>,
) -> Result<StepOutcome, SolverError> {
    // Coercivity fallback: if u is numerically zero everywhere the mass
    // terms cannot stabilize the forms, so use beta = 1 for this solve.
    let beta = if config.beta == 0.0 && disc.norm_order(state.u()) < 1e-8 {
        1.0
    } else {
        config.beta
    };

    let inner_cfg = CgConfig {
        rel_tol: memory.as_ref().map_or(1e-8, |m| m.inner_rel_tol),
        max_iter: 0,
    };
    let sys = gradient_system(disc, state, spec, beta, memory.as_ref(), inner_cfg)?;
    let full = spec.is_full();

    // Sobolev gradient g = (u - delta, A - Delta), stored interleaved.
    let mut grad_u_flat = state.u().to_interleaved();
    for (g, d) in grad_u_flat.iter_mut().zip(&sys.delta_flat) {
        *g -= d;
    }
    let grad_a: Vec<f64> = if let Some(da) = &sys.delta_a {
        state
            .a()
            .coeffs
            .iter()
            .zip(&da.coeffs)
            .map(|(a, d)| a - d)
            .collect()
    } else {
        Vec::new()
    };

    // Metric inner products in the current X^k.
    let metric = |xu: &[f64], yu: &[f64], xa: &[f64], ya: &[f64]| -> f64 {
        let mut m = sys.a_op.bilinear(xu, yu);
        if let Some(b_op) = &sys.b_op {
            if !xa.is_empty() && !ya.is_empty() {
                m += b_op.bilinear(xa, ya);
            }
        }
        m
    };
    let gg = metric(&grad_u_flat, &grad_u_flat, &grad_a, &grad_a);

    let gamma = match memory.as_ref() {
        Some(prev) if prev.metric_norm2 > 0.0 => {
            let cross = metric(&grad_u_flat, &prev.grad_u_flat, &grad_a, &prev.grad_a);
            ((gg - cross) / prev.metric_norm2).max(0.0)
        }
        _ => 0.0,
    };

    let build_direction =
        |gamma: f64, memory: &Option<StepMemory>| -> Result<Direction, SolverError> {
            let mut du = sys.delta.clone();
            du.axpy(-1.0, state.u());
            let mut da = if let Some(d) = &sys.delta_a {
                let mut da = d.clone();
                da.axpy(-1.0, state.a());
                da
            } else {
                PotentialField::zeros(disc.mesh())
            };
            if gamma > 0.0 {
                if let Some(prev) = memory {
                    du.axpy(gamma, &prev.dir.du);
                    da.axpy(gamma, &prev.dir.da);
                }
            }
            if full {
                disc.project_div_free_in_place(&mut da.coeffs)?;
            }
            Ok(Direction { du, da })
        };

    let mut used_gamma = gamma;
    let mut dir = build_direction(gamma, memory)?;
    let mut quartic = line_search_quartic(disc, state, &dir, spec);
    if quartic.c[1] >= 0.0 && used_gamma > 0.0 {
        // Conjugate direction failed to descend: restart with steepest
        // descent before giving up.
        used_gamma = 0.0;
        dir = build_direction(0.0, memory)?;
        quartic = line_search_quartic(disc, state, &dir, spec);
    }
    if quartic.c[1] >= 0.0 {
        // With d = -gradient the slope is -|g|^2 in the X metric; a
        // non-negative slope means the gradient is zero to solver precision.
        let energy = match state.energy_cache() {
            Some(e) => e,
            None => compute_energy(disc, state, spec)?,
        };
        return Ok(StepOutcome {
            gamma: used_gamma,
            tau: 0.0,
            energy,
            slope: quartic.c[1],
            state: state.clone(),
            stagnated: true,
        });
    }

    let tau = minimize_quartic(&quartic)?;
    let mut next = state.clone();
    next.step(tau, &dir.du, &dir.da);
    if full && disc.div_residual(next.a()) > 1e-10 {
        let cleaned = disc.project_div_free(next.a())?;
        next.replace_potential(cleaned);
    }
    let energy = compute_energy(disc, &next, spec)?;
    next.set_energy_cache(energy);

    *memory = Some(StepMemory {
        grad_u_flat,
        grad_a,
        metric_norm2: gg,
        dir,
        delta_flat: sys.delta_flat,
        delta_a: sys.delta_a.map(|d| d.coeffs).unwrap_or_default(),
        inner_rel_tol: inner_cfg.rel_tol,
    });

    Ok(StepOutcome {
        gamma: used_gamma,
        tau,
        energy,
        slope: quartic.c[1],
        state: next,
        stagnated: false,
    })
}

/// Runs the descent from `initial` until the energy increment falls below
/// `config.tol` or `config.max_iter` is reached.
pub fn solve(
    disc: &Discretization,
    initial: GLState,
    spec: &ProblemSpec,
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    let mut state = initial;
    if disc.norm_order(state.u()) < 1e-14 {
        return Err(SolverError::ZeroInitialOrderParameter);
    }
    let mut max_div = 0.0f64;
    if spec.is_full() {
        // The iteration preserves feasibility, so only the start may need
        // an explicit projection.
        if disc.div_residual(state.a()) > 1e-10 {
            let projected = disc.project_div_free(state.a())?;
            state.replace_potential(projected);
        }
        max_div = max_div.max(disc.div_residual(state.a()));
    }

    let mut energy = compute_energy(disc, &state, spec)?;
    state.set_energy_cache(energy);
    let mut energies = vec![energy];
    let mut gammas = Vec::new();
    let mut taus = Vec::new();
    let mut memory: Option<StepMemory> = None;

    let mut iterations = 0;
    let mut converged = false;
    let mut termination = Termination::MaxIterReached;

    while iterations < config.max_iter {
        let outcome = descent_step(disc, &state, spec, config, &mut memory)?;
        if outcome.stagnated {
            converged = true;
            termination = Termination::GradientStagnation;
            break;
        }
        if outcome.energy > energy {
            // The quartic guarantees descent; an uptick is pure roundoff at
            // the resolution limit. Keep the old iterate and stop.
            converged = true;
            termination = Termination::ToleranceReached;
            break;
        }
        let decrement = energy - outcome.energy;
        state = outcome.state;
        energy = outcome.energy;
        iterations += 1;
        if let Some(mem) = memory.as_mut() {
            let rel = decrement / (1.0 + energy.abs());
            mem.inner_rel_tol = (0.01 * rel).clamp(1e-12, 1e-6);
        }
        if spec.is_full() {
            max_div = max_div.max(disc.div_residual(state.a()));
        }
        if config.record_history {
            energies.push(energy);
            gammas.push(outcome.gamma);
            taus.push(outcome.tau);
        }
        if decrement < config.tol {
            converged = true;
            termination = Termination::ToleranceReached;
            break;
        }
    }

    if !config.record_history {
        energies.push(energy);
    }

    Ok(SolveReport {
        final_state: state,
        energies,
        iterations,
        converged,
        termination,
        gamma_history: gammas,
        tau_history: taus,
        max_div_residual: max_div,
    })
}
