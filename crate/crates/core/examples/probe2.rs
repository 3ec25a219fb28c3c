// Diagnosis driver: gradient norm at convergence, restart continuation,
// and a warm start from the reduced minimizer.

use glenn::fem::{Discretization, PotentialField};
use glenn::gl::{compute_energy, initial_value, Domain, GLState, ProblemSpec};
use glenn::mesh::generate_unit_square;
use glenn::solver::{descent_step, solve, sobolev_gradient, SolverConfig};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(32);
    let kappa = 10.0;
    let disc = Discretization::new(generate_unit_square(n).unwrap());
    let full = ProblemSpec::full_standard(Domain::UnitSquare);
    let reduced = ProblemSpec::reduced_standard(Domain::UnitSquare);

    // Plain full-model run from phi_1, A = 0.
    let f = initial_value(1, Domain::UnitSquare).unwrap();
    let u = disc.interpolate_order(move |x, y| (f.eval)(x, y));
    let state = GLState::new(u.clone(), PotentialField::zeros(disc.mesh()), kappa).unwrap();
    let report = solve(&disc, state, &full, &SolverConfig::default()).unwrap();
    println!(
        "full from phi1/A=0: E = {:.8}, iters = {}, term = {:?}",
        report.final_energy(),
        report.iterations,
        report.termination
    );

    // Gradient norm at the converged state.
    let fin = &report.final_state;
    let (delta, delta_a) = sobolev_gradient(&disc, fin, &full, 0.0).unwrap();
    let mut gu = fin.u().clone();
    gu.axpy(-1.0, &delta);
    let mut ga = fin.a().clone();
    ga.axpy(-1.0, &delta_a.unwrap());
    println!(
        "gradient norms at convergence: |g_u|_L2 = {:.3e}, |g_A|_L2 = {:.3e}",
        disc.norm_order(&gu),
        disc.norm_potential(&ga)
    );

    // Continue with fresh conjugate memory (restart).
    let mut memory = None;
    let mut state = report.final_state.clone();
    let cfg = SolverConfig::default();
    for k in 0..40 {
        let out = descent_step(&disc, &state, &full, &cfg, &mut memory).unwrap();
        if out.stagnated {
            println!("restart stagnates at step {k}");
            break;
        }
        let before = state.energy_cache().unwrap();
        if out.energy > before {
            println!("restart uptick at step {k}");
            break;
        }
        state = out.state;
        if k % 10 == 9 {
            println!("restart step {k}: E = {:.10}", out.energy);
        }
    }

    // Warm start: reduced minimizer + interpolated standard potential.
    let red_state = GLState::new(u, reduced.fixed_potential(&disc).unwrap(), kappa).unwrap();
    let red_report = solve(&disc, red_state, &reduced, &SolverConfig::default()).unwrap();
    println!(
        "reduced reference: E = {:.8} ({} iters)",
        red_report.final_energy(),
        red_report.iterations
    );
    let warm = GLState::new(
        red_report.final_state.u().clone(),
        reduced.fixed_potential(&disc).unwrap(),
        kappa,
    )
    .unwrap();
    println!(
        "warm full energy before solve: E = {:.8}",
        compute_energy(&disc, &warm, &full).unwrap()
    );
    let warm_report = solve(&disc, warm, &full, &SolverConfig::default()).unwrap();
    println!(
        "full from reduced minimizer: E = {:.8}, iters = {}, term = {:?}",
        warm_report.final_energy(),
        warm_report.iterations,
        warm_report.termination
    );
}
