// Scratch driver for timing and energy-level probes during development.

use std::time::Instant;

use glenn::fem::Discretization;
use glenn::gl::{initial_value, Domain, GLState, ProblemSpec};
use glenn::mesh::generate_unit_square;
use glenn::solver::{solve, SolverConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let kappa: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let j: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);
    let model: String = args.get(4).cloned().unwrap_or_else(|| "reduced".into());

    let t0 = Instant::now();
    let disc = Discretization::new(generate_unit_square(n).unwrap());
    println!("setup: {:?}", t0.elapsed());

    let spec = if model == "full" {
        ProblemSpec::full_standard(Domain::UnitSquare)
    } else {
        ProblemSpec::reduced_standard(Domain::UnitSquare)
    };
    let f = initial_value(j, Domain::UnitSquare).unwrap();
    let u = disc.interpolate_order(move |x, y| (f.eval)(x, y));
    let a = if model == "full" {
        glenn::fem::PotentialField::zeros(disc.mesh())
    } else {
        spec.fixed_potential(&disc).unwrap()
    };
    let state = GLState::new(u, a, kappa).unwrap();

    let config = SolverConfig::default();
    let t1 = Instant::now();
    let report = solve(&disc, state, &spec, &config).unwrap();
    let dt = t1.elapsed();
    println!(
        "n={n} kappa={kappa} phi_{j} {model}: E = {:.8}, iters = {}, converged = {:?} ({:?}), time = {dt:?} ({:.1} ms/iter), max_div = {:.2e}",
        report.final_energy(),
        report.iterations,
        report.converged,
        report.termination,
        dt.as_secs_f64() * 1000.0 / report.iterations.max(1) as f64,
        report.max_div_residual,
    );
}
