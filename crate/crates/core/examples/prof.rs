// quick timing probe
use std::time::Instant;
use glenn::fem::{Discretization, solve_spd, CgConfig};
use glenn::gl::{initial_value, Domain, GLState, ProblemSpec, line_search_quartic, compute_energy, Direction};
use glenn::mesh::generate_unit_square;
use glenn::fem::{OrderField, PotentialField};

fn main() {
    let n = 64;
    let disc = Discretization::new(generate_unit_square(n).unwrap());
    let spec = ProblemSpec::reduced_standard(Domain::UnitSquare);
    let f = initial_value(1, Domain::UnitSquare).unwrap();
    let u = disc.interpolate_order(move |x, y| (f.eval)(x, y));
    let a = spec.fixed_potential(&disc).unwrap();
    let state = GLState::new(u, a, 10.0).unwrap();

    let t = Instant::now();
    let op = disc.assemble_a_k(state.u(), state.a(), state.kappa(), 0.0).unwrap();
    println!("assemble_a_k: {:?}", t.elapsed());

    let t = Instant::now();
    let op2 = disc.assemble_a_k(state.u(), state.a(), state.kappa(), 0.0).unwrap();
    println!("assemble_a_k again: {:?}  (nnz {})", t.elapsed(), op2.nnz());

    let rhs = vec![0.1; 2*disc.num_p2_dofs()];
    let t = Instant::now();
    let x = solve_spd(&op, &rhs, CgConfig::default()).unwrap();
    println!("solve_spd: {:?} (x0 {})", t.elapsed(), x[0]);

    let t = Instant::now();
    let e = compute_energy(&disc, &state, &spec).unwrap();
    println!("compute_energy: {:?} (E = {e})", t.elapsed());

    let dir = Direction { du: OrderField::zeros(disc.mesh()), da: PotentialField::zeros(disc.mesh()) };
    let t = Instant::now();
    let q = line_search_quartic(&disc, &state, &dir, &spec);
    println!("line_search_quartic: {:?} (c0 = {})", t.elapsed(), q.c[0]);
}
