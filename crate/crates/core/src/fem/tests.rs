//! Assembly, projection and interpolation checks against direct quadrature
//! oracles on small meshes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::element::ElementContext;
use super::fields::{OrderField, PotentialField};
use super::quadrature::{QuadratureRule, NQ};
use super::space::Discretization;
use super::{solve_spd, CgConfig};
use crate::mesh::{generate_l_shape, generate_unit_square};

fn random_order(disc: &Discretization, rng: &mut ChaCha8Rng) -> OrderField {
    OrderField {
        coeffs: (0..disc.num_p2_dofs())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    }
}

fn random_potential(disc: &Discretization, rng: &mut ChaCha8Rng) -> PotentialField {
    PotentialField {
        coeffs: (0..disc.num_edge_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
    }
}

/// Direct quadrature of the a_k integrand for a complex trial field v:
/// |i/k grad v + A v|^2 + (beta + |u|^2 + |A|^2) |v|^2.
fn a_form_oracle(
    disc: &Discretization,
    u: &OrderField,
    a: &PotentialField,
    v: &OrderField,
    kappa: f64,
    beta: f64,
) -> f64 {
    let rule = QuadratureRule::reference();
    let mut acc = 0.0;
    for t in 0..disc.mesh().num_triangles() {
        let ctx = ElementContext::new(disc.mesh(), t);
        for q in 0..NQ {
            let w = rule.weights[q] * ctx.det_j;
            let vq = ctx.eval_order(&v.coeffs, q);
            let gv = ctx.eval_order_grad(&v.coeffs, q);
            let aq = ctx.eval_potential(&a.coeffs, q);
            let uq = ctx.eval_order(&u.coeffs, q);
            let i_over_k = Complex64::new(0.0, 1.0 / kappa);
            let p0 = i_over_k * gv[0] + aq[0] * vq;
            let p1 = i_over_k * gv[1] + aq[1] * vq;
            let a2 = aq[0] * aq[0] + aq[1] * aq[1];
            acc += w
                * (p0.norm_sqr()
                    + p1.norm_sqr()
                    + (beta + uq.norm_sqr() + a2) * vq.norm_sqr());
        }
    }
    acc
}

/// Direct quadrature of the b_k integrand: |curl B|^2 + (beta + |u|^2)|B|^2.
fn b_form_oracle(
    disc: &Discretization,
    u: &OrderField,
    b: &PotentialField,
    beta: f64,
) -> f64 {
    let rule = QuadratureRule::reference();
    let mut acc = 0.0;
    for t in 0..disc.mesh().num_triangles() {
        let ctx = ElementContext::new(disc.mesh(), t);
        let curl = ctx.eval_potential_curl(&b.coeffs);
        for q in 0..NQ {
            let w = rule.weights[q] * ctx.det_j;
            let bq = ctx.eval_potential(&b.coeffs, q);
            let uq = ctx.eval_order(&u.coeffs, q);
            acc += w
                * (curl * curl + (beta + uq.norm_sqr()) * (bq[0] * bq[0] + bq[1] * bq[1]));
        }
    }
    acc
}

#[test]
fn a_k_with_zero_fields_is_scaled_laplacian() {
    let disc = Discretization::new(generate_unit_square(3).unwrap());
    let u = OrderField::zeros(disc.mesh());
    let a = PotentialField::zeros(disc.mesh());
    let kappa = 2.0;
    let op = disc.assemble_a_k(&u, &a, kappa, 0.0).unwrap();

    // Re/Im blocks decouple: all (Re, Im) cross entries vanish.
    for (i, j, v) in op.entries() {
        if (i % 2) != (j % 2) {
            assert!(v.abs() < 1e-14, "coupling entry ({i}, {j}) = {v}");
        }
    }

    // Quadratic form equals (1/kappa^2) |grad v|^2 for random v.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = random_order(&disc, &mut rng);
    let flat = v.to_interleaved();
    let got = op.bilinear(&flat, &flat);
    let want = a_form_oracle(&disc, &u, &a, &v, kappa, 0.0);
    assert!((got - want).abs() <= 1e-12 * want.abs());
}

#[test]
fn a_k_with_unit_u_adds_mass() {
    let disc = Discretization::new(generate_unit_square(3).unwrap());
    let u = OrderField::constant(disc.mesh(), Complex64::new(1.0, 0.0));
    let a = PotentialField::zeros(disc.mesh());
    let op = disc.assemble_a_k(&u, &a, 2.0, 0.0).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v = random_order(&disc, &mut rng);
    let flat = v.to_interleaved();
    let got = op.bilinear(&flat, &flat);
    let want = a_form_oracle(&disc, &u, &a, &v, 2.0, 0.0);
    assert!(
        (got - want).abs() <= 1e-12 * want.abs(),
        "got {got}, oracle {want}"
    );
}

#[test]
fn a_k_quadratic_form_matches_quadrature_oracle() {
    // Random state with a nonzero potential exercises the Re/Im coupling.
    let disc = Discretization::new(generate_l_shape(4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let u = random_order(&disc, &mut rng);
    let a = random_potential(&disc, &mut rng);
    let kappa = 3.5;
    let beta = 0.25;
    let op = disc.assemble_a_k(&u, &a, kappa, beta).unwrap();
    assert!(op.symmetry_error() < 1e-12);

    for seed in 0..3 {
        let mut vrng = ChaCha8Rng::seed_from_u64(100 + seed);
        let v = random_order(&disc, &mut vrng);
        let flat = v.to_interleaved();
        let got = op.bilinear(&flat, &flat);
        let want = a_form_oracle(&disc, &u, &a, &v, kappa, beta);
        assert!(
            (got - want).abs() <= 1e-12 * want.abs(),
            "seed {seed}: got {got}, oracle {want}"
        );
    }
}

#[test]
fn a_k_rejects_nonpositive_kappa() {
    let disc = Discretization::new(generate_unit_square(2).unwrap());
    let u = OrderField::zeros(disc.mesh());
    let a = PotentialField::zeros(disc.mesh());
    assert!(disc.assemble_a_k(&u, &a, 0.0, 0.0).is_err());
    assert!(disc.assemble_a_k(&u, &a, -1.0, 0.0).is_err());
}

#[test]
fn b_k_matches_quadrature_oracle() {
    let disc = Discretization::new(generate_unit_square(4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_order(&disc, &mut rng);
    let b = random_potential(&disc, &mut rng);
    let op = disc.assemble_b_k(&u, 1.0).unwrap();
    assert!(op.symmetry_error() < 1e-12);
    let got = op.bilinear(&b.coeffs, &b.coeffs);
    let want = b_form_oracle(&disc, &u, &b, 1.0);
    assert!((got - want).abs() <= 1e-12 * want.abs());
}

#[test]
fn b_k_on_gradient_fields_reduces_to_mass() {
    // For B = grad of a P1 function the curl term vanishes exactly, so
    // b_k(B, B) with u = 0, beta = 1 is the squared L2 norm of B.
    let disc = Discretization::new(generate_unit_square(4).unwrap());
    let u = OrderField::zeros(disc.mesh());
    let op = disc.assemble_b_k(&u, 1.0).unwrap();

    let nv = disc.mesh().num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p: Vec<f64> = (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut grad = vec![0.0; disc.num_edge_dofs()];
    disc.projector().apply_grad(&p, &mut grad);
    let b = PotentialField { coeffs: grad };

    let form = op.bilinear(&b.coeffs, &b.coeffs);
    let norm2 = disc.norm_potential(&b).powi(2);
    assert!((form - norm2).abs() <= 1e-12 * norm2);
}

#[test]
fn positive_definite_with_stabilization() {
    let disc = Discretization::new(generate_unit_square(2).unwrap());
    let u = OrderField::zeros(disc.mesh());
    let a = PotentialField::zeros(disc.mesh());
    let op_a = disc.assemble_a_k(&u, &a, 1.0, 1.0).unwrap();
    let op_b = disc.assemble_b_k(&u, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let v = random_order(&disc, &mut rng);
        let flat = v.to_interleaved();
        assert!(op_a.bilinear(&flat, &flat) > 0.0);
        let b = random_potential(&disc, &mut rng);
        assert!(op_b.bilinear(&b.coeffs, &b.coeffs) > 0.0);
    }
}

#[test]
fn mass_solve_reproduces_constant() {
    let disc = Discretization::new(generate_unit_square(3).unwrap());
    let mass = disc.p2_mass();
    let ones = vec![1.0; mass.n()];
    let mut rhs = vec![0.0; mass.n()];
    mass.matvec(&ones, &mut rhs);
    let x = solve_spd(mass, &rhs, CgConfig::default()).unwrap();
    for (k, v) in x.iter().enumerate() {
        assert!((v - 1.0).abs() < 1e-9, "dof {k}: {v}");
    }
}

#[test]
fn projection_annihilates_gradients() {
    for mesh in [generate_unit_square(4).unwrap(), generate_l_shape(4).unwrap()] {
        let disc = Discretization::new(mesh);
        let nv = disc.mesh().num_vertices();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p: Vec<f64> = (0..nv).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut grad = vec![0.0; disc.num_edge_dofs()];
        disc.projector().apply_grad(&p, &mut grad);
        let b = PotentialField { coeffs: grad };
        let norm_b = disc.norm_potential(&b);

        let projected = disc.project_div_free(&b).unwrap();
        let residual_norm = disc.norm_potential(&projected);
        assert!(
            residual_norm <= 1e-10 * norm_b,
            "pure gradient not annihilated: |P(grad p)| = {residual_norm}"
        );
    }
}

#[test]
fn projection_is_idempotent_and_satisfies_constraint() {
    for mesh in [generate_unit_square(4).unwrap(), generate_l_shape(4).unwrap()] {
        let disc = Discretization::new(mesh);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let b = random_potential(&disc, &mut rng);

        let once = disc.project_div_free(&b).unwrap();
        assert!(disc.div_residual(&once) <= 1e-10, "constraint violated");

        let twice = disc.project_div_free(&once).unwrap();
        let norm = disc.norm_potential(&once);
        let mut diff = once.clone();
        diff.axpy(-1.0, &twice);
        assert!(
            disc.norm_potential(&diff) <= 1e-10 * norm,
            "projection not idempotent"
        );
    }
}

#[test]
fn projection_orthogonal_to_every_p1_gradient() {
    // (P B, grad q) over the full P1 basis via the mixed matrix G^T M.
    let disc = Discretization::new(generate_unit_square(3).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let b = random_potential(&disc, &mut rng);
    let projected = disc.project_div_free(&b).unwrap();

    let ne = disc.num_edge_dofs();
    let nv = disc.mesh().num_vertices();
    let mut mb = vec![0.0; ne];
    disc.nedelec_mass().matvec(&projected.coeffs, &mut mb);
    let mut per_vertex = vec![0.0; nv];
    disc.projector().apply_grad_transpose(&mb, &mut per_vertex);
    let scale = disc.norm_potential(&projected);
    for (q, v) in per_vertex.iter().enumerate() {
        assert!(v.abs() <= 1e-10 * scale.max(1.0), "vertex {q}: {v}");
    }
}

#[test]
fn interpolation_of_constants() {
    let disc = Discretization::new(generate_unit_square(3).unwrap());
    let alpha = Complex64::new(0.3, -0.7);
    let u = disc.interpolate_order(|_, _| alpha);
    assert!(u.coeffs.iter().all(|&c| (c - alpha).norm() < 1e-15));

    // Constant (1, 0): each tangential moment is the x-extent of the edge.
    let a = disc.interpolate_potential(|_, _| [1.0, 0.0]);
    for e in 0..disc.num_edge_dofs() {
        let ev = disc.mesh().edge_vector(e);
        assert!((a.coeffs[e] - ev[0]).abs() < 1e-14);
    }
}

#[test]
fn p2_interpolation_reproduces_quadratics() {
    // Patch test: interpolation of a quadratic is exact, checked by
    // evaluating the finite element function at every quadrature point.
    let disc = Discretization::new(generate_l_shape(4).unwrap());
    let f = |x: f64, y: f64| {
        Complex64::new(1.0 + 2.0 * x - y + 0.5 * x * x + x * y, 3.0 * y * y - x)
    };
    let u = disc.interpolate_order(|x, y| f(x, y));
    for t in 0..disc.mesh().num_triangles() {
        let ctx = ElementContext::new(disc.mesh(), t);
        for q in 0..NQ {
            let got = ctx.eval_order(&u.coeffs, q);
            let want = f(ctx.points[q][0], ctx.points[q][1]);
            assert!((got - want).norm() <= 1e-13);
        }
    }
}

#[test]
fn nedelec_contains_p1_gradients_exactly() {
    // For an affine f, grad f is constant and the Nedelec interpolant of
    // grad f must coincide coefficientwise with G applied to the vertex
    // values of f.
    let disc = Discretization::new(generate_unit_square(3).unwrap());
    let (b, c) = (0.8, -1.3);
    let f = |x: f64, y: f64| 0.2 + b * x + c * y;
    let interp = disc.interpolate_potential(|_, _| [b, c]);

    let nv = disc.mesh().num_vertices();
    let nodal: Vec<f64> = (0..nv)
        .map(|v| {
            let p = disc.mesh().vertices[v];
            f(p[0], p[1])
        })
        .collect();
    let mut grad = vec![0.0; disc.num_edge_dofs()];
    disc.projector().apply_grad(&nodal, &mut grad);
    for e in 0..disc.num_edge_dofs() {
        assert!((interp.coeffs[e] - grad[e]).abs() <= 1e-13);
    }
}

#[test]
fn constrained_solve_satisfies_galerkin_condition() {
    // Solve b_k(x, B) = F(B) over the divergence-free subspace and verify
    // the defining property against a basis of that subspace obtained by
    // projecting the full edge basis.
    let disc = Discretization::new(generate_unit_square(2).unwrap());
    let u = OrderField::constant(disc.mesh(), Complex64::new(0.8, 0.1));
    let op = disc.assemble_b_k(&u, 0.5).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let ne = disc.num_edge_dofs();
    let rhs: Vec<f64> = (0..ne).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let project = |v: &mut [f64]| {
        disc.project_div_free_in_place(v).unwrap();
    };
    let x = super::solve_spd_projected(
        &op,
        &rhs,
        disc.nedelec_mass(),
        &project,
        CgConfig::default(),
    )
    .unwrap();

    let xf = PotentialField { coeffs: x.clone() };
    assert!(disc.div_residual(&xf) <= 1e-9, "solution leaves the subspace");

    let mut bx = vec![0.0; ne];
    op.matvec(&x, &mut bx);
    let residual: Vec<f64> = bx.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let scale: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    for e in 0..ne {
        let mut basis = vec![0.0; ne];
        basis[e] = 1.0;
        project(&mut basis);
        let dot: f64 = basis.iter().zip(&residual).map(|(a, b)| a * b).sum();
        assert!(
            dot.abs() <= 1e-9 * scale,
            "Galerkin residual against projected basis {e}: {dot}"
        );
    }
}
