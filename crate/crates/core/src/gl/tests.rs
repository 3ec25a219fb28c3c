//! Energy, residual and line-search checks: worked values, the
//! finite-difference gradient oracle, gauge invariance, and consistency of
//! the quartic with re-evaluated energies.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fields::samples;
use super::*;
use crate::fem::{Discretization, OrderField, PotentialField};
use crate::mesh::generate_unit_square;

fn disc(n: usize) -> Discretization {
    Discretization::new(generate_unit_square(n).unwrap())
}

fn random_state(d: &Discretization, kappa: f64, seed: u64) -> GLState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = OrderField {
        coeffs: (0..d.num_p2_dofs())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    };
    let a = PotentialField {
        coeffs: (0..d.num_edge_dofs())
            .map(|_| rng.gen_range(-0.3..0.3))
            .collect(),
    };
    GLState::new(u, a, kappa).unwrap()
}

fn random_direction(d: &Discretization, seed: u64) -> Direction {
    // Amplitudes well above 1 keep the cubic term of the energy profile
    // clear of the floating-point floor in finite-difference checks.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Direction {
        du: OrderField {
            coeffs: (0..d.num_p2_dofs())
                .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
                .collect(),
        },
        da: PotentialField {
            coeffs: (0..d.num_edge_dofs())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        },
    }
}

#[test]
fn perfect_superconductor_has_zero_energy() {
    let d = disc(4);
    let spec = ProblemSpec::full_zero_field(Domain::UnitSquare);
    let state = GLState::new(
        OrderField::constant(d.mesh(), Complex64::new(1.0, 0.0)),
        PotentialField::zeros(d.mesh()),
        10.0,
    )
    .unwrap();
    let e = compute_energy(&d, &state, &spec).unwrap();
    assert!(e.abs() < 1e-14, "E = {e}");
}

#[test]
fn normal_state_energy_is_quarter_of_area() {
    let d = disc(4);
    let spec = ProblemSpec::full_zero_field(Domain::UnitSquare);
    let state = GLState::new(
        OrderField::zeros(d.mesh()),
        PotentialField::zeros(d.mesh()),
        10.0,
    )
    .unwrap();
    let e = compute_energy(&d, &state, &spec).unwrap();
    assert!((e - 0.25).abs() < 1e-14, "E = {e}");
}

#[test]
fn normal_state_with_standard_field() {
    // E = 1/4 + 1/2 int h_ext^2 = 1/4 + pi^2. The discrete field term sees
    // the elementwise mean of h_ext, so the value approaches the analytic
    // one at second order as the mesh resolves the field.
    let spec = ProblemSpec::full_standard(Domain::UnitSquare);
    let expect = 0.25 + PI * PI;
    let energy_at = |n: usize| {
        let d = disc(n);
        let state = GLState::new(
            OrderField::zeros(d.mesh()),
            PotentialField::zeros(d.mesh()),
            10.0,
        )
        .unwrap();
        compute_energy(&d, &state, &spec).unwrap()
    };
    let e16 = energy_at(16);
    let e32 = energy_at(32);
    assert!((e32 - expect).abs() < 2e-3 * expect, "E = {e32}, expect {expect}");
    let ratio = (e16 - expect).abs() / (e32 - expect).abs();
    assert!(
        ratio > 3.0,
        "field-mean defect must shrink at second order: {} vs {}",
        e16 - expect,
        e32 - expect
    );
}

#[test]
fn analytic_energy_matches_discrete_on_exactly_interpolated_fields() {
    // u quadratic (P2-exact) and A inside the lowest-order Nedelec space
    // (constant + rotational part), so interpolation commutes with energy.
    let d = disc(3);
    let u_exact = AnalyticScalar {
        eval: Arc::new(|x, y| Complex64::new(0.3 + x * y - 0.2 * y * y, 0.5 * x * x - y)),
        grad: Arc::new(|x, y| {
            [
                Complex64::new(y, x),
                Complex64::new(x - 0.4 * y, -1.0),
            ]
        }),
    };
    let a_exact = AnalyticVector {
        eval: Arc::new(|x, y| [0.2 - 0.7 * y, -0.4 + 0.7 * x]),
        curl: Arc::new(|_, _| 1.4),
        div: Some(Arc::new(|_, _| 0.0)),
    };
    // Constant external field: its elementwise mean is itself, so the
    // discrete and analytic field terms coincide exactly.
    let spec = ProblemSpec::full(Domain::UnitSquare, Arc::new(|_, _| 0.8));

    let u_eval = u_exact.eval.clone();
    let a_eval = a_exact.eval.clone();
    let state = GLState::new(
        d.interpolate_order(move |x, y| u_eval(x, y)),
        d.interpolate_potential(move |x, y| a_eval(x, y)),
        2.0,
    )
    .unwrap();

    let e_fe = compute_energy(&d, &state, &spec).unwrap();
    let e_an = compute_energy_analytic(&u_exact, &a_exact, 2.0, &spec, d.mesh()).unwrap();
    assert!(
        (e_fe - e_an).abs() <= 1e-12 * (1.0 + e_an.abs()),
        "FE {e_fe} vs analytic {e_an}"
    );
}

#[test]
fn constant_unit_modulus_state_has_zero_reduced_energy() {
    // phi_5 is the constant alpha with |alpha| = 1; with A = 0 both the
    // covariant and the well term vanish.
    let mesh = generate_unit_square(8).unwrap();
    let u = initial_value(5, Domain::UnitSquare).unwrap();
    let spec = ProblemSpec::reduced(Domain::UnitSquare, AnalyticVector::zero());
    let e = compute_energy_analytic(&u, &AnalyticVector::zero(), 1.0, &spec, &mesh).unwrap();
    assert!(e.abs() < 1e-14, "E = {e}");
}

#[test]
fn residual_vanishes_at_critical_points() {
    let d = disc(3);
    let spec = ProblemSpec::full_zero_field(Domain::UnitSquare);

    // Normal state with no field: u = 0, A = 0.
    let state = GLState::new(
        OrderField::zeros(d.mesh()),
        PotentialField::zeros(d.mesh()),
        5.0,
    )
    .unwrap();
    let r = residual(&d, &state, &spec);
    assert!(r.u_part.iter().all(|v| v.abs() < 1e-14));
    assert!(r.a_part.unwrap().iter().all(|v| v.abs() < 1e-14));

    // Perfect superconductor: the u-residual vanishes.
    let state = GLState::new(
        OrderField::constant(d.mesh(), Complex64::new(1.0, 0.0)),
        PotentialField::zeros(d.mesh()),
        5.0,
    )
    .unwrap();
    let r = residual(&d, &state, &spec);
    assert!(r.u_part.iter().all(|v| v.abs() < 1e-13));
}

#[test]
fn residual_is_exact_gradient_of_energy() {
    // Central finite differences of the energy along random directions must
    // converge with order >= 1.9 to the assembled pairing.
    let d = disc(3);
    for (model_seed, spec) in [
        (0u64, ProblemSpec::full_standard(Domain::UnitSquare)),
        (1u64, ProblemSpec::reduced_standard(Domain::UnitSquare)),
    ] {
        for s in 0..3u64 {
            let state = random_state(&d, 7.0, 100 + model_seed * 10 + s);
            let mut dir = random_direction(&d, 200 + model_seed * 10 + s);
            if !spec.is_full() {
                // The reduced model only varies u; A is prescribed.
                dir.da = PotentialField::zeros(d.mesh());
            }
            let r = residual(&d, &state, &spec);
            let du_flat = dir.du.to_interleaved();
            let da_opt = spec.is_full().then_some(dir.da.coeffs.as_slice());
            let pairing = r.pair(&du_flat, da_opt);

            let energy_at = |eps: f64| {
                let mut probe = state.clone();
                probe.step(eps, &dir.du, &dir.da);
                compute_energy(&d, &probe, &spec).unwrap()
            };
            let mut errors = [0.0; 2];
            for (k, eps) in [1e-3, 1e-4].into_iter().enumerate() {
                let fd = (energy_at(eps) - energy_at(-eps)) / (2.0 * eps);
                errors[k] = (fd - pairing).abs();
            }
            let order = (errors[0] / errors[1]).log10();
            assert!(
                order >= 1.9,
                "model {model_seed} seed {s}: errors {errors:?}, order {order}"
            );
        }
    }
}

#[test]
fn line_search_zero_direction_is_constant() {
    let d = disc(3);
    let spec = ProblemSpec::full_standard(Domain::UnitSquare);
    let state = random_state(&d, 4.0, 5);
    let dir = Direction {
        du: OrderField::zeros(d.mesh()),
        da: PotentialField::zeros(d.mesh()),
    };
    let q = line_search_quartic(&d, &state, &dir, &spec);
    let e = compute_energy(&d, &state, &spec).unwrap();
    assert!((q.c[0] - e).abs() <= 1e-12 * (1.0 + e.abs()));
    for k in 1..5 {
        assert!(q.c[k].abs() <= 1e-12 * (1.0 + e.abs()), "c{k} = {}", q.c[k]);
    }
}

#[test]
fn line_search_matches_reevaluated_energy() {
    let d = disc(3);
    for spec in [
        ProblemSpec::full_standard(Domain::UnitSquare),
        ProblemSpec::reduced_standard(Domain::UnitSquare),
    ] {
        let state = random_state(&d, 9.0, 33);
        let mut dir = random_direction(&d, 44);
        if !spec.is_full() {
            dir.da = PotentialField::zeros(d.mesh());
        }
        let q = line_search_quartic(&d, &state, &dir, &spec);
        let e0 = compute_energy(&d, &state, &spec).unwrap();
        assert!((q.c[0] - e0).abs() <= 1e-12 * (1.0 + e0.abs()), "p(0) = E");

        for tau in [0.1, 0.7, 1.3] {
            let mut probe = state.clone();
            probe.step(tau, &dir.du, &dir.da);
            let e_tau = compute_energy(&d, &probe, &spec).unwrap();
            assert!(
                (q.eval(tau) - e_tau).abs() <= 1e-10 * (1.0 + e_tau.abs()),
                "tau = {tau}: quartic {} vs energy {e_tau}",
                q.eval(tau)
            );
        }

        // c1 equals the residual pairing: two independent assembly paths.
        let r = residual(&d, &state, &spec);
        let pairing = r.pair(
            &dir.du.to_interleaved(),
            spec.is_full().then_some(dir.da.coeffs.as_slice()),
        );
        assert!(
            (q.c[1] - pairing).abs() <= 1e-10 * (1.0 + pairing.abs()),
            "c1 {} vs residual pairing {pairing}",
            q.c[1]
        );
        assert!(q.c[4] >= 0.0);
    }
}

#[test]
fn gauge_invariance_for_bilinear_gauge() {
    // phi(x) = x1 x2 at kappa = 10 with a random smooth pair.
    let mesh = generate_unit_square(32).unwrap();
    let spec = ProblemSpec::full_standard(Domain::UnitSquare);
    let u = samples::smooth_scalar(1);
    let a = samples::smooth_vector(2);
    let phi = samples::bilinear_gauge();
    let kappa = 10.0;

    let e = compute_energy_analytic(&u, &a, kappa, &spec, &mesh).unwrap();
    let (u2, a2) = gauge_transform(&u, &a, &phi, kappa);
    let e2 = compute_energy_analytic(&u2, &a2, kappa, &spec, &mesh).unwrap();
    assert!(
        (e - e2).abs() <= 1e-9 * (1.0 + e.abs()),
        "E = {e}, transformed {e2}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The integrand is a sum of squares, so the energy can never go
    /// negative, whatever the coefficients.
    #[test]
    fn energy_is_nonnegative(seed in 0u64..1000, kappa in 0.5f64..50.0) {
        let d = disc(2);
        let spec = ProblemSpec::full_standard(Domain::UnitSquare);
        let state = random_state(&d, kappa, seed);
        let e = compute_energy(&d, &state, &spec).unwrap();
        prop_assert!(e >= 0.0);
    }

    /// p(0) always reproduces the current energy, for arbitrary directions.
    #[test]
    fn quartic_starts_at_current_energy(seed in 0u64..1000) {
        let d = disc(2);
        let spec = ProblemSpec::reduced_standard(Domain::UnitSquare);
        let state = random_state(&d, 3.0, seed);
        let dir = random_direction(&d, seed.wrapping_add(1));
        let q = line_search_quartic(&d, &state, &dir, &spec);
        let e = compute_energy(&d, &state, &spec).unwrap();
        prop_assert!((q.c[0] - e).abs() <= 1e-11 * (1.0 + e.abs()));
        prop_assert!(q.c[4] >= 0.0);
    }
}
