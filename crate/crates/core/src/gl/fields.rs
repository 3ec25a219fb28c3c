//! Analytic reference fields: the external magnetic field, the prescribed
//! vector potential of the reduced model, the five heuristic initial values,
//! and the gauge transformation at the analytic level.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Domain, GlError};

pub type RealScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
type ComplexGradFn = Arc<dyn Fn(f64, f64) -> [Complex64; 2] + Send + Sync>;
type VectorFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Complex scalar field with an analytic gradient.
#[derive(Clone)]
pub struct AnalyticScalar {
    pub eval: ComplexFn,
    pub grad: ComplexGradFn,
}

impl AnalyticScalar {
    pub fn constant(value: Complex64) -> Self {
        Self {
            eval: Arc::new(move |_, _| value),
            grad: Arc::new(|_, _| [Complex64::new(0.0, 0.0); 2]),
        }
    }
}

/// Real vector field with an analytic curl (and optionally divergence).
#[derive(Clone)]
pub struct AnalyticVector {
    pub eval: VectorFn,
    pub curl: RealScalarFn,
    pub div: Option<RealScalarFn>,
}

impl AnalyticVector {
    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_, _| [0.0, 0.0]),
            curl: Arc::new(|_, _| 0.0),
            div: Some(Arc::new(|_, _| 0.0)),
        }
    }
}

/// Real scalar gauge function with an analytic gradient.
#[derive(Clone)]
pub struct AnalyticGauge {
    pub eval: RealScalarFn,
    pub grad: VectorFn,
}

/// h_ext(x) = 2 sqrt(2) pi sin(pi x1) sin(pi x2).
pub fn standard_h_ext() -> RealScalarFn {
    Arc::new(|x, y| 2.0 * 2.0_f64.sqrt() * PI * (PI * x).sin() * (PI * y).sin())
}

/// A(x) = sqrt(2) (sin(pi x1) cos(pi x2), -cos(pi x1) sin(pi x2)).
/// Satisfies div A = 0 and curl A = h_ext.
pub fn standard_fixed_a() -> AnalyticVector {
    let s = 2.0_f64.sqrt();
    AnalyticVector {
        eval: Arc::new(move |x, y| {
            [
                s * (PI * x).sin() * (PI * y).cos(),
                -s * (PI * x).cos() * (PI * y).sin(),
            ]
        }),
        curl: Arc::new(move |x, y| {
            // d_x A2 - d_y A1 = 2 sqrt(2) pi sin sin.
            s * PI * (PI * x).sin() * (PI * y).sin() + s * PI * (PI * x).sin() * (PI * y).sin()
        }),
        div: Some(Arc::new(move |x, y| {
            // d_x A1 - ... the two partials cancel identically.
            s * PI * (PI * x).cos() * (PI * y).cos() - s * PI * (PI * x).cos() * (PI * y).cos()
        })),
    }
}

/// alpha = (1 + i)/sqrt(2), the unit-modulus constant of the heuristic
/// initial values.
pub fn alpha() -> Complex64 {
    Complex64::new(1.0, 1.0) / 2.0_f64.sqrt()
}

/// The j-th heuristic initial value phi_j = psi_j composed with the map
/// chi(x) = (2 x1 - 1, 2 x2 - 1) from the unit square onto (-1, 1)^2.
/// On the L-shape the same formula is simply restricted.
pub fn initial_value(j: usize, _domain: Domain) -> Result<AnalyticScalar, GlError> {
    if !(1..=5).contains(&j) {
        return Err(GlError::InitialValueIndex(j));
    }
    let a = alpha();
    let psi: (ComplexFn, ComplexGradFn) = match j {
        1 => (
            Arc::new(move |x: f64, y: f64| a * (-(x * x + y * y)).exp()),
            Arc::new(move |x: f64, y: f64| {
                let e = (-(x * x + y * y)).exp();
                [a * (-2.0 * x) * e, a * (-2.0 * y) * e]
            }),
        ),
        2 => {
            let c = 1.0 / PI.sqrt();
            let base = move |x: f64, y: f64| {
                Complex64::new(2.0 / 3.0 * x + 0.5, 2.0 / 3.0 * y)
            };
            (
                Arc::new(move |x: f64, y: f64| c * base(x, y) * (-(x * x + y * y)).exp()),
                Arc::new(move |x: f64, y: f64| {
                    let e = (-(x * x + y * y)).exp();
                    let b = base(x, y);
                    [
                        c * e * (Complex64::new(2.0 / 3.0, 0.0) - 2.0 * x * b),
                        c * e * (Complex64::new(0.0, 2.0 / 3.0) - 2.0 * y * b),
                    ]
                }),
            )
        }
        3 => (
            Arc::new(move |x: f64, y: f64| {
                a * Complex64::new(0.0, 10.0 * (x * x + y * y)).exp()
            }),
            Arc::new(move |x: f64, y: f64| {
                let e = Complex64::new(0.0, 10.0 * (x * x + y * y)).exp();
                let i20 = Complex64::new(0.0, 20.0);
                [a * i20 * x * e, a * i20 * y * e]
            }),
        ),
        4 => (
            Arc::new(move |x: f64, y: f64| {
                a * Complex64::new(x, y) * Complex64::new(0.0, 10.0 * (x * x + y * y)).exp()
            }),
            Arc::new(move |x: f64, y: f64| {
                let e = Complex64::new(0.0, 10.0 * (x * x + y * y)).exp();
                let z = Complex64::new(x, y);
                let i20 = Complex64::new(0.0, 20.0);
                [
                    a * e * (Complex64::new(1.0, 0.0) + i20 * x * z),
                    a * e * (Complex64::new(0.0, 1.0) + i20 * y * z),
                ]
            }),
        ),
        _ => (
            Arc::new(move |_, _| a),
            Arc::new(|_, _| [Complex64::new(0.0, 0.0); 2]),
        ),
    };
    let (eval, grad) = psi;
    Ok(AnalyticScalar {
        eval: Arc::new(move |x, y| eval(2.0 * x - 1.0, 2.0 * y - 1.0)),
        grad: Arc::new(move |x, y| {
            let g = grad(2.0 * x - 1.0, 2.0 * y - 1.0);
            [2.0 * g[0], 2.0 * g[1]]
        }),
    })
}

/// Random smooth trigonometric fields with closed-form derivatives, used by
/// the gauge-invariance and gradient-consistency checks.
pub mod samples {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn smooth_scalar(seed: u64) -> AnalyticScalar {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms: Vec<(Complex64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                )
            })
            .collect();
        let t2 = terms.clone();
        AnalyticScalar {
            eval: Arc::new(move |x, y| {
                terms
                    .iter()
                    .map(|&(c, a, b)| c * Complex64::new(0.0, a * x + b * y).exp())
                    .sum()
            }),
            grad: Arc::new(move |x, y| {
                let mut g = [Complex64::new(0.0, 0.0); 2];
                for &(c, a, b) in &t2 {
                    let e = c * Complex64::new(0.0, a * x + b * y).exp();
                    g[0] += Complex64::new(0.0, a) * e;
                    g[1] += Complex64::new(0.0, b) * e;
                }
                g
            }),
        }
    }

    pub fn smooth_vector(seed: u64) -> AnalyticVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(101));
        let (m1, p1, q1) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let (m2, p2, q2) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        AnalyticVector {
            eval: Arc::new(move |x, y| {
                [m1 * (p1 * x + q1 * y).sin(), m2 * (p2 * x + q2 * y).cos()]
            }),
            curl: Arc::new(move |x, y| {
                -m2 * p2 * (p2 * x + q2 * y).sin() - m1 * q1 * (p1 * x + q1 * y).cos()
            }),
            div: Some(Arc::new(move |x, y| {
                m1 * p1 * (p1 * x + q1 * y).cos() - m2 * q2 * (p2 * x + q2 * y).sin()
            })),
        }
    }

    pub fn smooth_gauge(seed: u64) -> AnalyticGauge {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7919));
        let (m, p, q) = (
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        AnalyticGauge {
            eval: Arc::new(move |x, y| m * (p * x + q * y).sin()),
            grad: Arc::new(move |x, y| {
                [m * p * (p * x + q * y).cos(), m * q * (p * x + q * y).cos()]
            }),
        }
    }

    /// The bilinear gauge of the worked example: phi = x1 x2.
    pub fn bilinear_gauge() -> AnalyticGauge {
        AnalyticGauge {
            eval: Arc::new(|x, y| x * y),
            grad: Arc::new(|x, y| [y, x]),
        }
    }
}

/// Gauge transformation G_phi(u, A) = (e^{i kappa phi} u, A + grad phi).
/// Leaves |u| and curl A pointwise unchanged.
pub fn gauge_transform(
    u: &AnalyticScalar,
    a: &AnalyticVector,
    phi: &AnalyticGauge,
    kappa: f64,
) -> (AnalyticScalar, AnalyticVector) {
    let (ue, ug) = (u.eval.clone(), u.grad.clone());
    let (pe, pg) = (phi.eval.clone(), phi.grad.clone());
    let u_new = AnalyticScalar {
        eval: {
            let (ue, pe) = (ue.clone(), pe.clone());
            Arc::new(move |x, y| {
                let phase = Complex64::new(0.0, kappa * pe(x, y)).exp();
                phase * ue(x, y)
            })
        },
        grad: Arc::new(move |x, y| {
            let phase = Complex64::new(0.0, kappa * pe(x, y)).exp();
            let gu = ug(x, y);
            let gp = pg(x, y);
            let uval = ue(x, y);
            let ik = Complex64::new(0.0, kappa);
            [
                phase * (gu[0] + ik * gp[0] * uval),
                phase * (gu[1] + ik * gp[1] * uval),
            ]
        }),
    };
    let (ae, ac) = (a.eval.clone(), a.curl.clone());
    let pg2 = phi.grad.clone();
    let a_new = AnalyticVector {
        eval: Arc::new(move |x, y| {
            let av = ae(x, y);
            let gp = pg2(x, y);
            [av[0] + gp[0], av[1] + gp[1]]
        }),
        // curl(grad phi) = 0, so the curl is untouched.
        curl: ac,
        div: None,
    };
    (u_new, a_new)
}
