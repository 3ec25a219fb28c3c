//! The line-search polynomial: along a fixed direction the energy is an
//! exact quartic in the step size, assembled coefficient by coefficient
//! through the same quadrature as the energy itself.

use num_complex::Complex64;

use super::{GLState, GlError, ProblemSpec};
use crate::fem::element::ElementContext;
use crate::fem::quadrature::{QuadratureRule, NQ};
use crate::fem::{Discretization, OrderField, PotentialField};

/// p(tau) = c0 + c1 tau + c2 tau^2 + c3 tau^3 + c4 tau^4.
#[derive(Clone, Copy, Debug, Default)]
pub struct Quartic {
    pub c: [f64; 5],
}

impl Quartic {
    pub fn eval(&self, tau: f64) -> f64 {
        self.c[0] + tau * (self.c[1] + tau * (self.c[2] + tau * (self.c[3] + tau * self.c[4])))
    }

    pub fn deriv(&self, tau: f64) -> f64 {
        self.c[1] + tau * (2.0 * self.c[2] + tau * (3.0 * self.c[3] + tau * 4.0 * self.c[4]))
    }
}

/// A search direction (du, dA) in the product space.
pub struct Direction {
    pub du: OrderField,
    pub da: PotentialField,
}

/// Gathers the exact coefficients of tau -> E(state + tau * direction).
///
/// At every quadrature point the covariant-derivative term is quadratic in
/// tau, the density is quadratic, so the integrand expands into a quartic
/// whose coefficients are accumulated directly.
pub fn line_search_quartic(
    disc: &Discretization,
    state: &GLState,
    direction: &Direction,
    spec: &ProblemSpec,
) -> Quartic {
    let rule = QuadratureRule::reference();
    let inv_k = 1.0 / state.kappa();
    let full = spec.is_full();
    let u = &state.u().coeffs;
    let a = &state.a().coeffs;
    let du = &direction.du.coeffs;
    let da = &direction.da.coeffs;

    let mut c = [0.0; 5];
    for t in 0..disc.mesh().num_triangles() {
        let ctx = ElementContext::new(disc.mesh(), t);
        let curl_a = ctx.eval_potential_curl(a);
        let curl_d = ctx.eval_potential_curl(da);
        let mut local = [0.0; 5];
        if full {
            // Curl defect against the elementwise mean field; everything in
            // this term is constant per element.
            let r0 = curl_a - super::energy::element_mean_h(&ctx, spec);
            local[0] += 0.5 * 0.5 * r0 * r0;
            local[1] += 0.5 * r0 * curl_d;
            local[2] += 0.5 * 0.5 * curl_d * curl_d;
        }
        for q in 0..NQ {
            let w = rule.weights[q];
            let uq = ctx.eval_order(u, q);
            let gu = ctx.eval_order_grad(u, q);
            let dq = ctx.eval_order(du, q);
            let gd = ctx.eval_order_grad(du, q);
            let aq = ctx.eval_potential(a, q);
            let dv = ctx.eval_potential(da, q);
            let i_over_k = Complex64::new(0.0, inv_k);

            // Covariant term: P(tau) = P0 + P1 tau + P2 tau^2 per component.
            let p0 = [i_over_k * gu[0] + aq[0] * uq, i_over_k * gu[1] + aq[1] * uq];
            let p1 = [
                i_over_k * gd[0] + aq[0] * dq + dv[0] * uq,
                i_over_k * gd[1] + aq[1] * dq + dv[1] * uq,
            ];
            let p2 = [dv[0] * dq, dv[1] * dq];

            let dot =
                |x: &[Complex64; 2], y: &[Complex64; 2]| x[0] * y[0].conj() + x[1] * y[1].conj();
            let n0 = dot(&p0, &p0).re;
            let n1 = dot(&p1, &p1).re;
            let n2 = dot(&p2, &p2).re;
            let p01 = dot(&p0, &p1).re;
            let p02 = dot(&p0, &p2).re;
            let p12 = dot(&p1, &p2).re;

            // Density: m(tau) = m0 + m1 tau + m2 tau^2, well = 1 - m.
            let m0 = uq.norm_sqr();
            let m1 = 2.0 * (uq.conj() * dq).re;
            let m2 = dq.norm_sqr();
            let s = 1.0 - m0;

            local[0] += w * (0.5 * n0 + 0.25 * s * s);
            local[1] += w * (p01 - 0.5 * s * m1);
            local[2] += w * (0.5 * n1 + p02 + 0.25 * (m1 * m1 - 2.0 * s * m2));
            local[3] += w * (p12 + 0.5 * m1 * m2);
            local[4] += w * (0.5 * n2 + 0.25 * m2 * m2);
        }
        for k in 0..5 {
            c[k] += local[k] * ctx.det_j;
        }
    }
    Quartic { c }
}

/// Smallest positive minimizer of a quartic with non-negative leading
/// coefficient: closed-form roots of the derivative cubic, with a
/// golden-section fallback when the quartic degenerates towards a cubic.
pub fn minimize_quartic(q: &Quartic) -> Result<f64, GlError> {
    let c = &q.c;
    if c[4] < 0.0 {
        // The leading term is a non-negative integral; anything below zero
        // is a usage error upstream.
        return Err(GlError::NoPositiveMinimizer { c1: c[1] });
    }
    if c[4] <= 1e-14 {
        let tau = golden_section(q, 0.0, 10.0);
        if q.eval(tau) <= c[0] && tau > 0.0 {
            return Ok(tau);
        }
        return Err(GlError::NoPositiveMinimizer { c1: c[1] });
    }

    // p'(tau) = c1 + 2 c2 tau + 3 c3 tau^2 + 4 c4 tau^3.
    let roots = cubic_roots(4.0 * c[4], 3.0 * c[3], 2.0 * c[2], c[1]);
    let mut best: Option<(f64, f64)> = None;
    for root in roots.into_iter().flatten() {
        // Newton polish for the accuracy the grid-search oracle asks for.
        let mut tau = root;
        for _ in 0..3 {
            let d = q.deriv(tau);
            let dd = 2.0 * c[2] + tau * (6.0 * c[3] + tau * 12.0 * c[4]);
            if dd.abs() > 0.0 {
                tau -= d / dd;
            }
        }
        if tau > 0.0 && tau.is_finite() {
            let val = q.eval(tau);
            if best.map_or(true, |(_, v)| val < v) {
                best = Some((tau, val));
            }
        }
    }
    match best {
        Some((tau, val)) if val <= c[0] + 1e-14 * (1.0 + c[0].abs()) => Ok(tau),
        _ => Err(GlError::NoPositiveMinimizer { c1: c[1] }),
    }
}

/// Real roots of a x^3 + b x^2 + c x + d with a != 0.
fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> [Option<f64>; 3] {
    let p = b / a;
    let q = c / a;
    let r = d / a;
    // Depressed form t^3 + pp t + qq with x = t - p/3.
    let pp = q - p * p / 3.0;
    let qq = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let shift = -p / 3.0;
    let disc = -4.0 * pp * pp * pp - 27.0 * qq * qq;
    if disc > 0.0 {
        // Three real roots (trigonometric form); pp < 0 here.
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut out = [None; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            *slot = Some(t + shift);
        }
        out
    } else {
        // One real root (Cardano).
        let half_q = qq / 2.0;
        let inner = (half_q * half_q + pp * pp * pp / 27.0).max(0.0).sqrt();
        let t = (-half_q + inner).cbrt() + (-half_q - inner).cbrt();
        [Some(t + shift), None, None]
    }
}

fn golden_section(q: &Quartic, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = q.eval(x1);
    let mut f2 = q.eval(x2);
    for _ in 0..120 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = q.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = q.eval(x2);
        }
    }
    0.5 * (lo + hi)
}
