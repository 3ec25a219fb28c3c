//! Triangle quadrature exact for all the energy integrands.
//!
//! The rule is a 5x5 Gauss-Legendre product rule collapsed onto the
//! reference triangle {x, y >= 0, x + y <= 1} via the substitution
//! x = u, y = v(1-u) with Jacobian (1-u). A total degree d polynomial
//! becomes degree d+1 in u and degree d in v, so the 5-point (degree 9)
//! Gauss rule in each direction integrates total degree 8 exactly. That
//! covers |u_h|^4 with quadratic Lagrange u_h, the stiffest term around.

use std::sync::OnceLock;

/// Number of points of the shared degree-8 rule (5 x 5 product rule).
pub const NQ: usize = 25;

/// Quadrature rule on the reference triangle in barycentric coordinates.
pub struct QuadratureRule {
    /// Barycentric coordinates (lambda0, lambda1, lambda2) of each point.
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference triangle area 1/2.
    pub weights: Vec<f64>,
    /// Guaranteed polynomial exactness degree.
    pub degree: usize,
}

/// 5-point Gauss-Legendre nodes and weights on [0, 1].
fn gauss5_unit() -> [(f64, f64); 5] {
    let s70 = 70.0_f64.sqrt();
    let r1 = (5.0 - 2.0 * (10.0 / 7.0_f64).sqrt()).sqrt() / 3.0;
    let r2 = (5.0 + 2.0 * (10.0 / 7.0_f64).sqrt()).sqrt() / 3.0;
    let w0 = 128.0 / 225.0;
    let w1 = (322.0 + 13.0 * s70) / 900.0;
    let w2 = (322.0 - 13.0 * s70) / 900.0;
    // Map from [-1, 1] to [0, 1].
    [
        ((1.0 - r2) / 2.0, w2 / 2.0),
        ((1.0 - r1) / 2.0, w1 / 2.0),
        (0.5, w0 / 2.0),
        ((1.0 + r1) / 2.0, w1 / 2.0),
        ((1.0 + r2) / 2.0, w2 / 2.0),
    ]
}

impl QuadratureRule {
    pub fn degree8() -> Self {
        let gauss = gauss5_unit();
        let mut points = Vec::with_capacity(25);
        let mut weights = Vec::with_capacity(25);
        for &(u, wu) in &gauss {
            for &(v, wv) in &gauss {
                let x = u;
                let y = v * (1.0 - u);
                points.push([1.0 - x - y, x, y]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Self {
            points,
            weights,
            degree: 8,
        }
    }

    /// The shared degree-8 rule used throughout the crate.
    pub fn reference() -> &'static QuadratureRule {
        static RULE: OnceLock<QuadratureRule> = OnceLock::new();
        RULE.get_or_init(QuadratureRule::degree8)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// 2-point Gauss nodes and weights on [0, 1], used for edge moments.
pub fn edge_gauss2() -> [(f64, f64); 2] {
    let r = 1.0 / 3.0_f64.sqrt();
    [((1.0 - r) / 2.0, 0.5), ((1.0 + r) / 2.0, 0.5)]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact value of the reference-triangle integral of x^a y^b.
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |k: u32| (1..=k as u64).product::<u64>() as f64;
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn weights_sum_to_reference_area() {
        let rule = QuadratureRule::reference();
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_for_monomials_up_to_declared_degree() {
        let rule = QuadratureRule::reference();
        for a in 0..=8u32 {
            for b in 0..=(8 - a) {
                let mut acc = 0.0;
                for (p, w) in rule.points.iter().zip(&rule.weights) {
                    let x = p[1];
                    let y = p[2];
                    acc += w * x.powi(a as i32) * y.powi(b as i32);
                }
                let exact = monomial_integral(a, b);
                assert!(
                    (acc - exact).abs() < 1e-14 * (1.0 + exact.abs()),
                    "monomial x^{a} y^{b}: quadrature {acc} vs exact {exact}"
                );
            }
        }
    }

    #[test]
    fn barycentric_coordinates_are_consistent() {
        let rule = QuadratureRule::reference();
        for p in &rule.points {
            assert!((p[0] + p[1] + p[2] - 1.0).abs() < 1e-15);
            assert!(p.iter().all(|&l| l >= 0.0 && l <= 1.0));
        }
    }

    #[test]
    fn edge_rule_integrates_cubics() {
        // 2-point Gauss is exact through degree 3 on [0, 1].
        let rule = edge_gauss2();
        for k in 0..=3u32 {
            let acc: f64 = rule.iter().map(|&(t, w)| w * t.powi(k as i32)).sum();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((acc - exact).abs() < 1e-15, "t^{k}");
        }
    }
}
