//! Quadrature on the reference triangle and the reference edge.
//!
//! Edge rules are Gauss–Legendre on `[0, 1]`. Triangle rules are collapsed
//! (Duffy) tensor products of Gauss–Legendre rules: positive weights, exact to
//! the requested total degree.

use std::sync::OnceLock;

use crate::{Error, Result};

pub const MAX_ORDER: usize = 10;

/// Points and positive weights on a reference element.
///
/// Triangle points are barycentric `(λ0, λ1, λ2)` on the triangle with
/// vertices `(0,0), (1,0), (0,1)`; weights sum to 1/2. Edge points are
/// parameters in `[0, 1]`; weights sum to 1.
#[derive(Debug, Clone)]
pub struct QuadratureRule<P> {
    pub order: usize,
    pub points: Vec<P>,
    pub weights: Vec<f64>,
}

pub type TriangleRule = QuadratureRule<[f64; 3]>;
pub type EdgeRule = QuadratureRule<f64>;

impl<P: Copy> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative at z
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn build_edge_rule(order: usize) -> EdgeRule {
    let n = (order + 2) / 2;
    let (x, w) = gauss_legendre(n);
    EdgeRule {
        order,
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&v| 0.5 * v).collect(),
    }
}

fn build_triangle_rule(order: usize) -> TriangleRule {
    // x = u, y = (1 - u) v with Jacobian (1 - u): degree order + 1 in u.
    let (xu, wu) = gauss_legendre((order + 3) / 2);
    let (xv, wv) = gauss_legendre((order + 2) / 2);
    let mut points = Vec::with_capacity(xu.len() * xv.len());
    let mut weights = Vec::with_capacity(xu.len() * xv.len());
    for (&a, &wa) in xu.iter().zip(&wu) {
        let u = 0.5 * (a + 1.0);
        for (&b, &wb) in xv.iter().zip(&wv) {
            let v = 0.5 * (b + 1.0);
            let x = u;
            let y = (1.0 - u) * v;
            points.push([1.0 - x - y, x, y]);
            weights.push(0.25 * wa * wb * (1.0 - u));
        }
    }
    TriangleRule {
        order,
        points,
        weights,
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::QuadratureOrder {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Triangle rule exact for polynomials of total degree `≤ order`.
pub fn triangle_rule(order: usize) -> Result<&'static TriangleRule> {
    static RULES: OnceLock<Vec<TriangleRule>> = OnceLock::new();
    check_order(order)?;
    Ok(&RULES.get_or_init(|| (0..=MAX_ORDER).map(build_triangle_rule).collect())[order])
}

/// Gauss–Legendre rule on `[0, 1]` exact for degree `≤ order`.
pub fn edge_rule(order: usize) -> Result<&'static EdgeRule> {
    static RULES: OnceLock<Vec<EdgeRule>> = OnceLock::new();
    check_order(order)?;
    Ok(&RULES.get_or_init(|| (0..=MAX_ORDER).map(build_edge_rule).collect())[order])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫ x^a y^b over the reference triangle.
    fn monomial_exact(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn integrate(rule: &TriangleRule, f: impl Fn(f64, f64) -> f64) -> f64 {
        rule.iter().map(|(p, w)| w * f(p[1], p[2])).sum()
    }

    #[test]
    fn measure_of_reference_triangle() {
        let r = triangle_rule(1).unwrap();
        assert!((integrate(r, |_, _| 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn x2y2_with_order_four() {
        let r = triangle_rule(4).unwrap();
        let exact = monomial_exact(2, 2);
        assert!((exact - 1.0 / 180.0).abs() < 1e-16);
        assert!((integrate(r, |x, y| x * x * y * y) - exact).abs() < 1e-15);
    }

    #[test]
    fn order_two_is_not_exact_for_cubics() {
        let r = triangle_rule(2).unwrap();
        let err = (integrate(r, |x, _| x * x * x) - monomial_exact(3, 0)).abs();
        assert!(err > 1e-6, "unexpectedly exact: {err}");
    }

    #[test]
    fn rejects_high_orders() {
        assert!(triangle_rule(11).is_err());
        assert!(edge_rule(11).is_err());
    }

    #[test]
    fn edge_rules() {
        let r1 = edge_rule(1).unwrap();
        assert_eq!(r1.points, vec![0.5]);
        assert_eq!(r1.weights, vec![1.0]);
        let r3 = edge_rule(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r3.points[0] - 0.5 * (1.0 - s)).abs() < 1e-15);
        assert!((r3.points[1] - 0.5 * (1.0 + s)).abs() < 1e-15);
        let int: f64 = r1.iter().map(|(x, w)| w * x).sum();
        assert_eq!(int, 0.5);
    }

    #[test]
    fn every_rule_is_exact_to_its_order() {
        for order in 0..=MAX_ORDER {
            let r = triangle_rule(order).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let e = edge_rule(order).unwrap();
            assert!(e.weights.iter().all(|&w| w > 0.0));
            for a in 0..=order as u32 {
                for b in 0..=(order as u32 - a) {
                    let got = integrate(r, |x, y| x.powi(a as i32) * y.powi(b as i32));
                    let exact = monomial_exact(a, b);
                    assert!(((got - exact) / exact).abs() < 1e-13, "order {order} x^{a} y^{b}");
                }
                let got: f64 = e.iter().map(|(x, w)| w * x.powi(a as i32)).sum();
                let exact = 1.0 / (a as f64 + 1.0);
                assert!(((got - exact) / exact).abs() < 1e-13);
            }
        }
    }
}
