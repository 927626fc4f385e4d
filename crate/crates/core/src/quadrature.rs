//! Gauss quadrature on the reference triangle `{ξ ≥ 0, η ≥ 0, ξ + η ≤ 1}`.
//!
//! Rules are conical (collapsed-coordinate) products: a Gauss–Jacobi rule with
//! weight `(1 − t)` in the collapsed direction times a Gauss–Legendre rule
//! along the rays. With `n` points per direction the product integrates every
//! bivariate polynomial of total degree `2n − 1` exactly, all weights are
//! positive and every node is strictly interior.

use std::sync::OnceLock;

use crate::elements::ElementMap;
use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Returns a rule exact for all polynomials of total degree `<= degree`.
pub fn rule_for_degree(degree: usize) -> Result<&'static QuadRule> {
    static RULES: OnceLock<Vec<QuadRule>> = OnceLock::new();
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::QuadratureDegree(degree));
    }
    let rules = RULES.get_or_init(|| (1..=MAX_DEGREE).map(conical_rule).collect());
    Ok(&rules[degree - 1])
}

/// `Σ wᵢ |det J| f(F(pᵢ))` over one physical triangle.
pub fn integrate(rule: &QuadRule, map: &ElementMap, integrand: impl Fn([f64; 2]) -> f64) -> f64 {
    let scale = map.det().abs();
    rule.iter()
        .map(|(p, w)| w * integrand(map.apply(p)))
        .sum::<f64>()
        * scale
}

fn conical_rule(degree: usize) -> QuadRule {
    let n = degree / 2 + 1;
    let (jx, jw) = gauss_jacobi(n, 1.0, 0.0);
    let (lx, lw) = gauss_jacobi(n, 0.0, 0.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&xt, &wt) in jx.iter().zip(&jw) {
        let t = 0.5 * (1.0 + xt);
        for (&xs, &ws) in lx.iter().zip(&lw) {
            let s = 0.5 * (1.0 + xs);
            points.push([s * (1.0 - t), t]);
            // dξ dη = (1 − t) ds dt; the (1 − t) factor is carried by the Jacobi weight.
            weights.push(0.25 * wt * 0.5 * ws);
        }
    }
    QuadRule {
        points,
        weights,
        exactness_degree: 2 * n - 1,
    }
}

/// Jacobi polynomial `P_n^(a,b)(x)` and its derivative.
fn jacobi(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let value = |n: usize, a: f64, b: f64| -> f64 {
        if n == 0 {
            return 1.0;
        }
        let mut p0 = 1.0;
        let mut p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
        for k in 2..=n {
            let k = k as f64;
            let c = 2.0 * k + a + b;
            let a1 = 2.0 * k * (k + a + b) * (c - 2.0);
            let a2 = (c - 1.0) * (a * a - b * b);
            let a3 = (c - 2.0) * (c - 1.0) * c;
            let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
            let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let p = value(n, a, b);
    let dp = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + a + b + 1.0) * value(n - 1, a + 1.0, b + 1.0)
    };
    (p, dp)
}

/// Gauss–Jacobi nodes and weights on [-1, 1] for the weight `(1−x)^a (1+x)^b`,
/// restricted to integer `a, b ∈ {0, 1}` with `b = 0`.
fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(b == 0.0 && (a == 0.0 || a == 1.0));
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = -((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
        if let Some(&prev) = nodes.last() {
            x = 0.5 * (x + prev);
        }
        for _ in 0..100 {
            let (p, dp) = jacobi(n, a, b, x);
            let deflate: f64 = nodes.iter().map(|&r| 1.0 / (x - r)).sum();
            let delta = -p / (dp - p * deflate);
            x += delta;
            if delta.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
    }
    nodes.sort_by(f64::total_cmp);
    // 2^(a+b+1) Γ(n+a+1)Γ(n+b+1) / (Γ(n+a+b+1) n!) reduces to 2^(a+1) for b = 0.
    let scale = 2f64.powf(a + 1.0);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = jacobi(n, a, b, x);
            scale / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    (nodes, weights)
}
