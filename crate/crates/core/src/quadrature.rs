//! Gauss–Legendre rules, adaptive panel integration and the product grid on
//! the unit sphere.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integration: a 10-point panel is accepted when it agrees with
/// its two halves to `rel_tol` (relative to the running total) or `abs_tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    let rule = GaussLegendre::new(10);
    let whole = rule.integrate(a, b, f);
    adaptive_step(&rule, f, a, b, whole, rel_tol, abs_tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    let refined = left + right;
    let err = (refined - whole).abs();
    if depth >= 40 || err <= abs_tol.max(rel_tol * refined.abs()) {
        return refined;
    }
    adaptive_step(rule, f, a, m, left, rel_tol, 0.5 * abs_tol, depth + 1)
        + adaptive_step(rule, f, m, b, right, rel_tol, 0.5 * abs_tol, depth + 1)
}

/// Gauss–Legendre in `cos θ` times a uniform azimuthal grid.
///
/// With `n_theta` polar nodes and `n_phi` azimuthal nodes the rule integrates
/// `Y_{l,m} conj(Y_{l',m'})` exactly whenever `l + l' ≤ 2 n_theta - 1` and
/// `|m - m'| < n_phi`. Weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let gl = GaussLegendre::new(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let dphi = 2.0 * PI / n_phi as f64;
        for (ct, w) in gl.nodes.iter().zip(&gl.weights) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = j as f64 * dphi;
                points.push([st * phi.cos(), st * phi.sin(), *ct]);
                weights.push(w * dphi);
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
