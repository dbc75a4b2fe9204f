//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use scatter3d::pdo::BandSymbol;

/// `r3(n)` by a plain triple loop over the cube.
pub fn brute_r3(n: u64) -> u64 {
    let s = (n as f64).sqrt() as i64 + 1;
    let mut c = 0;
    for x in -s..=s {
        for y in -s..=s {
            for z in -s..=s {
                if (x * x + y * y + z * z) as u64 == n {
                    c += 1;
                }
            }
        }
    }
    c
}

/// `#{ξ : |ξ|² ≤ x}` column by column.
pub fn ball_count(x: u64) -> u64 {
    let s = (x as f64).sqrt() as i64 + 1;
    let mut c = 0u64;
    for a in -s..=s {
        for b in -s..=s {
            let r = x as i64 - a * a - b * b;
            if r < 0 {
                continue;
            }
            let mut t = (r as f64).sqrt() as i64;
            while t * t > r {
                t -= 1;
            }
            while (t + 1) * (t + 1) <= r {
                t += 1;
            }
            c += 2 * t as u64 + 1;
        }
    }
    c
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binom(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `Y_{l,m}(θ, φ)` from the explicit Legendre polynomial sum, with the
/// Condon–Shortley phase.
pub fn ylm_explicit(l: u32, m: i32, u: [f64; 3]) -> Complex64 {
    if m < 0 {
        let y = ylm_explicit(l, -m, u).conj();
        return if m % 2 == 0 { y } else { -y };
    }
    let m = m as u32;
    let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let x = u[2] / r;
    let theta = x.clamp(-1.0, 1.0).acos();
    let phi = u[1].atan2(u[0]);
    // d^m/dx^m P_l(x), P_l = 2^{-l} ∑_k (-1)^k C(l,k) C(2l-2k, l) x^{l-2k}
    let mut deriv = 0.0;
    for k in 0..=l / 2 {
        let p = l - 2 * k;
        if p < m {
            continue;
        }
        let coef = (-1f64).powi(k as i32) * binom(l, k) * binom(2 * l - 2 * k, l) / 2f64.powi(l as i32);
        deriv += coef * factorial(p) / factorial(p - m) * x.powi((p - m) as i32);
    }
    let plm = (-1f64).powi(m as i32) * theta.sin().powi(m as i32) * deriv;
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - m) / factorial(l + m)).sqrt();
    Complex64::from_polar(norm * plm, m as f64 * phi)
}

/// `a(x, ξ)` at a lattice frequency, recomputed from the explicit harmonics,
/// with the zero-mode rule at `ξ = 0`.
pub fn symbol_at(sym: &BandSymbol, x: [f64; 3], xi: [i64; 3]) -> Complex64 {
    sym.modes()
        .map(|(k, c)| {
            let y = if xi == [0; 3] {
                if k.harmonic.l == 0 {
                    Complex64::new(0.5 / PI.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                ylm_explicit(k.harmonic.l, k.harmonic.m, [xi[0] as f64, xi[1] as f64, xi[2] as f64])
            };
            let ph = k.zeta[0] as f64 * x[0] + k.zeta[1] as f64 * x[1] + k.zeta[2] as f64 * x[2];
            c * y * Complex64::from_polar(1.0, ph)
        })
        .sum()
}

/// Uniform `M³` grid holding one function, `x_j = 2πj/M`.
pub struct Grid {
    pub m: usize,
    pub data: Vec<Complex64>,
}

impl Grid {
    fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![Complex64::new(0.0, 0.0); m * m * m],
        }
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.m + j) * self.m + k
    }

    /// `f(x_j) = ∑_ξ f̂(ξ) e^{iξ·x_j}` by three passes of unnormalized inverse
    /// FFTs. Frequencies must satisfy `|ξ_i| < M/2`.
    pub fn synthesize(m: usize, coeffs: &[([i64; 3], Complex64)]) -> Self {
        let mut g = Self::zeros(m);
        for (xi, c) in coeffs {
            let w = |v: i64| v.rem_euclid(m as i64) as usize;
            assert!(xi.iter().all(|v| v.unsigned_abs() < m as u64 / 2), "frequency {xi:?} aliases");
            let p = g.idx(w(xi[0]), w(xi[1]), w(xi[2]));
            g.data[p] += c;
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(m);
        g.transform_axes(fft.as_ref());
        g
    }

    fn transform_axes(&mut self, fft: &dyn Fft<f64>) {
        let m = self.m;
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..3 {
            for a in 0..m {
                for b in 0..m {
                    for t in 0..m {
                        let (i, j, k) = match axis {
                            0 => (t, a, b),
                            1 => (a, t, b),
                            _ => (a, b, t),
                        };
                        line[t] = self.data[self.idx(i, j, k)];
                    }
                    fft.process(&mut line);
                    for t in 0..m {
                        let (i, j, k) = match axis {
                            0 => (t, a, b),
                            1 => (a, t, b),
                            _ => (a, b, t),
                        };
                        let p = self.idx(i, j, k);
                        self.data[p] = line[t];
                    }
                }
            }
        }
    }

    pub fn point(&self, p: usize) -> [f64; 3] {
        let h = 2.0 * PI / self.m as f64;
        let m = self.m;
        [(p / (m * m)) as f64 * h, ((p / m) % m) as f64 * h, (p % m) as f64 * h]
    }

    /// Trapezoid `∫_{T³} f conj(g) dx`.
    pub fn inner(&self, other: &Grid) -> Complex64 {
        let h = 2.0 * PI / self.m as f64;
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum::<Complex64>() * h * h * h
    }
}

/// Fourier coefficients of the unnormalized `G_{λ,L}` centred at `x0`,
/// found by scanning the cube.
pub fn green_coeffs(lambda: f64, width: f64, x0: [f64; 3]) -> Vec<([i64; 3], f64, Complex64)> {
    let s = (lambda + width).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in -s..=s {
        for b in -s..=s {
            for c in -s..=s {
                let n = (a * a + b * b + c * c) as f64;
                if (n - lambda).abs() < width {
                    let ph = -(a as f64 * x0[0] + b as f64 * x0[1] + c as f64 * x0[2]);
                    out.push(([a, b, c], n, Complex64::from_polar(1.0 / (n - lambda), ph)));
                }
            }
        }
    }
    out
}

/// `⟨Op(a) g, g⟩ / ⟨g, g⟩` on an `M³` grid: `g` and each `Y_{l,m}(D) g` are
/// synthesized by FFT, multiplied by `e^{iζ·x}` pointwise, and paired by the
/// trapezoid rule, which is exact for the resulting trigonometric polynomials.
pub fn grid_matrix_element(sym: &BandSymbol, lambda: f64, width: f64, x0: [f64; 3], m: usize) -> Complex64 {
    let coeffs = green_coeffs(lambda, width, x0);
    let g_hat: Vec<([i64; 3], Complex64)> = coeffs.iter().map(|(xi, _, c)| (*xi, *c)).collect();
    let g = Grid::synthesize(m, &g_hat);
    let mut op_g = Grid::zeros(m);
    for (k, c) in sym.modes() {
        let mut single = BandSymbol::new();
        single.add(*k, Complex64::new(1.0, 0.0));
        let filtered: Vec<([i64; 3], Complex64)> = g_hat
            .iter()
            .map(|(xi, v)| (*xi, symbol_at(&single, [0.0; 3], *xi) * v))
            .collect();
        let h = Grid::synthesize(m, &filtered);
        for p in 0..op_g.data.len() {
            let x = op_g.point(p);
            let ph = k.zeta[0] as f64 * x[0] + k.zeta[1] as f64 * x[1] + k.zeta[2] as f64 * x[2];
            op_g.data[p] += c * Complex64::from_polar(1.0, ph) * h.data[p];
        }
    }
    op_g.inner(&g) / g.inner(&g).re
}
