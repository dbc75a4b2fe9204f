//! Shell-grouped lattice series with a far-field moment expansion and a
//! continuum tail.
//!
//! A sum `∑_ξ k(|ξ|², λ)` is split at two radii `M ≤ N`:
//!
//! - `n ≤ M`: summed term by term from the `r3` table;
//! - `M < n ≤ N`: the kernel is expanded in powers of `λ/n` and evaluated
//!   from precomputed moments `m_k = ∑ r3(n) n^{-(k+1)}`;
//! - `n > N`: replaced by `∫_{N+½}^∞ k(t, λ) 2π√t dt`, the continuum density
//!   of lattice points per unit `|ξ|²`.
//!
//! The tail integrals are mapped to `s ∈ (0, 1]` by `t = N'/s²`, which turns
//! them into smooth rational functions of `s`.

use std::f64::consts::PI;

use crate::lattice_arith::{is_sum_of_three_squares, ShellTable};
use crate::quadrature::adaptive;
use crate::{Error, Result};

const MOMENTS: usize = 64;
/// Largest `|λ|/M` the moment expansion accepts.
const MAX_RATIO: f64 = 0.5;
/// Distance to a shell below which a kernel evaluation is a pole error.
pub(crate) const POLE_TOL: f64 = 1e-9;

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ShellSeries<'a> {
    table: &'a ShellTable,
    cutoff: u64,
    near_limit: u64,
    /// `m_k = ∑_{M<n≤N} r3(n)/n^{k+1}`, `k = 0..MOMENTS`.
    moments: Vec<f64>,
    /// `∑_{M<n≤N} r3(n) / (n (n² + 1))`.
    secular_const: f64,
}

impl<'a> ShellSeries<'a> {
    pub fn new(table: &'a ShellTable, cutoff: u64, near_limit: u64) -> Result<Self> {
        if cutoff > table.max_n() {
            return Err(Error::Parameter(format!(
                "shell cutoff {cutoff} exceeds sieved range {}",
                table.max_n()
            )));
        }
        let near_limit = near_limit.min(cutoff);
        let mut moments = vec![0.0f64; MOMENTS];
        let mut secular_const = 0.0;
        let r3 = table.as_slice();
        // all terms positive; summing from the far end adds them in increasing size
        for n in (near_limit + 1..=cutoff).rev() {
            let c = r3[n as usize];
            if c == 0 {
                continue;
            }
            let nf = n as f64;
            let inv = 1.0 / nf;
            let mut p = c as f64 * inv;
            secular_const += c as f64 / (nf * (nf * nf + 1.0));
            for m in moments.iter_mut() {
                *m += p;
                p *= inv;
                if p == 0.0 {
                    break;
                }
            }
        }
        Ok(Self {
            table,
            cutoff,
            near_limit,
            moments,
            secular_const,
        })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn check_pole(lambda: f64) -> Result<()> {
        let nearest = lambda.round();
        if nearest >= 0.0
            && (lambda - nearest).abs() < POLE_TOL
            && is_sum_of_three_squares(nearest as u64)
        {
            return Err(Error::Pole {
                lambda,
                shell: nearest as u64,
                tol: POLE_TOL,
            });
        }
        Ok(())
    }

    fn use_moments(&self, lambda: f64) -> bool {
        lambda.abs() <= MAX_RATIO * self.near_limit as f64
    }

    fn explicit<K: Fn(f64) -> f64>(&self, hi: u64, kernel: K) -> f64 {
        let mut acc = Neumaier::default();
        let r3 = self.table.as_slice();
        for n in 0..=hi {
            let c = r3[n as usize];
            if c != 0 {
                acc.add(c as f64 * kernel(n as f64));
            }
        }
        acc.value()
    }

    fn tail_start(&self) -> f64 {
        self.cutoff as f64 + 0.5
    }

    /// `∑_ξ [1/(|ξ|²-λ) - |ξ|²/(|ξ|⁴+1)]`, written with the cancellation-free
    /// summand `(1 + λn)/((n - λ)(n² + 1))`.
    pub fn secular(&self, lambda: f64) -> Result<f64> {
        Self::check_pole(lambda)?;
        let kernel = |n: f64| (1.0 + lambda * n) / ((n - lambda) * (n * n + 1.0));
        let body = if self.use_moments(lambda) {
            let near = self.explicit(self.near_limit, kernel);
            let mut far = 0.0;
            for k in (1..MOMENTS).rev() {
                far = far * lambda + self.moments[k];
            }
            near + self.secular_const + far * lambda
        } else {
            self.explicit(self.cutoff, kernel)
        };
        Ok(body + secular_tail(self.tail_start(), lambda))
    }

    /// `∑_ξ 1/(|ξ|² - λ)²`.
    pub fn green(&self, lambda: f64) -> Result<f64> {
        Self::check_pole(lambda)?;
        let kernel = |n: f64| {
            let d = n - lambda;
            1.0 / (d * d)
        };
        let body = if self.use_moments(lambda) {
            let near = self.explicit(self.near_limit, kernel);
            let mut far = 0.0;
            for k in (0..MOMENTS - 1).rev() {
                far = far * lambda + (k as f64 + 1.0) * self.moments[k + 1];
            }
            near + far
        } else {
            self.explicit(self.cutoff, kernel)
        };
        Ok(body + green_tail(self.tail_start(), lambda))
    }

    /// Shell sum `∑_{n≤N} r3(n)/(n² + 1)` and its continuum tail.
    pub fn c0_parts(&self) -> (f64, f64) {
        let body = self.explicit(self.cutoff, |n| 1.0 / (n * n + 1.0));
        (body, c0_tail(self.tail_start()))
    }
}

const TAIL_REL_TOL: f64 = 1e-15;

pub(crate) fn secular_tail(start: f64, lambda: f64) -> f64 {
    let np = start;
    let scale = 4.0 * PI * np.powf(1.5);
    let f = |s: f64| {
        let s2 = s * s;
        scale * (s2 + lambda * np) / ((np - lambda * s2) * (np * np + s2 * s2))
    };
    adaptive(&f, 0.0, 1.0, TAIL_REL_TOL, 0.0)
}

pub(crate) fn green_tail(start: f64, lambda: f64) -> f64 {
    let np = start;
    let scale = 4.0 * PI * np.powf(1.5);
    let f = |s: f64| {
        let d = np - lambda * s * s;
        scale / (d * d)
    };
    adaptive(&f, 0.0, 1.0, TAIL_REL_TOL, 0.0)
}

pub(crate) fn c0_tail(start: f64) -> f64 {
    let np = start;
    let scale = 4.0 * PI * np.powf(1.5);
    let f = |s: f64| {
        let s2 = s * s;
        scale / (np * np + s2 * s2)
    };
    adaptive(&f, 0.0, 1.0, TAIL_REL_TOL, 0.0)
}
