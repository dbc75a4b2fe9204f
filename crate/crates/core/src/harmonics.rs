//! Complex spherical harmonics and lattice Weyl sums.
//!
//! `Y_{l,m}` carries the Condon–Shortley phase and is normalized against the
//! surface measure of total mass `4π`. Evaluation avoids trigonometry: for a
//! unit vector `u = (x, y, z)`,
//!
//! ```text
//! Y_{l,m}(u) = Q_l^m(z) (x + iy)^m,      m ≥ 0,
//! Y_{l,-m}   = (-1)^m conj(Y_{l,m}),
//! ```
//!
//! where `Q_l^m = P̄_l^m / sin^m θ` follows the usual three-term recurrence of
//! the fully normalized associated Legendre functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice_arith::{
    decompose_four_adic, for_each_point_in_shells, is_sum_of_three_squares, sphere_points,
    ShellClass, ShellTable,
};
use crate::series::Neumaier;
use crate::{Error, Result};

/// Tolerance on `|u| = 1` accepted by [`ylm`].
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub l: u32,
    pub m: i32,
}

impl HarmonicIndex {
    pub fn new(l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::Parameter(format!("|m| must not exceed l (l = {l}, m = {m})")));
        }
        Ok(Self { l, m })
    }

    /// All `(l, m)` with `l ≤ l_max`, ordered by `l` then `m`.
    pub fn all_up_to(l_max: u32) -> Vec<Self> {
        (0..=l_max)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| Self { l, m }))
            .collect()
    }
}

/// A single `Y_{l,m}` with its recurrence coefficients precomputed.
#[derive(Debug, Clone)]
pub struct Harmonic {
    idx: HarmonicIndex,
    /// `Q_{|m|}^{|m|}`, a constant.
    start: f64,
    /// `(a_k, b_k)` for `k = |m|+2 ..= l`.
    steps: Vec<(f64, f64)>,
}

impl Harmonic {
    pub fn new(idx: HarmonicIndex) -> Self {
        let m = idx.m.unsigned_abs() as usize;
        let l = idx.l as usize;
        let mut prod = 1.0;
        for k in 1..=m {
            prod *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
        let start = sign * ((2 * m + 1) as f64 / (4.0 * PI) * prod).sqrt();
        let mf = m as f64;
        let steps = (m + 2..=l)
            .map(|k| {
                let kf = k as f64;
                let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
                let b = (((kf - 1.0).powi(2) - mf * mf) / (4.0 * (kf - 1.0).powi(2) - 1.0)).sqrt();
                (a, b)
            })
            .collect();
        Self { idx, start, steps }
    }

    pub fn index(&self) -> HarmonicIndex {
        self.idx
    }

    /// Evaluates at a unit vector without checking its length.
    pub fn eval_unit(&self, u: [f64; 3]) -> Complex64 {
        let m = self.idx.m.unsigned_abs();
        let z = u[2];
        let q = if self.idx.l == m {
            self.start
        } else {
            let mut q0 = self.start;
            let mut q1 = z * ((2 * m + 3) as f64).sqrt() * self.start;
            for &(a, b) in &self.steps {
                let q2 = a * (z * q1 - b * q0);
                q0 = q1;
                q1 = q2;
            }
            q1
        };
        let mut e = Complex64::new(1.0, 0.0);
        let w = Complex64::new(u[0], u[1]);
        for _ in 0..m {
            e *= w;
        }
        let y = e * q;
        if self.idx.m >= 0 {
            y
        } else if m % 2 == 1 {
            -y.conj()
        } else {
            y.conj()
        }
    }

    /// Evaluates at `ξ/|ξ|` for a nonzero lattice vector.
    pub fn eval_lattice(&self, xi: [i64; 3]) -> Complex64 {
        let n = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64;
        let r = n.sqrt();
        self.eval_unit([xi[0] as f64 / r, xi[1] as f64 / r, xi[2] as f64 / r])
    }

    /// `max_{S²} |Y_{l,m}|`, located by a coarse `(θ, φ)` scan and golden
    /// section refinement in `θ`. `|Y_{l,m}|` does not depend on the azimuth.
    pub fn sup_norm(&self) -> f64 {
        let at = |theta: f64| self.eval_unit([theta.sin(), 0.0, theta.cos()]).norm();
        let n = 64 * (self.idx.l as usize + 1);
        let h = PI / n as f64;
        let (mut best_t, mut best) = (0.0, at(0.0));
        for i in 1..=n {
            let t = i as f64 * h;
            let v = at(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        let (mut a, mut b) = ((best_t - h).max(0.0), (best_t + h).min(PI));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if at(c) > at(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best.max(at(0.5 * (a + b)))
    }
}

/// `Y_{l,m}(u)` for a unit vector `u`.
pub fn ylm(idx: HarmonicIndex, u: [f64; 3]) -> Result<Complex64> {
    let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if (r - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("|u| = {r} is not 1")));
    }
    Ok(Harmonic::new(idx).eval_unit(u))
}

/// `W_{l,m}(n) = ∑_{|ξ|²=n} Y_{l,m}(ξ/|ξ|)`.
pub fn weyl_sum(idx: HarmonicIndex, n: u64) -> Result<Complex64> {
    if n == 0 || !is_sum_of_three_squares(n) {
        return Err(Error::Domain(format!("{n} is not a positive sum of three squares")));
    }
    let h = Harmonic::new(idx);
    let mut acc = ComplexSum::default();
    for p in sphere_points(n) {
        acc.add(h.eval_lattice(p.as_array()));
    }
    Ok(acc.value())
}

/// `W_{l,m}(n)` for every `lo ≤ n ≤ hi`, indexed from `lo`; zero off `N3`.
/// Agrees bit for bit with [`weyl_sum`] on each shell.
pub fn weyl_sums(idx: HarmonicIndex, lo: u64, hi: u64) -> Result<Vec<Complex64>> {
    if lo == 0 || lo > hi {
        return Err(Error::Parameter(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
    }
    Ok(shell_sums(&Harmonic::new(idx), lo, hi))
}

#[derive(Debug, Default, Clone, Copy)]
struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylRow {
    pub n: u64,
    pub a: u32,
    pub n1: u64,
    pub r3: u32,
    pub w: Complex64,
    pub ratio: f64,
    pub class: ShellClass,
}

/// Maxima of `|W|/r3` over the dyadic block `[2^k, 2^{k+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicBlock {
    pub k: u32,
    pub count: usize,
    pub max_ratio: f64,
    pub count_good: usize,
    pub max_ratio_good: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylProfile {
    pub idx: HarmonicIndex,
    pub rows: Vec<WeylRow>,
    pub blocks: Vec<DyadicBlock>,
}

impl WeylProfile {
    pub fn block(&self, k: u32) -> Option<&DyadicBlock> {
        self.blocks.iter().find(|b| b.k == k)
    }
}

pub const MIN_PROFILE_N: u64 = 100;

/// Per-shell Weyl sums for every shell `1 ≤ n ≤ n_max`, with dyadic maxima.
///
/// Shells are processed in blocks, each block enumerating its spherical
/// shell once; per-shell summation order is lexicographic, matching
/// [`weyl_sum`].
pub fn weyl_profile(table: &ShellTable, idx: HarmonicIndex, n_max: u64) -> Result<WeylProfile> {
    if n_max < MIN_PROFILE_N {
        return Err(Error::Parameter(format!("n_max must be at least {MIN_PROFILE_N}")));
    }
    if n_max > table.max_n() {
        return Err(Error::Parameter(format!(
            "n_max = {n_max} beyond sieved range {}",
            table.max_n()
        )));
    }
    let h = Harmonic::new(idx);
    let sums = shell_sums(&h, 1, n_max);
    let mut rows = Vec::new();
    for (i, w) in sums.into_iter().enumerate() {
        let n = i as u64 + 1;
        let r3 = table.r3(n).unwrap_or(0);
        if r3 == 0 {
            continue;
        }
        let (a, n1) = decompose_four_adic(n)?;
        let class = if (n1 as u128) * (n1 as u128) > n as u128 {
            ShellClass::Good
        } else {
            ShellClass::Bad
        };
        rows.push(WeylRow {
            n,
            a,
            n1,
            r3,
            w,
            ratio: w.norm() / r3 as f64,
            class,
        });
    }
    let mut blocks: Vec<DyadicBlock> = Vec::new();
    for row in &rows {
        let k = 63 - row.n.leading_zeros();
        if blocks.last().is_none_or(|b| b.k != k) {
            blocks.push(DyadicBlock {
                k,
                count: 0,
                max_ratio: 0.0,
                count_good: 0,
                max_ratio_good: 0.0,
            });
        }
        let b = blocks.last_mut().unwrap();
        b.count += 1;
        b.max_ratio = b.max_ratio.max(row.ratio);
        if row.class == ShellClass::Good {
            b.count_good += 1;
            b.max_ratio_good = b.max_ratio_good.max(row.ratio);
        }
    }
    Ok(WeylProfile { idx, rows, blocks })
}

const SHELL_BLOCK: u64 = 2048;

/// `W(n)` for `lo ≤ n ≤ hi`, indexed from `lo`.
fn shell_sums(h: &Harmonic, lo: u64, hi: u64) -> Vec<Complex64> {
    let starts: Vec<u64> = (lo..=hi).step_by(SHELL_BLOCK as usize).collect();
    starts
        .into_par_iter()
        .map(|s| {
            let e = (s + SHELL_BLOCK - 1).min(hi);
            let mut local = vec![ComplexSum::default(); (e - s + 1) as usize];
            for_each_point_in_shells(s, e, |xi, n| {
                local[(n - s) as usize].add(h.eval_lattice(xi));
            });
            local.into_iter().map(|c| c.value()).collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}
