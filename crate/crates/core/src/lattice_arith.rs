//! Integer arithmetic of sums of three squares.
//!
//! Everything here is exact: counts are integers, the good/bad split is an
//! integer comparison, and lattice points are enumerated without floating
//! point. The [`ShellTable`] sieve is the shared read-only backbone used by
//! every other module.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default cap for sieve allocations (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShellClass {
    Good,
    Bad,
}

impl ShellClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ShellClass::Good => "good",
            ShellClass::Bad => "bad",
        }
    }
}

/// One integer `n` with its 4-adic decomposition `n = 4^a n1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShellRecord {
    pub n: u64,
    pub a: u32,
    /// Zero for `n = 0`, where the decomposition is undefined.
    pub n1: u64,
    pub in_n3: bool,
    pub r3: u32,
    /// `None` when `n` is not a sum of three squares or `n = 0`.
    pub class: Option<ShellClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Self { x, y, z }
    }

    pub fn norm_sq(&self) -> u64 {
        (self.x * self.x + self.y * self.y + self.z * self.z) as u64
    }

    pub fn as_array(&self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    /// The direction `ξ/|ξ|`; the origin maps to the origin.
    pub fn direction(&self) -> [f64; 3] {
        let n = self.norm_sq();
        if n == 0 {
            return [0.0; 3];
        }
        let r = (n as f64).sqrt();
        [self.x as f64 / r, self.y as f64 / r, self.z as f64 / r]
    }
}

/// Writes `n = 4^a · n1` with `4 ∤ n1`.
pub fn decompose_four_adic(n: u64) -> Result<(u32, u64)> {
    if n == 0 {
        return Err(Error::Domain(
            "4-adic decomposition is undefined for n = 0".into(),
        ));
    }
    let mut a = 0;
    let mut n1 = n;
    while n1 % 4 == 0 {
        n1 /= 4;
        a += 1;
    }
    Ok((a, n1))
}

/// Legendre–Gauss: `n` is a sum of three squares unless `n = 4^a (8k + 7)`.
pub fn is_sum_of_three_squares(n: u64) -> bool {
    match decompose_four_adic(n) {
        Ok((_, n1)) => n1 % 8 != 7,
        Err(_) => true,
    }
}

/// Good iff `n1 > √n`, compared as `n1² > n` in integers.
pub fn classify(n: u64) -> Result<ShellClass> {
    if n == 0 {
        return Err(Error::Domain("classify is undefined for n = 0".into()));
    }
    if !is_sum_of_three_squares(n) {
        return Err(Error::Domain(format!("{n} is not a sum of three squares")));
    }
    let (_, n1) = decompose_four_adic(n)?;
    if (n1 as u128) * (n1 as u128) > n as u128 {
        Ok(ShellClass::Good)
    } else {
        Ok(ShellClass::Bad)
    }
}

/// Exact number of bad shells `1 ≤ n ≤ X` together with the reference bound
/// `X^{1/2} log X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BadCount {
    pub x: u64,
    pub count: u64,
    pub bound: f64,
}

/// Counts bad shells up to `x` without a sieve.
///
/// A shell `4^a n1` is bad iff `n1 ≤ 4^a`, so for each `a` only
/// `n1 ≤ min(4^a, X / 4^a)` has to be scanned.
pub fn bad_count(x: u64) -> BadCount {
    let mut count = 0u64;
    let mut pow = 1u64;
    while pow <= x {
        let hi = pow.min(x / pow);
        count += (1..=hi).filter(|n1| n1 % 4 != 0 && n1 % 8 != 7).count() as u64;
        match pow.checked_mul(4) {
            Some(p) => pow = p,
            None => break,
        }
    }
    let xf = x as f64;
    BadCount {
        x,
        count,
        bound: xf.sqrt() * xf.ln(),
    }
}

/// Closest element of `N3` to `lambda`; ties go to the smaller shell.
pub fn nearest_shell(lambda: f64) -> Result<u64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "nearest_shell needs a finite lambda >= 0, got {lambda}"
        )));
    }
    let floor = lambda.floor() as u64;
    let mut below = floor;
    while !is_sum_of_three_squares(below) {
        below -= 1;
    }
    let mut above = floor + 1;
    while !is_sum_of_three_squares(above) {
        above += 1;
    }
    if lambda - below as f64 <= above as f64 - lambda {
        Ok(below)
    } else {
        Ok(above)
    }
}

/// All integer solutions of `x² + y² + z² = n` in lexicographic order.
pub fn sphere_points(n: u64) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    let s = n.isqrt() as i64;
    for x in -s..=s {
        let rx = n - (x * x) as u64;
        let sy = rx.isqrt() as i64;
        for y in -sy..=sy {
            let rem = rx - (y * y) as u64;
            let z = rem.isqrt();
            if z * z == rem {
                let z = z as i64;
                if z == 0 {
                    out.push(LatticePoint::new(x, y, 0));
                } else {
                    out.push(LatticePoint::new(x, y, -z));
                    out.push(LatticePoint::new(x, y, z));
                }
            }
        }
    }
    out
}

fn ceil_sqrt(v: u64) -> u64 {
    let s = v.isqrt();
    if s * s == v {
        s
    } else {
        s + 1
    }
}

/// Visits every lattice point with `lo ≤ |ξ|² ≤ hi`.
///
/// Points are visited in lexicographic order of `(x, y, z)`, so the points of
/// any single shell arrive in the same order as [`sphere_points`] returns
/// them. Cost is `O(hi)` for the disc scan plus one call per point.
pub fn for_each_point_in_shells<F>(lo: u64, hi: u64, mut f: F)
where
    F: FnMut([i64; 3], u64),
{
    if lo > hi {
        return;
    }
    let s = hi.isqrt() as i64;
    for x in -s..=s {
        let rx = hi - (x * x) as u64;
        let sy = rx.isqrt() as i64;
        for y in -sy..=sy {
            let base = (x * x + y * y) as u64;
            let zmax = (hi - base).isqrt() as i64;
            let zmin = if lo > base { ceil_sqrt(lo - base) as i64 } else { 0 };
            if zmin > zmax {
                continue;
            }
            for z in (zmin.max(1)..=zmax).rev() {
                f([x, y, -z], base + (z * z) as u64);
            }
            for z in zmin..=zmax {
                f([x, y, z], base + (z * z) as u64);
            }
        }
    }
}

/// Dense table of `r3(n)` for `0 ≤ n ≤ max_n`.
#[derive(Debug, Clone)]
pub struct ShellTable {
    r3: Vec<u32>,
}

impl ShellTable {
    /// Sieves `r3` over the ball of radius `√x_max` in one pass.
    ///
    /// Only ordered triples `0 ≤ x ≤ y ≤ z` are visited; each carries the
    /// number of signed permutations it stands for. With more than one rayon
    /// thread, x-slices are dealt round-robin to per-thread tables that are
    /// summed at the end.
    pub fn sieve(x_max: u64, budget_bytes: u64) -> Result<Self> {
        let threads = rayon::current_num_threads().max(1) as u64;
        let table_bytes = (x_max + 1).saturating_mul(4);
        let copies = if threads > 1 { threads + 1 } else { 1 };
        let required = table_bytes.saturating_mul(copies);
        if required > budget_bytes || x_max >= usize::MAX as u64 / 8 {
            return Err(Error::MemoryBudget {
                what: format!("r3 sieve up to {x_max}"),
                required,
                budget: budget_bytes,
            });
        }
        let len = x_max as usize + 1;
        let xs_max = (x_max / 3).isqrt();
        let r3 = if threads == 1 {
            let mut table = vec![0u32; len];
            for x in 0..=xs_max {
                sieve_slice(x, x_max, &mut table);
            }
            table
        } else {
            (0..threads)
                .into_par_iter()
                .map(|t| {
                    let mut local = vec![0u32; len];
                    let mut x = t;
                    while x <= xs_max {
                        sieve_slice(x, x_max, &mut local);
                        x += threads;
                    }
                    local
                })
                .reduce_with(|mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(s, v)| *s += v);
                    a
                })
                .unwrap_or_else(|| vec![0u32; len])
        };
        Ok(Self { r3 })
    }

    pub fn max_n(&self) -> u64 {
        self.r3.len() as u64 - 1
    }

    pub fn r3(&self, n: u64) -> Option<u32> {
        self.r3.get(n as usize).copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.r3
    }

    pub fn is_shell(&self, n: u64) -> bool {
        self.r3(n).is_some_and(|c| c > 0)
    }

    /// Shells `n` with `lo ≤ n ≤ hi` (clipped to the table).
    pub fn shells_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let hi = hi.min(self.max_n());
        (lo..=hi).filter(move |&n| self.r3[n as usize] > 0)
    }

    /// Smallest shell strictly greater than `n`, if inside the table.
    pub fn next_shell(&self, n: u64) -> Option<u64> {
        ((n + 1)..=self.max_n()).find(|&m| self.r3[m as usize] > 0)
    }

    pub fn record(&self, n: u64) -> Option<ShellRecord> {
        let r3 = self.r3(n)?;
        let (a, n1) = decompose_four_adic(n).unwrap_or((0, 0));
        Some(ShellRecord {
            n,
            a,
            n1,
            in_n3: is_sum_of_three_squares(n),
            r3,
            class: classify(n).ok(),
        })
    }

    /// Bad-shell count read off the sieve; must agree with [`bad_count`].
    pub fn bad_count(&self, x: u64) -> BadCount {
        let hi = x.min(self.max_n());
        let count = (1..=hi)
            .filter(|&n| self.r3[n as usize] > 0 && matches!(classify(n), Ok(ShellClass::Bad)))
            .count() as u64;
        let xf = x as f64;
        BadCount {
            x,
            count,
            bound: xf.sqrt() * xf.ln(),
        }
    }
}

fn sieve_slice(x: u64, x_max: u64, table: &mut [u32]) {
    let sign = |v: u64| if v == 0 { 1u32 } else { 2 };
    let mut y = x;
    while x * x + 2 * y * y <= x_max {
        let base = x * x + y * y;
        // z == y
        let n = base + y * y;
        if n <= x_max {
            let perms = if x == y { 1 } else { 3 };
            table[n as usize] += perms * sign(x) * sign(y) * sign(y);
        }
        // z > y
        let w = if x == y { 3 } else { 6 } * sign(x) * sign(y) * 2;
        let mut z = y + 1;
        let mut n = base + z * z;
        while n <= x_max {
            table[n as usize] += w;
            n += 2 * z + 1;
            z += 1;
        }
        y += 1;
    }
}
