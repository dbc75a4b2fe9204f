//! Perturbed eigenvalues of the point scatterer.
//!
//! For `φ ∈ (-π, π)` the new eigenvalues are the roots of
//!
//! ```text
//! F(λ) = ∑_ξ { 1/(|ξ|² - λ) - |ξ|²/(|ξ|⁴ + 1) } = c0 tan(φ/2),
//! c0   = ∑_ξ 1/(|ξ|⁴ + 1).
//! ```
//!
//! `F` increases strictly between consecutive elements of `N3`, running from
//! `-∞` to `+∞`, so there is exactly one root in each gap and the roots
//! interlace with `N3`.

use rayon::prelude::*;
use serde::Serialize;

use crate::lattice_arith::{classify, is_sum_of_three_squares, nearest_shell, ShellClass, ShellTable};
use crate::series::ShellSeries;
use crate::{Error, Result, TorusPoint};

/// Bisection never runs longer than this.
pub const MAX_BISECTION_STEPS: usize = 60;
pub const MIN_TAIL_CUTOFF: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScattererConfig {
    pub phi: f64,
    pub x0: TorusPoint,
    pub tail_cutoff_nmax: u64,
    pub tol_lambda: f64,
}

impl Default for ScattererConfig {
    fn default() -> Self {
        Self {
            phi: 0.0,
            x0: [0.0; 3],
            tail_cutoff_nmax: 1_000_000,
            tol_lambda: 1e-13,
        }
    }
}

impl ScattererConfig {
    pub fn validate(&self) -> Result<()> {
        use std::f64::consts::PI;
        if !(self.phi > -PI && self.phi < PI) {
            return Err(Error::Parameter(format!(
                "phi must lie in (-pi, pi), got {}",
                self.phi
            )));
        }
        if !(self.tol_lambda > 0.0) {
            return Err(Error::Parameter("tol_lambda must be positive".into()));
        }
        if self.tail_cutoff_nmax < MIN_TAIL_CUTOFF {
            return Err(Error::Parameter(format!(
                "tail cutoff must be at least {MIN_TAIL_CUTOFF}"
            )));
        }
        Ok(())
    }
}

/// `c0` with its pieces: shell sum up to the cutoff, continuum tail, and a
/// heuristic tail error. The error uses the lattice-point discrepancy of the
/// ball, taken as `2π √N ln N`, divided by `N²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C0Estimate {
    pub value: f64,
    pub shell_sum: f64,
    pub tail: f64,
    pub tail_error: f64,
    pub cutoff: u64,
}

pub fn compute_c0(table: &ShellTable, tail_cutoff_nmax: u64) -> Result<C0Estimate> {
    if tail_cutoff_nmax < MIN_TAIL_CUTOFF {
        return Err(Error::Parameter(format!(
            "tail cutoff must be at least {MIN_TAIL_CUTOFF}"
        )));
    }
    let series = ShellSeries::new(table, tail_cutoff_nmax, 0)?;
    Ok(c0_from_series(&series))
}

fn c0_from_series(series: &ShellSeries<'_>) -> C0Estimate {
    let (shell_sum, tail) = series.c0_parts();
    let n = series.cutoff() as f64;
    C0Estimate {
        value: shell_sum + tail,
        shell_sum,
        tail,
        tail_error: 2.0 * std::f64::consts::PI * n.sqrt() * n.ln() / (n * n + 1.0),
        cutoff: series.cutoff(),
    }
}

/// The secular function `F` for a fixed shell cutoff, with `c0` precomputed.
#[derive(Debug, Clone)]
pub struct SecularFunction<'a> {
    series: ShellSeries<'a>,
    c0: C0Estimate,
}

impl<'a> SecularFunction<'a> {
    /// `near_limit` is the radius below which shells are summed one by one;
    /// arguments with `|λ|` up to half of it use the moment expansion beyond.
    pub fn new(table: &'a ShellTable, tail_cutoff_nmax: u64, near_limit: u64) -> Result<Self> {
        let series = ShellSeries::new(table, tail_cutoff_nmax, near_limit)?;
        let c0 = c0_from_series(&series);
        Ok(Self { series, c0 })
    }

    pub fn c0(&self) -> &C0Estimate {
        &self.c0
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        self.series.secular(lambda)
    }

    pub fn rhs(&self, phi: f64) -> f64 {
        self.c0.value * (0.5 * phi).tan()
    }
}

/// One-off evaluation of `F(λ)`.
pub fn secular_f(table: &ShellTable, lambda: f64, config: &ScattererConfig) -> Result<f64> {
    if lambda < 0.0 {
        return Err(Error::Domain(format!("secular_F needs lambda >= 0, got {lambda}")));
    }
    let near = default_near_limit(lambda.abs(), config.tail_cutoff_nmax);
    SecularFunction::new(table, config.tail_cutoff_nmax, near)?.eval(lambda)
}

fn default_near_limit(lambda_scale: f64, cutoff: u64) -> u64 {
    ((4.0 * lambda_scale).ceil() as u64).max(1000).min(cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub k: usize,
    pub lambda: f64,
    /// `n_{k-1}`, or the expanded left end of the search for `k = 0`.
    pub bracket_lo: f64,
    /// `n_k`.
    pub bracket_hi: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScattererSpectrum {
    pub phi: f64,
    pub c0: f64,
    pub lambdas: Vec<Eigenvalue>,
}

/// Solves `F(λ) = c0 tan(φ/2)` on every gap up to `(n_{k_max-1}, n_{k_max})`
/// and for `λ_0 < n_0 = 0`.
pub fn solve_spectrum(
    table: &ShellTable,
    config: &ScattererConfig,
    k_max: usize,
) -> Result<ScattererSpectrum> {
    config.validate()?;
    if k_max < 1 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    let shells: Vec<u64> = table.shells_in(0, table.max_n()).take(k_max + 1).collect();
    if shells.len() < k_max + 1 {
        return Err(Error::Parameter(format!(
            "sieve up to {} does not contain {} shells",
            table.max_n(),
            k_max + 1
        )));
    }
    let top = shells[k_max] as f64;
    let f = SecularFunction::new(
        table,
        config.tail_cutoff_nmax,
        default_near_limit(top, config.tail_cutoff_nmax),
    )?;
    let rhs = f.rhs(config.phi);

    let lambda0 = solve_lowest(&f, rhs, config.tol_lambda)?;
    let mut lambdas = vec![lambda0];
    let rest: Result<Vec<Eigenvalue>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = (shells[k - 1] as f64, shells[k] as f64);
            let lambda = bisect_gap(&f, rhs, lo, hi, config.tol_lambda)?;
            Ok(Eigenvalue {
                k,
                lambda,
                bracket_lo: lo,
                bracket_hi: hi,
                residual: (f.eval(lambda)? - rhs).abs(),
            })
        })
        .collect();
    lambdas.extend(rest?);
    Ok(ScattererSpectrum {
        phi: config.phi,
        c0: f.c0().value,
        lambdas,
    })
}

fn solve_lowest(f: &SecularFunction<'_>, rhs: f64, tol: f64) -> Result<Eigenvalue> {
    // F(λ) → +∞ as λ ↑ 0 and → -∞ as λ → -∞.
    let hi = find_inner_end(f, rhs, 0.0, -1.0)?;
    let mut c = 1.0;
    loop {
        if f.eval(-c)? < rhs {
            break;
        }
        c *= 2.0;
        if c > 1e12 {
            return Err(Error::Solver {
                lo: -c,
                hi: 0.0,
                reason: "no sign change while expanding the left bracket".into(),
            });
        }
    }
    let lambda = bisect(f, rhs, -c, hi, tol)?;
    Ok(Eigenvalue {
        k: 0,
        lambda,
        bracket_lo: -c,
        bracket_hi: 0.0,
        residual: (f.eval(lambda)? - rhs).abs(),
    })
}

/// Steps in from a pole at `pole` (direction `dir`) until `F - rhs` has the
/// sign it must have next to that pole.
fn find_inner_end(f: &SecularFunction<'_>, rhs: f64, pole: f64, dir: f64) -> Result<f64> {
    // below a pole F → +∞, above it F → -∞
    let want_above = dir < 0.0;
    let mut eps = 1e-3;
    while eps >= 2e-9 {
        let x = pole + dir * eps;
        let v = f.eval(x)? - rhs;
        if (v > 0.0) == want_above {
            return Ok(x);
        }
        eps *= 0.01;
    }
    Err(Error::Solver {
        lo: pole.min(pole + dir * 1e-3),
        hi: pole.max(pole + dir * 1e-3),
        reason: format!("secular function has the wrong sign next to the pole at {pole}"),
    })
}

fn bisect_gap(f: &SecularFunction<'_>, rhs: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let a = find_inner_end(f, rhs, lo, 1.0).map_err(|_| Error::Solver {
        lo,
        hi,
        reason: "F - rhs is not negative just above the lower shell".into(),
    })?;
    let b = find_inner_end(f, rhs, hi, -1.0).map_err(|_| Error::Solver {
        lo,
        hi,
        reason: "F - rhs is not positive just below the upper shell".into(),
    })?;
    bisect(f, rhs, a, b, tol)
}

fn bisect(f: &SecularFunction<'_>, rhs: f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.eval(mid)? < rhs {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SequenceKind {
    Midpoint,
    Secular(ScattererConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceEntry {
    pub lambda: f64,
    pub n_lambda: u64,
    pub in_lambda_infinity: bool,
}

impl SequenceEntry {
    pub fn tagged(lambda: f64) -> Result<Self> {
        let n_lambda = nearest_shell(lambda)?;
        Ok(Self {
            lambda,
            n_lambda,
            in_lambda_infinity: matches!(classify(n_lambda), Ok(ShellClass::Good)),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InterlacedSequence {
    pub kind: SequenceKind,
    pub entries: Vec<SequenceEntry>,
}

pub const MIN_SEQUENCE_LAMBDA_MAX: f64 = 10.0;

/// Midpoints `(n_{k-1} + n_k)/2` of consecutive shells, up to `lambda_max`.
pub fn build_midpoint_sequence(lambda_max: f64) -> Result<InterlacedSequence> {
    check_lambda_max(lambda_max)?;
    let mut entries = Vec::new();
    let mut prev = 0u64;
    let mut n = 1u64;
    loop {
        if is_sum_of_three_squares(n) {
            let lambda = 0.5 * (prev + n) as f64;
            if lambda > lambda_max {
                break;
            }
            entries.push(SequenceEntry::tagged(lambda)?);
            prev = n;
        }
        n += 1;
    }
    Ok(InterlacedSequence {
        kind: SequenceKind::Midpoint,
        entries,
    })
}

/// Secular roots `λ_k ≤ lambda_max`, `k ≥ 1`. The root below `n_0 = 0` is
/// negative and has no nearest shell, so it is left out.
pub fn build_secular_sequence(
    table: &ShellTable,
    config: &ScattererConfig,
    lambda_max: f64,
) -> Result<InterlacedSequence> {
    check_lambda_max(lambda_max)?;
    let k_max = table.shells_in(1, lambda_max.ceil() as u64).count().max(1);
    let spec = solve_spectrum(table, config, k_max)?;
    let entries = spec
        .lambdas
        .iter()
        .filter(|e| e.k >= 1 && e.lambda <= lambda_max)
        .map(|e| SequenceEntry::tagged(e.lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterlacedSequence {
        kind: SequenceKind::Secular(*config),
        entries,
    })
}

pub fn build_sequence(
    kind: &SequenceKind,
    lambda_max: f64,
    table: &ShellTable,
) -> Result<InterlacedSequence> {
    match kind {
        SequenceKind::Midpoint => build_midpoint_sequence(lambda_max),
        SequenceKind::Secular(config) => build_secular_sequence(table, config, lambda_max),
    }
}

fn check_lambda_max(lambda_max: f64) -> Result<()> {
    if !(lambda_max >= MIN_SEQUENCE_LAMBDA_MAX) {
        return Err(Error::Parameter(format!(
            "lambda_max must be at least {MIN_SEQUENCE_LAMBDA_MAX}, got {lambda_max}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: f64,
    pub count: usize,
    pub count_inf: usize,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityTable {
    pub rows: Vec<DensityRow>,
    /// Density at the last ladder point.
    pub headline: f64,
    /// `max (1 - density) √X / log X` over ladder points `X ≥ 10`.
    pub fitted_constant: f64,
}

/// Fraction of `Λ_∞` entries among entries `λ ≤ X`, on the ladder
/// `X = 10, 100, …` plus the largest `λ`.
pub fn density_of_subsequence(seq: &InterlacedSequence) -> Result<DensityTable> {
    let last = seq
        .entries
        .last()
        .ok_or_else(|| Error::Parameter("density needs a nonempty sequence".into()))?
        .lambda;
    let mut ladder = Vec::new();
    let mut x = 10.0;
    while x < last {
        ladder.push(x);
        x *= 10.0;
    }
    ladder.push(last);
    let rows: Vec<DensityRow> = ladder
        .into_iter()
        .map(|x| {
            let upto = seq.entries.iter().filter(|e| e.lambda <= x);
            let (count, count_inf) = upto.fold((0, 0), |(c, ci), e| {
                (c + 1, ci + usize::from(e.in_lambda_infinity))
            });
            DensityRow {
                x,
                count,
                count_inf,
                density: if count == 0 { 1.0 } else { count_inf as f64 / count as f64 },
            }
        })
        .collect();
    let fitted_constant = rows
        .iter()
        .filter(|r| r.x >= 10.0)
        .map(|r| (1.0 - r.density) * r.x.sqrt() / r.x.ln())
        .fold(0.0, f64::max);
    Ok(DensityTable {
        headline: rows.last().map_or(1.0, |r| r.density),
        rows,
        fitted_constant,
    })
}
