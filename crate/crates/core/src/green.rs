//! Green's functions `G_λ = (Δ + λ)^{-1} δ_{x0}` and their truncations.
//!
//! Fourier convention: `f(x) = ∑_ξ f̂(ξ) e^{iξ·x}`, so that
//! `‖f‖₂² = (2π)³ ∑ |f̂(ξ)|²`. In this convention
//!
//! ```text
//! Ĝ_λ(ξ) = -(1/8π³) e^{-iξ·x0} / (|ξ|² - λ),
//! ‖G_λ‖₂² = (1/8π³) ∑_n r3(n) / (n - λ)².
//! ```
//!
//! The truncated function `G_{λ,L}` keeps the frequencies with
//! `||ξ|² - λ| < L`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::lattice_arith::{sphere_points, ShellTable};
use crate::series::{Neumaier, ShellSeries};
use crate::{Error, Result, TorusPoint};

/// `8π³ = (2π)³`, the volume of the torus.
pub const TORUS_VOLUME: f64 = 8.0 * PI * PI * PI;

/// `‖G_λ‖₂²` evaluator for a fixed shell cutoff.
#[derive(Debug, Clone)]
pub struct GreenNorms<'a> {
    table: &'a ShellTable,
    series: ShellSeries<'a>,
}

impl<'a> GreenNorms<'a> {
    /// Shells up to `near_limit` are summed directly; `λ` up to half of it is
    /// handled by the moment expansion, larger `λ` falls back to a direct sum
    /// up to `shell_cutoff`.
    pub fn new(table: &'a ShellTable, shell_cutoff: u64, near_limit: u64) -> Result<Self> {
        Ok(Self {
            table,
            series: ShellSeries::new(table, shell_cutoff, near_limit)?,
        })
    }

    pub fn table(&self) -> &'a ShellTable {
        self.table
    }

    pub fn shell_cutoff(&self) -> u64 {
        self.series.cutoff()
    }

    pub fn norm_sq(&self, lambda: f64) -> Result<f64> {
        Ok(self.series.green(lambda)? / TORUS_VOLUME)
    }
}

/// One-off `‖G_λ‖₂²`.
pub fn green_norm_sq(table: &ShellTable, lambda: f64, shell_cutoff: u64) -> Result<f64> {
    let near = ((4.0 * lambda.abs()).ceil() as u64).max(1000);
    GreenNorms::new(table, shell_cutoff, near)?.norm_sq(lambda)
}

/// `∑_{|n-λ|<L} r3(n)/(n-λ)²`, the unnormalized annulus shell sum.
pub fn annulus_shell_sum(table: &ShellTable, lambda: f64, width: f64) -> Result<(f64, Vec<u64>)> {
    ShellSeries::check_pole(lambda)?;
    let (lo, hi) = annulus_bounds(lambda, width);
    if hi > table.max_n() {
        return Err(Error::Parameter(format!(
            "annulus reaches n = {hi}, beyond sieved range {}",
            table.max_n()
        )));
    }
    let shells: Vec<u64> = table
        .shells_in(lo, hi)
        .filter(|&n| in_annulus(n, lambda, width))
        .collect();
    if shells.is_empty() {
        return Err(Error::EmptyAnnulus { lambda, width });
    }
    let mut sum = Neumaier::default();
    for &n in &shells {
        let d = n as f64 - lambda;
        sum.add(table.r3(n).unwrap() as f64 / (d * d));
    }
    Ok((sum.value(), shells))
}

/// Integer range that can contain `|n - λ| < L`.
pub fn annulus_bounds(lambda: f64, width: f64) -> (u64, u64) {
    let lo = (lambda - width).floor().max(0.0) as u64;
    let hi = (lambda + width).ceil().max(0.0) as u64;
    (lo, hi)
}

#[inline]
pub fn in_annulus(n: u64, lambda: f64, width: f64) -> bool {
    (n as f64 - lambda).abs() < width
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenCoefficient {
    pub xi: [i64; 3],
    pub n: u64,
    pub value: Complex64,
}

/// Fourier data of `G_{λ,L}` together with both norms.
#[derive(Debug, Clone)]
pub struct TruncatedGreen {
    pub lambda: f64,
    pub width: f64,
    pub x0: TorusPoint,
    /// Sorted by shell, then lexicographically.
    pub coeffs: Vec<GreenCoefficient>,
    /// `‖G_{λ,L}‖₂²` from the coefficients, `(2π)³ ∑ |Ĝ(ξ)|²`.
    pub norm_trunc_sq: f64,
    /// The same norm regrouped by shells, `(1/8π³) ∑ r3(n)/(n-λ)²`.
    pub norm_trunc_sq_shells: f64,
    /// `‖G_λ‖₂²`, tail corrected.
    pub norm_full_sq: f64,
}

/// Relative agreement demanded between point and shell norms.
pub const PARSEVAL_TOL: f64 = 1e-12;

pub fn build_truncated(
    norms: &GreenNorms<'_>,
    lambda: f64,
    width: f64,
    x0: TorusPoint,
) -> Result<TruncatedGreen> {
    if !(width > 0.0) {
        return Err(Error::Parameter(format!("annulus width must be positive, got {width}")));
    }
    let table = norms.table();
    let (shell_sum, shells) = annulus_shell_sum(table, lambda, width)?;
    let mut coeffs = Vec::new();
    for &n in &shells {
        let d = n as f64 - lambda;
        for p in sphere_points(n) {
            let xi = p.as_array();
            let phase = -(xi[0] as f64 * x0[0] + xi[1] as f64 * x0[1] + xi[2] as f64 * x0[2]);
            let value = Complex64::from_polar(-1.0 / (TORUS_VOLUME * d), phase);
            coeffs.push(GreenCoefficient { xi, n, value });
        }
    }
    let mut point_sum = Neumaier::default();
    for c in &coeffs {
        point_sum.add(c.value.norm_sqr());
    }
    let norm_trunc_sq = TORUS_VOLUME * point_sum.value();
    let norm_trunc_sq_shells = shell_sum / TORUS_VOLUME;
    let rel = (norm_trunc_sq - norm_trunc_sq_shells).abs() / norm_trunc_sq_shells;
    if rel > PARSEVAL_TOL {
        return Err(Error::Domain(format!(
            "point and shell norms disagree by {rel:e} at lambda = {lambda}"
        )));
    }
    let norm_full_sq = norms.norm_sq(lambda)?;
    Ok(TruncatedGreen {
        lambda,
        width,
        x0,
        coeffs,
        norm_trunc_sq,
        norm_trunc_sq_shells,
        norm_full_sq,
    })
}

impl TruncatedGreen {
    /// `‖G_{λ,L}‖ / ‖G_λ‖`.
    pub fn norm_ratio(&self) -> f64 {
        (self.norm_trunc_sq_shells / self.norm_full_sq).sqrt()
    }

    /// `‖g_λ - g_{λ,L}‖₂`, using `⟨G_λ, G_{λ,L}⟩ = ‖G_{λ,L}‖²`.
    pub fn truncation_distance(&self) -> f64 {
        distance_from_ratio(self.norm_ratio())
    }

    /// `⟨G_λ, G_{λ,L}⟩` from the coefficients. `G_{λ,L}` is the frequency
    /// restriction of `G_λ`, so `Ĝ_λ` coincides with the stored values on the
    /// support and the pairing only sees the annulus.
    pub fn projection_inner(&self) -> Complex64 {
        let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
        for c in &self.coeffs {
            let d = c.n as f64 - self.lambda;
            let phase = -(c.xi[0] as f64 * self.x0[0]
                + c.xi[1] as f64 * self.x0[1]
                + c.xi[2] as f64 * self.x0[2]);
            let term = Complex64::from_polar(-1.0 / (TORUS_VOLUME * d), phase) * c.value.conj();
            re.add(term.re);
            im.add(term.im);
        }
        Complex64::new(re.value(), im.value()) * TORUS_VOLUME
    }
}

/// `√(2 - 2r)` for `r = ‖G_{λ,L}‖/‖G_λ‖`, clamped at zero.
pub fn distance_from_ratio(ratio: f64) -> f64 {
    (2.0 - 2.0 * ratio).max(0.0).sqrt()
}

/// `‖g_λ - g_{λ,L}‖₂` from shell sums alone.
pub fn truncation_distance(norms: &GreenNorms<'_>, lambda: f64, width: f64) -> Result<f64> {
    let (shell_sum, _) = annulus_shell_sum(norms.table(), lambda, width)?;
    let full = norms.norm_sq(lambda)?;
    Ok(distance_from_ratio((shell_sum / TORUS_VOLUME / full).sqrt()))
}

/// `g_{λ,L}(x) = G_{λ,L}(x) / ‖G_{λ,L}‖`.
pub fn evaluate_g(tg: &TruncatedGreen, x: TorusPoint) -> Complex64 {
    let scale = 1.0 / tg.norm_trunc_sq.sqrt();
    tg.coeffs
        .iter()
        .map(|c| {
            let phase = c.xi[0] as f64 * x[0] + c.xi[1] as f64 * x[1] + c.xi[2] as f64 * x[2];
            c.value * Complex64::from_polar(1.0, phase)
        })
        .sum::<Complex64>()
        * scale
}
