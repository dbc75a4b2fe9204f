//! Toroidal quantization of band-limited symbols on `T^3 × S^2`.
//!
//! A [`BandSymbol`] is a finite combination of the basis symbols
//! `e_{ζ,l,m}(x, ξ) = Y_{l,m}(ξ/|ξ|) e^{iζ·x}` and acts by
//!
//! ```text
//! Op(a) f(x) = ∑_ξ e^{iξ·x} a(x, ξ) f̂(ξ).
//! ```
//!
//! `Y_{l,m}` is extended homogeneously to every `ξ ≠ 0`. At `ξ = 0` only the
//! `(l, m) = (0, 0)` modes are kept: `a(x, 0) = ∑_ζ c_{ζ,0,0} Y_{0,0} e^{iζ·x}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::green::{in_annulus, TruncatedGreen, TORUS_VOLUME};
use crate::harmonics::{Harmonic, HarmonicIndex};
use crate::lattice_arith::{is_sum_of_three_squares, sphere_points};
use crate::quadrature::SphereGrid;
use crate::series::ShellSeries;
use crate::{Error, Result, TorusPoint};

/// `Y_{0,0} = 1/(2√π)`.
pub const Y00: f64 = 0.28209479177387814;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub zeta: [i64; 3],
    pub harmonic: HarmonicIndex,
}

impl ModeIndex {
    pub fn new(zeta: [i64; 3], l: u32, m: i32) -> Result<Self> {
        Ok(Self {
            zeta,
            harmonic: HarmonicIndex::new(l, m)?,
        })
    }

    pub fn zeta_norm_sq(&self) -> i64 {
        self.zeta.iter().map(|z| z * z).sum()
    }
}

/// Finite table of coefficients `c_{ζ,l,m}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BandSymbol {
    modes: BTreeMap<ModeIndex, Complex64>,
}

impl BandSymbol {
    pub fn new() -> Self {
        Self::default()
    }

    /// `a ≡ 1`, i.e. `c_{0,0,0} = 2√π`.
    pub fn identity() -> Self {
        let mut s = Self::new();
        s.add(ModeIndex::new([0; 3], 0, 0).unwrap(), Complex64::new(1.0 / Y00, 0.0));
        s
    }

    /// The single basis symbol `e_{ζ,l,m}`.
    pub fn basis(zeta: [i64; 3], l: u32, m: i32) -> Result<Self> {
        let mut s = Self::new();
        s.add(ModeIndex::new(zeta, l, m)?, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    pub fn add(&mut self, mode: ModeIndex, c: Complex64) {
        *self.modes.entry(mode).or_default() += c;
    }

    pub fn coeff(&self, mode: &ModeIndex) -> Complex64 {
        self.modes.get(mode).copied().unwrap_or_default()
    }

    pub fn modes(&self) -> impl Iterator<Item = (&ModeIndex, &Complex64)> {
        self.modes.iter()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Drops coefficients with `|c| ≤ tol`.
    pub fn prune(&mut self, tol: f64) {
        self.modes.retain(|_, c| c.norm() > tol);
    }

    pub fn is_multiplier(&self) -> bool {
        self.modes.keys().all(|k| k.zeta == [0; 3])
    }

    /// Mode `(-ζ, l, -m)` with coefficient `(-1)^{l+m} conj(c)`. Its matrix
    /// elements against any `g_{λ,L}` are the complex conjugates of the
    /// original ones.
    pub fn conjugate_reflected(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.modes {
            let h = k.harmonic;
            let sign = if (h.l as i64 + h.m as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let mode = ModeIndex {
                zeta: [-k.zeta[0], -k.zeta[1], -k.zeta[2]],
                harmonic: HarmonicIndex { l: h.l, m: -h.m },
            };
            out.add(mode, c.conj() * sign);
        }
        out
    }

    /// `a(x, u)` for a unit direction `u`.
    pub fn eval_direction(&self, x: TorusPoint, u: [f64; 3]) -> Complex64 {
        self.modes
            .iter()
            .map(|(k, c)| {
                let y = Harmonic::new(k.harmonic).eval_unit(u);
                c * y * Complex64::from_polar(1.0, dot_f(k.zeta, x))
            })
            .sum()
    }

    /// `a(x, ξ)` on the lattice, with the `ξ = 0` rule applied.
    pub fn eval_lattice(&self, x: TorusPoint, xi: [i64; 3]) -> Complex64 {
        self.modes
            .iter()
            .map(|(k, c)| c * mode_value(k.harmonic, xi) * Complex64::from_polar(1.0, dot_f(k.zeta, x)))
            .sum()
    }

    pub fn to_file(&self) -> SymbolFile {
        SymbolFile {
            modes: self
                .modes
                .iter()
                .map(|(k, c)| ModeEntry {
                    zeta: k.zeta,
                    l: k.harmonic.l,
                    m: k.harmonic.m,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &SymbolFile) -> Result<Self> {
        let mut s = Self::new();
        for e in &file.modes {
            s.add(ModeIndex::new(e.zeta, e.l, e.m)?, Complex64::new(e.re, e.im));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read symbol file {}: {e}", path.display())))?;
        let file: SymbolFile = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("bad symbol file {}: {e}", path.display())))?;
        Self::from_file(&file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_file())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// On-disk form: `{"modes": [{"zeta": [z1, z2, z3], "l": L, "m": M, "re": r, "im": i}, …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub modes: Vec<ModeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub zeta: [i64; 3],
    pub l: u32,
    pub m: i32,
    pub re: f64,
    pub im: f64,
}

#[inline]
fn dot_f(z: [i64; 3], x: TorusPoint) -> f64 {
    z[0] as f64 * x[0] + z[1] as f64 * x[1] + z[2] as f64 * x[2]
}

/// `Y_{l,m}(ξ/|ξ|)`, or the zero-mode rule at `ξ = 0`.
fn mode_value(h: HarmonicIndex, xi: [i64; 3]) -> Complex64 {
    if xi == [0; 3] {
        if h.l == 0 {
            Complex64::new(Y00, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else {
        Harmonic::new(h).eval_lattice(xi)
    }
}

/// Trigonometric polynomial given by its Fourier coefficients, with the
/// convention `f(x) = ∑ f̂(ξ) e^{iξ·x}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BandFunction {
    pub fourier: BTreeMap<[i64; 3], Complex64>,
}

impl BandFunction {
    /// `‖f‖₂² = (2π)³ ∑ |f̂|²`.
    pub fn norm_sq(&self) -> f64 {
        TORUS_VOLUME * self.fourier.values().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `⟨f, h⟩ = ∫ f conj(h)`.
    pub fn inner(&self, other: &BandFunction) -> Complex64 {
        self.fourier
            .iter()
            .filter_map(|(k, a)| other.fourier.get(k).map(|b| a * b.conj()))
            .sum::<Complex64>()
            * TORUS_VOLUME
    }

    pub fn eval(&self, x: TorusPoint) -> Complex64 {
        self.fourier
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, dot_f(*k, x)))
            .sum()
    }

    /// `g_{λ,L}` as a band function.
    pub fn from_truncated(tg: &TruncatedGreen) -> Self {
        let scale = 1.0 / tg.norm_trunc_sq.sqrt();
        Self {
            fourier: tg.coeffs.iter().map(|c| (c.xi, c.value * scale)).collect(),
        }
    }
}

/// `Op(a) f` on Fourier coefficients.
pub fn quantize_apply(sym: &BandSymbol, f: &BandFunction) -> BandFunction {
    let mut out: BTreeMap<[i64; 3], Complex64> = BTreeMap::new();
    let harmonics: Vec<(ModeIndex, Complex64, Harmonic)> = sym
        .modes()
        .map(|(k, c)| (*k, *c, Harmonic::new(k.harmonic)))
        .collect();
    for (xi, fv) in &f.fourier {
        for (k, c, h) in &harmonics {
            let y = if *xi == [0; 3] {
                mode_value(k.harmonic, *xi)
            } else {
                h.eval_lattice(*xi)
            };
            let eta = [xi[0] + k.zeta[0], xi[1] + k.zeta[1], xi[2] + k.zeta[2]];
            *out.entry(eta).or_default() += c * y * fv;
        }
    }
    BandFunction { fourier: out }
}

/// Lattice points of the annulus `||ξ|² - λ| < L`.
#[derive(Debug, Clone)]
pub struct Annulus {
    pub lambda: f64,
    pub width: f64,
    pub points: Vec<([i64; 3], u64)>,
    /// `∑_{ξ ∈ A} 1/(|ξ|² - λ)² = 8π³ ‖G_{λ,L}‖²`.
    pub norm_sum: f64,
}

impl Annulus {
    pub fn new(lambda: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Parameter(format!("annulus width must be positive, got {width}")));
        }
        ShellSeries::check_pole(lambda)?;
        let lo = (lambda - width).floor().max(0.0) as u64;
        let hi = (lambda + width).ceil().max(0.0) as u64;
        let mut points = Vec::new();
        for n in lo..=hi {
            if in_annulus(n, lambda, width) && is_sum_of_three_squares(n) {
                points.extend(sphere_points(n).into_iter().map(|p| (p.as_array(), n)));
            }
        }
        if points.is_empty() {
            return Err(Error::EmptyAnnulus { lambda, width });
        }
        let norm_sum = points
            .iter()
            .map(|(_, n)| {
                let d = *n as f64 - lambda;
                1.0 / (d * d)
            })
            .sum();
        Ok(Self {
            lambda,
            width,
            points,
            norm_sum,
        })
    }

    pub fn contains_norm(&self, n: u64) -> bool {
        in_annulus(n, self.lambda, self.width)
    }
}

/// Unnormalized pair sum `∑_{ξ, ξ+ζ ∈ A} Y(ξ/|ξ|) / ((|ξ|²-λ)(|ξ+ζ|²-λ))`.
pub fn mode_pair_sum(annulus: &Annulus, mode: &ModeIndex) -> Complex64 {
    let h = Harmonic::new(mode.harmonic);
    let lambda = annulus.lambda;
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, n) in &annulus.points {
        let eta = [xi[0] + mode.zeta[0], xi[1] + mode.zeta[1], xi[2] + mode.zeta[2]];
        let n2 = (eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]) as u64;
        if !annulus.contains_norm(n2) {
            continue;
        }
        let y = if *xi == [0; 3] {
            mode_value(mode.harmonic, *xi)
        } else {
            h.eval_lattice(*xi)
        };
        acc += y / ((*n as f64 - lambda) * (n2 as f64 - lambda));
    }
    acc
}

/// `⟨Op(a) g_{λ,L}, g_{λ,L}⟩` with `g_{λ,L}` centred at `x0`.
///
/// Each mode contributes `c e^{iζ·x0} / (8π³ ‖G_{λ,L}‖²)` times its pair sum.
pub fn matrix_element(sym: &BandSymbol, lambda: f64, width: f64, x0: TorusPoint) -> Result<Complex64> {
    let annulus = Annulus::new(lambda, width)?;
    Ok(matrix_element_on(sym, &annulus, x0))
}

pub fn matrix_element_on(sym: &BandSymbol, annulus: &Annulus, x0: TorusPoint) -> Complex64 {
    sym.modes()
        .map(|(k, c)| {
            c * Complex64::from_polar(1.0, dot_f(k.zeta, x0)) * mode_pair_sum(annulus, k)
        })
        .sum::<Complex64>()
        / annulus.norm_sum
}

/// `∫_{S*T³} a dμ = Y_{0,0} c_{0,0,0}`.
pub fn liouville_average(sym: &BandSymbol) -> Complex64 {
    sym.coeff(&ModeIndex::new([0; 3], 0, 0).unwrap()) * Y00
}

/// Quadrature resolution for [`symbol_project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionGrid {
    /// Uniform points per torus axis.
    pub torus: usize,
    /// Gauss–Legendre nodes in `cos θ`.
    pub n_theta: usize,
    /// Uniform azimuthal nodes.
    pub n_phi: usize,
}

impl ProjectionGrid {
    /// Smallest grid that is exact for symbols inside the `(N1, N2)` band.
    pub fn minimal(n1: u32, n2: u32) -> Self {
        Self {
            torus: 2 * n1 as usize + 1,
            n_theta: n2 as usize + 1,
            n_phi: 2 * n2 as usize + 1,
        }
    }
}

/// Projects a function on `T^3 × S^2` onto the modes `|ζ| ≤ N1`, `l ≤ N2`.
///
/// `a_ζ(u) = (1/8π³) ∫ a(x, u) e^{-iζ·x} dx` by the periodic trapezoid rule,
/// then `c_{ζ,l,m} = ∫_{S²} a_ζ conj(Y_{l,m}) dσ` by Gauss–Legendre times a
/// uniform azimuthal rule.
pub fn symbol_project<F>(sampler: F, n1: u32, n2: u32, grid: ProjectionGrid) -> Result<BandSymbol>
where
    F: Fn(TorusPoint, [f64; 3]) -> Complex64,
{
    let need = ProjectionGrid::minimal(n1, n2);
    if grid.torus < need.torus || grid.n_theta < need.n_theta || grid.n_phi < need.n_phi {
        return Err(Error::Parameter(format!(
            "grid {grid:?} is below the resolution {need:?} needed for N1 = {n1}, N2 = {n2}"
        )));
    }
    let n1i = n1 as i64;
    let zetas: Vec<[i64; 3]> = (-n1i..=n1i)
        .flat_map(|a| (-n1i..=n1i).flat_map(move |b| (-n1i..=n1i).map(move |c| [a, b, c])))
        .filter(|z| z[0] * z[0] + z[1] * z[1] + z[2] * z[2] <= n1i * n1i)
        .collect();
    let harmonics: Vec<Harmonic> = HarmonicIndex::all_up_to(n2).into_iter().map(Harmonic::new).collect();
    let sphere = SphereGrid::new(grid.n_theta, grid.n_phi);
    let m = grid.torus;
    let h = 2.0 * PI / m as f64;
    let xs: Vec<TorusPoint> = (0..m * m * m)
        .map(|i| [(i / (m * m)) as f64 * h, ((i / m) % m) as f64 * h, (i % m) as f64 * h])
        .collect();
    // e^{-iζ·x} for every grid point and ζ
    let phases: Vec<Vec<Complex64>> = zetas
        .iter()
        .map(|z| xs.iter().map(|x| Complex64::from_polar(1.0, -dot_f(*z, *x))).collect())
        .collect();
    let inv = 1.0 / xs.len() as f64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); zetas.len() * harmonics.len()];
    for (u, w) in sphere.points.iter().zip(&sphere.weights) {
        let samples: Vec<Complex64> = xs.iter().map(|x| sampler(*x, *u)).collect();
        let ys: Vec<Complex64> = harmonics.iter().map(|hm| hm.eval_unit(*u).conj()).collect();
        for (zi, ph) in phases.iter().enumerate() {
            let a_zeta: Complex64 = samples.iter().zip(ph).map(|(s, p)| s * p).sum::<Complex64>() * inv;
            for (hi, y) in ys.iter().enumerate() {
                coeffs[zi * harmonics.len() + hi] += a_zeta * y * w;
            }
        }
    }
    let mut sym = BandSymbol::new();
    for (zi, z) in zetas.iter().enumerate() {
        for (hi, hm) in harmonics.iter().enumerate() {
            sym.add(ModeIndex { zeta: *z, harmonic: hm.index() }, coeffs[zi * harmonics.len() + hi]);
        }
    }
    Ok(sym)
}

/// Operator norm of an `x`-independent symbol: `sup_{u ∈ S²} |a(u)|`.
///
/// A dense product grid locates the maximum, which is then polished by a
/// compass search in `(θ, φ)`. On band-limited functions `Op(a)` is
/// diagonal in Fourier space, so its norm there is bounded by this value.
pub fn multiplier_operator_norm(sym: &BandSymbol) -> Result<f64> {
    if !sym.is_multiplier() {
        return Err(Error::Parameter("multiplier norm needs a symbol with only ζ = 0 modes".into()));
    }
    let terms: Vec<(Complex64, Harmonic)> = sym.modes().map(|(k, c)| (*c, Harmonic::new(k.harmonic))).collect();
    let at = |theta: f64, phi: f64| {
        let u = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        terms.iter().map(|(c, h)| c * h.eval_unit(u)).sum::<Complex64>().norm()
    };
    let l_max = sym.modes().map(|(k, _)| k.harmonic.l).max().unwrap_or(0) as usize;
    let nt = 32 * (l_max + 1);
    let np = 2 * nt;
    let (mut bt, mut bp, mut best) = (0.0, 0.0, at(0.0, 0.0));
    for v in [at(PI, 0.0)] {
        if v > best {
            best = v;
            bt = PI;
        }
    }
    for i in 0..=nt {
        let t = PI * i as f64 / nt as f64;
        for j in 0..np {
            let p = 2.0 * PI * j as f64 / np as f64;
            let v = at(t, p);
            if v > best {
                (bt, bp, best) = (t, p, v);
            }
        }
    }
    let mut step = PI / nt as f64;
    while step > 1e-13 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = at(bt + dt, bp + dp);
            if v > best {
                (bt, bp, best) = (bt + dt, bp + dp, v);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(best)
}

/// `∑ |c_{ζ,l,m}| sup|Y_{l,m}|`, an upper bound for `‖Op(a)‖` since each
/// basis operator is a multiplier followed by a unitary shift.
pub fn operator_norm_bound(sym: &BandSymbol) -> f64 {
    sym.modes()
        .map(|(k, c)| c.norm() * Harmonic::new(k.harmonic).sup_norm())
        .sum()
}

/// `∑_{|α|≤2} sup |∂_x^α a|²` sampled on a torus grid times a sphere grid;
/// the right-hand side of the general `L²` bound without its constant.
pub fn l2_bound_rhs(sym: &BandSymbol, torus: usize, sphere: &SphereGrid) -> f64 {
    let mut alphas: Vec<[u32; 3]> = Vec::new();
    for a in 0..=2u32 {
        for b in 0..=2 - a {
            for c in 0..=2 - a - b {
                alphas.push([a, b, c]);
            }
        }
    }
    let h = 2.0 * PI / torus as f64;
    let modes: Vec<(ModeIndex, Complex64, Harmonic)> =
        sym.modes().map(|(k, c)| (*k, *c, Harmonic::new(k.harmonic))).collect();
    let mut sups = vec![0.0f64; alphas.len()];
    for u in &sphere.points {
        let ys: Vec<Complex64> = modes.iter().map(|(_, c, hm)| c * hm.eval_unit(*u)).collect();
        for i in 0..torus * torus * torus {
            let x = [(i / (torus * torus)) as f64 * h, ((i / torus) % torus) as f64 * h, (i % torus) as f64 * h];
            for (ai, al) in alphas.iter().enumerate() {
                let v: Complex64 = modes
                    .iter()
                    .zip(&ys)
                    .map(|((k, _, _), y)| {
                        let mut f = Complex64::new(1.0, 0.0);
                        for (j, &p) in al.iter().enumerate() {
                            f *= Complex64::new(0.0, k.zeta[j] as f64).powu(p);
                        }
                        y * f * Complex64::from_polar(1.0, dot_f(k.zeta, x))
                    })
                    .sum();
                sups[ai] = sups[ai].max(v.norm());
            }
        }
    }
    sups.iter().map(|s| s * s).sum()
}

/// Values of a function on the integer box `origin + [0, dims)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    pub origin: [i64; 3],
    pub dims: [usize; 3],
    pub values: Vec<Complex64>,
}

impl SymbolTable {
    pub fn from_fn<F: Fn([i64; 3]) -> Complex64>(origin: [i64; 3], dims: [usize; 3], f: F) -> Self {
        let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    values.push(f([origin[0] + i as i64, origin[1] + j as i64, origin[2] + k as i64]));
                }
            }
        }
        Self { origin, dims, values }
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, xi: [i64; 3]) -> Option<Complex64> {
        let mut idx = [0usize; 3];
        for a in 0..3 {
            let d = xi[a] - self.origin[a];
            if d < 0 || d as usize >= self.dims[a] {
                return None;
            }
            idx[a] = d as usize;
        }
        Some(self.values[self.offset(idx[0], idx[1], idx[2])])
    }

    /// Points of the box with their values.
    pub fn iter(&self) -> impl Iterator<Item = ([i64; 3], Complex64)> + '_ {
        (0..self.values.len()).map(move |p| {
            let k = p % self.dims[2];
            let j = (p / self.dims[2]) % self.dims[1];
            let i = p / (self.dims[1] * self.dims[2]);
            (
                [self.origin[0] + i as i64, self.origin[1] + j as i64, self.origin[2] + k as i64],
                self.values[p],
            )
        })
    }

    fn forward_difference(&self, axis: usize) -> Result<Self> {
        if self.dims[axis] < 2 {
            return Err(Error::Domain(format!("difference stencil exceeds the box along axis {axis}")));
        }
        let mut dims = self.dims;
        dims[axis] -= 1;
        let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let mut next = [i, j, k];
                    next[axis] += 1;
                    values.push(
                        self.values[self.offset(next[0], next[1], next[2])] - self.values[self.offset(i, j, k)],
                    );
                }
            }
        }
        Ok(Self {
            origin: self.origin,
            dims,
            values,
        })
    }
}

/// Iterated forward differences `Δ_ξ^α σ(ξ)`, `Δ_{ξ_j} σ(ξ) = σ(ξ + e_j) - σ(ξ)`.
/// The result lives on the box shrunk by `α`.
pub fn difference_symbol(table: &SymbolTable, alpha: [u32; 3]) -> Result<SymbolTable> {
    for a in 0..3 {
        if alpha[a] as usize >= table.dims[a] {
            return Err(Error::Domain(format!(
                "stencil of order {} exceeds box of size {} along axis {a}",
                alpha[a], table.dims[a]
            )));
        }
    }
    let mut out = table.clone();
    for (axis, &order) in alpha.iter().enumerate() {
        for _ in 0..order {
            out = out.forward_difference(axis)?;
        }
    }
    Ok(out)
}

/// `max |σ(ξ)|` over box points with `r_lo ≤ |ξ| ≤ r_hi`.
pub fn max_abs_in_shell(table: &SymbolTable, r_lo: f64, r_hi: f64) -> f64 {
    table
        .iter()
        .filter(|(xi, _)| {
            let r = ((xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) as f64).sqrt();
            r >= r_lo && r <= r_hi
        })
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max)
}
