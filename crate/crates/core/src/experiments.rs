//! Quantum-ergodicity sweeps: matrix elements of band-limited observables
//! against `g_{λ,L}` along an interlaced sequence, with Cesàro summaries.
//!
//! Rows are processed in chunks of nearby `λ`. For each chunk and each
//! observable mode the lattice points of the covered shells are visited once
//! and binned into shell-pair tables
//!
//! ```text
//! P(n, d) = ∑_{|ξ|²=n, |ξ+ζ|²=n+d} Y_{l,m}(ξ/|ξ|),
//! ```
//!
//! after which a row costs `O(L²)` instead of a pass over the annulus points.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::green::in_annulus;
use crate::harmonics::{weyl_sum, Harmonic, HarmonicIndex};
use crate::lattice_arith::{for_each_point_in_shells, ShellClass, ShellTable};
use crate::pdo::{liouville_average, matrix_element_on, Annulus, BandSymbol, ModeIndex, Y00};
use crate::spectrum::{build_sequence, SequenceEntry, SequenceKind};
use crate::{Error, Result, TorusPoint};

pub const MIN_QE_LAMBDA_MAX: f64 = 100.0;
/// Largest span of `|ξ|²` covered by one chunk of rows.
const CHUNK_SPAN: u64 = 4096;

#[derive(Debug, Clone)]
pub struct Observable {
    pub name: String,
    pub symbol: BandSymbol,
}

impl Observable {
    pub fn new(name: impl Into<String>, symbol: BandSymbol) -> Self {
        Self {
            name: name.into(),
            symbol,
        }
    }

    /// Loads a symbol file; the name is the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Config(format!("bad observable path {}", path.display())))?
            .to_string();
        Ok(Self::new(name, BandSymbol::load(path)?))
    }
}

/// Expands a list of files and directories into the `.json` observable files,
/// directories sorted by file name. Fails before loading if any path is missing.
pub fn collect_observable_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::Config(format!("cannot list {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::Config(format!("no .json observables in {}", p.display())));
            }
            out.extend(files);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(Error::Config(format!("observable {} does not exist", p.display())));
        }
    }
    Ok(out)
}

pub fn load_observables(paths: &[PathBuf]) -> Result<Vec<Observable>> {
    collect_observable_paths(paths)?
        .iter()
        .map(|p| Observable::load(p))
        .collect()
}

#[derive(Debug, Clone)]
pub struct QERunConfig {
    pub sequence: SequenceKind,
    pub lambda_max: f64,
    pub delta: f64,
    pub observables: Vec<Observable>,
    pub x0: TorusPoint,
}

impl QERunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.lambda_max >= MIN_QE_LAMBDA_MAX) {
            return Err(Error::Parameter(format!(
                "lambda_max must be at least {MIN_QE_LAMBDA_MAX}, got {}",
                self.lambda_max
            )));
        }
        if self.observables.is_empty() {
            return Err(Error::Parameter("at least one observable is required".into()));
        }
        if let SequenceKind::Secular(c) = &self.sequence {
            c.validate()?;
        }
        Ok(())
    }

    pub fn width(&self, lambda: f64) -> f64 {
        lambda.powf(self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QERow {
    pub lambda: f64,
    pub n_lambda: u64,
    pub class: Option<ShellClass>,
    pub in_lambda_infinity: bool,
    pub width: f64,
    pub empty: bool,
    /// One entry per observable; NaN on empty rows.
    pub elements: Vec<Complex64>,
    pub deviations: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub x: f64,
    pub count: usize,
    pub count_inf: usize,
    pub density: f64,
    /// Mean deviation over nonempty rows with `λ ≤ X`.
    pub s_all: f64,
    /// The same restricted to `Λ_∞`.
    pub s_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSummary {
    pub name: String,
    pub liouville: Complex64,
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone)]
pub struct QERunReport {
    pub rows: Vec<QERow>,
    pub summaries: Vec<ObservableSummary>,
}

impl QERunReport {
    pub fn summary(&self, name: &str) -> Option<&ObservableSummary> {
        self.summaries.iter().find(|s| s.name == name)
    }
}

/// `X = 10², 10³, …` below `lambda_max`, then `lambda_max` itself.
pub fn summary_ladder(lambda_max: f64) -> Vec<f64> {
    let mut ladder = Vec::new();
    let mut x = 100.0;
    while x < lambda_max {
        ladder.push(x);
        x *= 10.0;
    }
    ladder.push(lambda_max);
    ladder
}

/// Cesàro summaries of the `obs`-th deviation column.
pub fn summarize(rows: &[QERow], obs: usize, ladder: &[f64]) -> Vec<SummaryRow> {
    ladder
        .iter()
        .map(|&x| {
            let (mut count, mut count_inf) = (0usize, 0usize);
            let (mut sum_all, mut n_all, mut sum_inf, mut n_inf) = (0.0, 0usize, 0.0, 0usize);
            for r in rows.iter().take_while(|r| r.lambda <= x) {
                count += 1;
                count_inf += usize::from(r.in_lambda_infinity);
                if r.empty {
                    continue;
                }
                sum_all += r.deviations[obs];
                n_all += 1;
                if r.in_lambda_infinity {
                    sum_inf += r.deviations[obs];
                    n_inf += 1;
                }
            }
            let mean = |s: f64, n: usize| if n == 0 { f64::NAN } else { s / n as f64 };
            SummaryRow {
                x,
                count,
                count_inf,
                density: if count == 0 { 1.0 } else { count_inf as f64 / count as f64 },
                s_all: mean(sum_all, n_all),
                s_inf: mean(sum_inf, n_inf),
            }
        })
        .collect()
}

/// Shell-pair tables for one chunk of `|ξ|²` values.
struct PairTables {
    lo: u64,
    hi: u64,
    dmax: i64,
    r3: Vec<u32>,
    /// Per distinct mode: `ζ = 0` tables have one column, others `2 dmax + 1`.
    tables: Vec<Vec<Complex64>>,
}

impl PairTables {
    fn build(modes: &[ModeIndex], lo: u64, hi: u64, dmax: i64) -> Self {
        let span = (hi - lo + 1) as usize;
        let width = (2 * dmax + 1) as usize;
        let mut harmonics: Vec<HarmonicIndex> = modes.iter().map(|m| m.harmonic).collect();
        harmonics.sort();
        harmonics.dedup();
        let evals: Vec<Harmonic> = harmonics.iter().map(|h| Harmonic::new(*h)).collect();
        let slot: Vec<usize> = modes
            .iter()
            .map(|m| harmonics.binary_search(&m.harmonic).unwrap())
            .collect();
        let zsq: Vec<i64> = modes.iter().map(|m| m.zeta_norm_sq()).collect();
        let mut tables: Vec<Vec<Complex64>> = modes
            .iter()
            .map(|m| {
                let cols = if m.zeta == [0; 3] { 1 } else { width };
                vec![Complex64::new(0.0, 0.0); span * cols]
            })
            .collect();
        let mut r3 = vec![0u32; span];
        let mut ys = vec![Complex64::new(0.0, 0.0); evals.len()];
        for_each_point_in_shells(lo, hi, |xi, n| {
            let row = (n - lo) as usize;
            r3[row] += 1;
            if xi == [0; 3] {
                for (y, h) in ys.iter_mut().zip(&harmonics) {
                    *y = Complex64::new(if h.l == 0 { Y00 } else { 0.0 }, 0.0);
                }
            } else {
                let r = (n as f64).sqrt();
                let u = [xi[0] as f64 / r, xi[1] as f64 / r, xi[2] as f64 / r];
                for (y, h) in ys.iter_mut().zip(&evals) {
                    *y = h.eval_unit(u);
                }
            }
            for (k, m) in modes.iter().enumerate() {
                let y = ys[slot[k]];
                if m.zeta == [0; 3] {
                    tables[k][row] += y;
                } else {
                    let z = m.zeta;
                    let d = 2 * (xi[0] * z[0] + xi[1] * z[1] + xi[2] * z[2]) + zsq[k];
                    if d.abs() <= dmax {
                        let n2 = n as i64 + d;
                        if n2 >= lo as i64 && n2 <= hi as i64 {
                            tables[k][row * width + (d + dmax) as usize] += y;
                        }
                    }
                }
            }
        });
        Self {
            lo,
            hi,
            dmax,
            r3,
            tables,
        }
    }

    /// Unnormalized pair sum of mode `k` and the norm sum, or `None` if empty.
    fn row_sums(&self, modes: &[ModeIndex], lambda: f64, width: f64) -> Option<(Vec<Complex64>, f64)> {
        let lo = (lambda - width).floor().max(self.lo as f64) as u64;
        let hi = ((lambda + width).ceil() as u64).min(self.hi);
        let shells: Vec<u64> = (lo..=hi)
            .filter(|&n| self.r3[(n - self.lo) as usize] > 0 && in_annulus(n, lambda, width))
            .collect();
        if shells.is_empty() {
            return None;
        }
        let norm: f64 = shells
            .iter()
            .map(|&n| {
                let d = n as f64 - lambda;
                self.r3[(n - self.lo) as usize] as f64 / (d * d)
            })
            .sum();
        let cols = (2 * self.dmax + 1) as usize;
        let sums = modes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let t = &self.tables[k];
                let mut acc = Complex64::new(0.0, 0.0);
                for &n in &shells {
                    let row = (n - self.lo) as usize;
                    let dn = n as f64 - lambda;
                    if m.zeta == [0; 3] {
                        acc += t[row] / (dn * dn);
                    } else {
                        for &n2 in &shells {
                            let d = n2 as i64 - n as i64;
                            if d.abs() > self.dmax {
                                continue;
                            }
                            let p = t[row * cols + (d + self.dmax) as usize];
                            if p != Complex64::new(0.0, 0.0) {
                                acc += p / (dn * (n2 as f64 - lambda));
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        Some((sums, norm))
    }
}

fn row_bounds(e: &SequenceEntry, width: f64) -> (u64, u64) {
    let lo = (e.lambda - width).floor().max(0.0) as u64;
    let hi = (e.lambda + width).ceil().max(0.0) as u64;
    (lo, hi)
}

/// Runs the sweep over an explicit list of sequence entries, sorted by `λ`.
pub fn run_qe_on(entries: &[SequenceEntry], config: &QERunConfig) -> Result<QERunReport> {
    config.validate()?;
    if entries.windows(2).any(|w| w[0].lambda > w[1].lambda) {
        return Err(Error::Parameter("sequence entries must be sorted by lambda".into()));
    }
    let mut modes: Vec<ModeIndex> = config
        .observables
        .iter()
        .flat_map(|o| o.symbol.modes().map(|(k, _)| *k))
        .collect();
    modes.sort();
    modes.dedup();
    for e in entries {
        crate::series::ShellSeries::check_pole(e.lambda)?;
    }

    let mut rows = Vec::with_capacity(entries.len());
    let mut i = 0;
    while i < entries.len() {
        let w0 = config.width(entries[i].lambda);
        let (lo, mut hi) = row_bounds(&entries[i], w0);
        let mut j = i + 1;
        let mut wmax = w0;
        while j < entries.len() {
            let w = config.width(entries[j].lambda);
            let (_, h) = row_bounds(&entries[j], w);
            if h - lo > CHUNK_SPAN {
                break;
            }
            hi = hi.max(h);
            wmax = wmax.max(w);
            j += 1;
        }
        let dmax = (2.0 * wmax).ceil() as i64;
        let tables = PairTables::build(&modes, lo, hi, dmax);
        let chunk: Vec<QERow> = entries[i..j]
            .par_iter()
            .map(|e| qe_row(e, config, &modes, &tables))
            .collect();
        rows.extend(chunk);
        i = j;
    }

    let ladder = summary_ladder(config.lambda_max);
    let summaries = config
        .observables
        .iter()
        .enumerate()
        .map(|(k, o)| ObservableSummary {
            name: o.name.clone(),
            liouville: liouville_average(&o.symbol),
            rows: summarize(&rows, k, &ladder),
        })
        .collect();
    Ok(QERunReport { rows, summaries })
}

fn qe_row(e: &SequenceEntry, config: &QERunConfig, modes: &[ModeIndex], tables: &PairTables) -> QERow {
    let width = config.width(e.lambda);
    let class = crate::lattice_arith::classify(e.n_lambda).ok();
    let n_obs = config.observables.len();
    let (elements, deviations, empty) = match tables.row_sums(modes, e.lambda, width) {
        None => (vec![Complex64::new(f64::NAN, f64::NAN); n_obs], vec![f64::NAN; n_obs], true),
        Some((sums, norm)) => {
            let mut elements = Vec::with_capacity(n_obs);
            let mut deviations = Vec::with_capacity(n_obs);
            for o in &config.observables {
                let mut v = Complex64::new(0.0, 0.0);
                for (k, c) in o.symbol.modes() {
                    let idx = modes.binary_search(k).unwrap();
                    let x0 = config.x0;
                    let phase = k.zeta[0] as f64 * x0[0] + k.zeta[1] as f64 * x0[1] + k.zeta[2] as f64 * x0[2];
                    v += c * Complex64::from_polar(1.0, phase) * sums[idx];
                }
                v /= norm;
                deviations.push((v - liouville_average(&o.symbol)).norm());
                elements.push(v);
            }
            (elements, deviations, false)
        }
    };
    QERow {
        lambda: e.lambda,
        n_lambda: e.n_lambda,
        class,
        in_lambda_infinity: e.in_lambda_infinity,
        width,
        empty,
        elements,
        deviations,
    }
}

/// Builds the sequence named in the config and runs the sweep. `table` is
/// only consulted for secular sequences.
pub fn run_qe(config: &QERunConfig, table: &ShellTable) -> Result<QERunReport> {
    config.validate()?;
    let seq = build_sequence(&config.sequence, config.lambda_max, table)?;
    run_qe_on(&seq.entries, config)
}

/// Matrix element of `e_{0,l,m}` computed point by point, compared with the
/// Weyl-sum regrouping `∑_{|n-λ|<L} W_{l,m}(n)/(n-λ)² / ∑ r3(n)/(n-λ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regrouping {
    pub element: Complex64,
    pub shell_form: Complex64,
    /// `|element - shell_form|` divided by the absolute sum
    /// `∑_ξ |Y(ξ/|ξ|)|/(|ξ|²-λ)² / ∑ r3/(n-λ)²`, the natural scale of
    /// rounding in either sum.
    pub residual: f64,
}

pub fn weyl_vs_element_consistency(l: u32, m: i32, lambda: f64, delta: f64) -> Result<Regrouping> {
    let idx = HarmonicIndex::new(l, m)?;
    let annulus = Annulus::new(lambda, lambda.powf(delta))?;
    let sym = BandSymbol::basis([0; 3], l, m)?;
    let element = matrix_element_on(&sym, &annulus, [0.0; 3]);
    let h = Harmonic::new(idx);
    let mut shells: BTreeMap<u64, ()> = BTreeMap::new();
    let mut scale = 0.0;
    for (xi, n) in &annulus.points {
        shells.insert(*n, ());
        let d = *n as f64 - lambda;
        let y = if *xi == [0; 3] { Complex64::new(if l == 0 { Y00 } else { 0.0 }, 0.0) } else { h.eval_lattice(*xi) };
        scale += y.norm() / (d * d);
    }
    let mut shell_form = Complex64::new(0.0, 0.0);
    for &n in shells.keys() {
        let d = n as f64 - lambda;
        shell_form += shell_weyl(idx, n)? / (d * d);
    }
    shell_form /= annulus.norm_sum;
    scale /= annulus.norm_sum;
    let residual = if scale == 0.0 { 0.0 } else { (element - shell_form).norm() / scale };
    Ok(Regrouping {
        element,
        shell_form,
        residual,
    })
}

/// `W_{l,m}(n)` with the zero-mode rule at `n = 0`.
fn shell_weyl(idx: HarmonicIndex, n: u64) -> Result<Complex64> {
    if n == 0 {
        Ok(Complex64::new(if idx.l == 0 { Y00 } else { 0.0 }, 0.0))
    } else {
        weyl_sum(idx, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellSplit {
    pub n_lambda: u64,
    /// `W(n_λ)/(n_λ-λ)²`, normalized by the norm sum.
    pub near_term: Complex64,
    /// The other shells of the annulus, normalized the same way.
    pub far_sum: Complex64,
    /// `|W(n_λ)| / r3(n_λ)`.
    pub weyl_ratio: f64,
}

/// Splits the `ζ = 0` shell sum into the nearest-shell term and the rest.
pub fn dominant_shell_split(l: u32, m: i32, lambda: f64, delta: f64) -> Result<ShellSplit> {
    let idx = HarmonicIndex::new(l, m)?;
    let annulus = Annulus::new(lambda, lambda.powf(delta))?;
    let mut r3: BTreeMap<u64, u32> = BTreeMap::new();
    for (_, n) in &annulus.points {
        *r3.entry(*n).or_default() += 1;
    }
    let n_lambda = *r3
        .keys()
        .min_by(|a, b| {
            let da = (**a as f64 - lambda).abs();
            let db = (**b as f64 - lambda).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(b))
        })
        .unwrap();
    let (mut near, mut far) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut weyl_ratio = 0.0;
    for (&n, &count) in &r3 {
        let d = n as f64 - lambda;
        let w = shell_weyl(idx, n)?;
        if n == n_lambda {
            near = w / (d * d);
            weyl_ratio = w.norm() / count as f64;
        } else {
            far += w / (d * d);
        }
    }
    Ok(ShellSplit {
        n_lambda,
        near_term: near / annulus.norm_sum,
        far_sum: far / annulus.norm_sum,
        weyl_ratio,
    })
}
