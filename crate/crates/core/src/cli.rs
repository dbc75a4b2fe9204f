//! Command-line front end: argument parsing, CSV writers and readers, and run
//! manifests.
//!
//! Every CSV starts with a `#` comment naming the subcommand and the SHA-256
//! of the parameter snapshot; a `<out>.manifest.json` next to it records the
//! full command line, parameters, tolerances, timing and the SHA-256 of the
//! CSV itself. Numbers are written with 17 significant digits.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::experiments::{load_observables, run_qe, QERunConfig};
use crate::green::{build_truncated, GreenNorms};
use crate::harmonics::{weyl_profile, HarmonicIndex};
use crate::lattice_arith::{ShellTable, DEFAULT_MEMORY_BUDGET};
use crate::pdo::{liouville_average, matrix_element, BandSymbol};
use crate::spectrum::{build_sequence, density_of_subsequence, solve_spectrum, ScattererConfig, SequenceKind};
use crate::{Error, Result, TorusPoint};

pub const THREADS_ENV: &str = "SCATTER3D_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "scatter3d", version, about = "Point scatterer on the 3-torus: spectra, Green's functions, Weyl sums and matrix elements")]
pub struct Cli {
    /// key=value file; keys are long flag names of the subcommand. Flags on
    /// the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Cap on the r3 sieve allocation, in bytes.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMORY_BUDGET)]
    pub memory_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// r3(n) and the good/bad classification for 0 ≤ n ≤ X.
    Density(DensityArgs),
    /// Perturbed eigenvalues λ_0 … λ_K.
    Spectrum(SpectrumArgs),
    /// Interlaced sequence with shell tags.
    Sequence(SequenceArgs),
    /// Full and truncated Green's function norms.
    GreenNorms(GreenNormsArgs),
    /// Weyl sums W_{l,m}(n) over shells.
    Weyl(WeylArgs),
    /// ⟨Op(a) g_{λ,L}, g_{λ,L}⟩ for a symbol file.
    MatrixElement(MatrixElementArgs),
    /// Matrix elements of observables along an interlaced sequence.
    Qe(QeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub x_max: u64,
    #[arg(long, default_value = "density.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long)]
    pub k_max: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub tail_nmax: u64,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, default_value = "spectrum.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Midpoint,
    Secular,
}

#[derive(Debug, Args, Serialize)]
pub struct SequenceArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub tail_nmax: u64,
    #[arg(long, default_value = "sequence.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GreenNormsArgs {
    /// Comma-separated values, or `start:step:stop`.
    #[arg(long)]
    pub lambda_list: String,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub tail_nmax: u64,
    #[arg(long, default_value = "green_norms.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct WeylArgs {
    #[arg(long)]
    pub l: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub m: i32,
    #[arg(long)]
    pub n_max: u64,
    /// Report the real harmonic √2 (-1)^m Re/Im Y_{l,|m|} in W_re, W_im = 0.
    #[arg(long)]
    pub real: bool,
    #[arg(long, default_value = "weyl.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MatrixElementArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, value_parser = parse_point, default_value = "0,0,0", allow_hyphen_values = true)]
    pub x0: TorusPoint,
    /// Optional one-row CSV; the value is always printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct QeArgs {
    #[arg(long, value_enum, default_value = "midpoint")]
    pub sequence: KindArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    /// Symbol files or directories of them.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub observables: Vec<PathBuf>,
    #[arg(long, value_parser = parse_point, default_value = "0,0,0", allow_hyphen_values = true)]
    pub x0: TorusPoint,
    #[arg(long, default_value_t = 1_000_000)]
    pub tail_nmax: u64,
    #[arg(long, default_value = "qe.csv")]
    pub out: PathBuf,
}

fn parse_point(s: &str) -> std::result::Result<TorusPoint, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut p = [0.0; 3];
    for (v, t) in p.iter_mut().zip(parts) {
        *v = t.trim().parse().map_err(|e| format!("bad coordinate `{t}`: {e}"))?;
    }
    Ok(p)
}

/// `a,b,c` or `start:step:stop` (inclusive of `stop` up to rounding).
pub fn parse_lambda_list(s: &str) -> Result<Vec<f64>> {
    let bad = |e: &dyn std::fmt::Display| Error::Parameter(format!("bad lambda list `{s}`: {e}"));
    if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(&e))?;
        let [start, step, stop] = parts[..] else {
            return Err(bad(&"range needs start:step:stop"));
        };
        if !(step > 0.0) || stop < start {
            return Err(bad(&"range needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| bad(&e)))
            .collect()
    }
}

/// Record of one invocation, written as `<out>.manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub params_sha256: String,
    pub sieve_cutoffs: BTreeMap<String, u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// `foo.csv` → `foo_<suffix>.csv`.
pub fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV body under construction.
pub struct CsvOut {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvOut {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self, comment: &str) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        writeln!(buf, "# {comment}")?;
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// A CSV read back: the `#` comment, headers and string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comment: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (comment, body) = match text.strip_prefix("# ") {
            Some(rest) => {
                let end = rest.find('\n').unwrap_or(rest.len());
                (rest[..end].to_string(), &rest[(end + 1).min(rest.len())..])
            }
            None => (String::new(), text),
        };
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let headers = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { comment, headers, rows })
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("no column `{name}`")))
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[i].parse::<f64>()
                    .map_err(|e| Error::Config(format!("column `{name}`: bad number `{}`: {e}", r[i])))
            })
            .collect()
    }
}

struct Run<'a> {
    argv: &'a [String],
    subcommand: &'static str,
    parameters: serde_json::Value,
    params_sha256: String,
    sieve_cutoffs: BTreeMap<String, u64>,
    tolerances: BTreeMap<String, f64>,
    started: Instant,
    artifacts: Vec<Artifact>,
}

impl<'a> Run<'a> {
    fn new<P: Serialize>(argv: &'a [String], subcommand: &'static str, params: &P) -> Result<Self> {
        let parameters = serde_json::to_value(params)?;
        // output locations do not change results, so they stay out of the hash
        let mut hashed = parameters.clone();
        if let Some(obj) = hashed.as_object_mut() {
            obj.remove("out");
        }
        let params_sha256 = sha256_hex(serde_json::to_string(&hashed)?.as_bytes());
        Ok(Self {
            argv,
            subcommand,
            parameters,
            params_sha256,
            sieve_cutoffs: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            started: Instant::now(),
            artifacts: Vec::new(),
        })
    }

    fn write_csv(&mut self, path: &Path, csv: &CsvOut) -> Result<()> {
        let comment = format!("scatter3d {} params-sha256={}", self.subcommand, self.params_sha256);
        let bytes = csv.to_bytes(&comment)?;
        std::fs::write(path, &bytes)?;
        self.artifacts.push(Artifact {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    fn finish(self, primary: &Path) -> Result<()> {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: self.argv.to_vec(),
            subcommand: self.subcommand.to_string(),
            parameters: self.parameters,
            params_sha256: self.params_sha256,
            sieve_cutoffs: self.sieve_cutoffs,
            tolerances: self.tolerances,
            threads: rayon::current_num_threads(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            artifacts: self.artifacts,
        };
        std::fs::write(manifest_path(primary), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(())
    }
}

fn bool01(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn sieve(x: u64, budget: u64, run: &mut Run<'_>) -> Result<ShellTable> {
    run.sieve_cutoffs.insert("r3_sieve".into(), x);
    ShellTable::sieve(x, budget)
}

fn cmd_density(a: &DensityArgs, budget: u64, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "density", a)?;
    let table = sieve(a.x_max, budget, &mut run)?;
    let mut csv = CsvOut::new(&["n", "a", "n1", "in_n3", "r3", "class"]);
    for n in 0..=a.x_max {
        let r = table.record(n).unwrap();
        csv.push(vec![
            n.to_string(),
            r.a.to_string(),
            r.n1.to_string(),
            bool01(r.in_n3),
            r.r3.to_string(),
            r.class.map_or("none", |c| c.as_str()).to_string(),
        ]);
    }
    run.write_csv(&a.out, &csv)?;
    let counts = table.bad_count(a.x_max);
    let mut c = CsvOut::new(&["X", "bad_count", "bound"]);
    c.push(vec![counts.x.to_string(), counts.count.to_string(), fmt_f64(counts.bound)]);
    run.write_csv(&sibling_path(&a.out, "counts"), &c)?;
    println!("X = {}: bad_count = {}, bound = {:.6}", counts.x, counts.count, counts.bound);
    run.finish(&a.out)
}

fn scatterer(phi: f64, tail_nmax: u64, tol: f64) -> ScattererConfig {
    ScattererConfig {
        phi,
        tail_cutoff_nmax: tail_nmax,
        tol_lambda: tol,
        ..ScattererConfig::default()
    }
}

fn cmd_spectrum(a: &SpectrumArgs, budget: u64, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "spectrum", a)?;
    let cfg = scatterer(a.phi, a.tail_nmax, a.tol);
    cfg.validate()?;
    let table = sieve(a.tail_nmax, budget, &mut run)?;
    run.tolerances.insert("tol_lambda".into(), a.tol);
    let spec = solve_spectrum(&table, &cfg, a.k_max)?;
    let mut csv = CsvOut::new(&["k", "lambda", "bracket_lo", "bracket_hi", "residual"]);
    for e in &spec.lambdas {
        csv.push(vec![
            e.k.to_string(),
            fmt_f64(e.lambda),
            fmt_f64(e.bracket_lo),
            fmt_f64(e.bracket_hi),
            fmt_f64(e.residual),
        ]);
    }
    run.write_csv(&a.out, &csv)?;
    println!("{} eigenvalues, c0 = {:.15}", spec.lambdas.len(), spec.c0);
    run.finish(&a.out)
}

fn sequence_kind(kind: KindArg, phi: f64, tail_nmax: u64) -> SequenceKind {
    match kind {
        KindArg::Midpoint => SequenceKind::Midpoint,
        KindArg::Secular => SequenceKind::Secular(scatterer(phi, tail_nmax, 1e-13)),
    }
}

fn sequence_table(kind: &SequenceKind, budget: u64, run: &mut Run<'_>) -> Result<ShellTable> {
    match kind {
        SequenceKind::Secular(c) => {
            c.validate()?;
            sieve(c.tail_cutoff_nmax, budget, run)
        }
        SequenceKind::Midpoint => ShellTable::sieve(0, budget),
    }
}

fn cmd_sequence(a: &SequenceArgs, budget: u64, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "sequence", a)?;
    let kind = sequence_kind(a.kind, a.phi, a.tail_nmax);
    let table = sequence_table(&kind, budget, &mut run)?;
    let seq = build_sequence(&kind, a.lambda_max, &table)?;
    let mut csv = CsvOut::new(&["lambda", "n_lambda", "class", "in_lambda_inf"]);
    for e in &seq.entries {
        let class = crate::lattice_arith::classify(e.n_lambda).ok();
        csv.push(vec![
            fmt_f64(e.lambda),
            e.n_lambda.to_string(),
            class.map_or("none", |c| c.as_str()).to_string(),
            bool01(e.in_lambda_infinity),
        ]);
    }
    run.write_csv(&a.out, &csv)?;
    let dens = density_of_subsequence(&seq)?;
    let mut d = CsvOut::new(&["X", "count", "count_inf", "density"]);
    for r in &dens.rows {
        d.push(vec![fmt_f64(r.x), r.count.to_string(), r.count_inf.to_string(), fmt_f64(r.density)]);
    }
    run.write_csv(&sibling_path(&a.out, "density"), &d)?;
    println!("{} entries, density of the good subsequence {:.6}", seq.entries.len(), dens.headline);
    run.finish(&a.out)
}

fn cmd_green_norms(a: &GreenNormsArgs, budget: u64, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "green-norms", a)?;
    let lambdas = parse_lambda_list(&a.lambda_list)?;
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1), got {}", a.delta)));
    }
    let table = sieve(a.tail_nmax, budget, &mut run)?;
    let lmax = lambdas.iter().cloned().fold(0.0, f64::max);
    let near = ((4.0 * lmax).ceil() as u64).max(1000).min(a.tail_nmax);
    let norms = GreenNorms::new(&table, a.tail_nmax, near)?;
    let mut csv = CsvOut::new(&["lambda", "n_lambda", "class", "norm_full_sq", "norm_trunc_sq", "distance"]);
    for &lambda in &lambdas {
        let e = crate::spectrum::SequenceEntry::tagged(lambda)?;
        let tg = build_truncated(&norms, lambda, lambda.powf(a.delta), [0.0; 3])?;
        let class = crate::lattice_arith::classify(e.n_lambda).ok();
        csv.push(vec![
            fmt_f64(lambda),
            e.n_lambda.to_string(),
            class.map_or("none", |c| c.as_str()).to_string(),
            fmt_f64(tg.norm_full_sq),
            fmt_f64(tg.norm_trunc_sq),
            fmt_f64(tg.truncation_distance()),
        ]);
    }
    run.write_csv(&a.out, &csv)?;
    println!("{} rows", lambdas.len());
    run.finish(&a.out)
}

fn cmd_weyl(a: &WeylArgs, budget: u64, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "weyl", a)?;
    let table = sieve(a.n_max, budget, &mut run)?;
    let idx = HarmonicIndex::new(a.l, a.m.abs())?;
    let HarmonicIndex { l, m } = HarmonicIndex::new(a.l, a.m)?;
    let profile = weyl_profile(&table, if a.real { idx } else { HarmonicIndex { l, m } }, a.n_max)?;
    let mut csv = CsvOut::new(&["n", "a", "n1", "r3", "W_re", "W_im", "ratio"]);
    let sign = if a.m.abs() % 2 == 0 { 1.0 } else { -1.0 };
    for r in &profile.rows {
        let w = if a.real {
            let v = match a.m.cmp(&0) {
                std::cmp::Ordering::Equal => r.w.re,
                std::cmp::Ordering::Greater => std::f64::consts::SQRT_2 * sign * r.w.re,
                std::cmp::Ordering::Less => std::f64::consts::SQRT_2 * sign * r.w.im,
            };
            num_complex::Complex64::new(v, 0.0)
        } else {
            r.w
        };
        csv.push(vec![
            r.n.to_string(),
            r.a.to_string(),
            r.n1.to_string(),
            r.r3.to_string(),
            fmt_f64(w.re),
            fmt_f64(w.im),
            fmt_f64(w.norm() / r.r3 as f64),
        ]);
    }
    run.write_csv(&a.out, &csv)?;
    let mut b = CsvOut::new(&["k", "count", "max_ratio", "count_good", "max_ratio_good"]);
    for blk in &profile.blocks {
        b.push(vec![
            blk.k.to_string(),
            blk.count.to_string(),
            fmt_f64(blk.max_ratio),
            blk.count_good.to_string(),
            fmt_f64(blk.max_ratio_good),
        ]);
    }
    run.write_csv(&sibling_path(&a.out, "blocks"), &b)?;
    println!("{} shells", profile.rows.len());
    run.finish(&a.out)
}

fn cmd_matrix_element(a: &MatrixElementArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "matrix-element", a)?;
    let sym = BandSymbol::load(&a.symbol)?;
    let width = a.lambda.powf(a.delta);
    let v = matrix_element(&sym, a.lambda, width, a.x0)?;
    let mu = liouville_average(&sym);
    println!("lambda = {}, L = {:.6}: element = {:.15e} {:+.15e}i, Liouville average = {:.15e} {:+.15e}i",
        a.lambda, width, v.re, v.im, mu.re, mu.im);
    if let Some(out) = &a.out {
        let mut csv = CsvOut::new(&["lambda", "L", "re", "im", "liouville_re", "liouville_im"]);
        csv.push(vec![fmt_f64(a.lambda), fmt_f64(width), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(mu.re), fmt_f64(mu.im)]);
        run.write_csv(out, &csv)?;
        run.finish(out)?;
    }
    Ok(())
}

fn cmd_qe(a: &QeArgs, budget: u64, argv: &[String]) -> Result<()> {
    let mut run = Run::new(argv, "qe", a)?;
    let observables = load_observables(&a.observables)?;
    let config = QERunConfig {
        sequence: sequence_kind(a.sequence, a.phi, a.tail_nmax),
        lambda_max: a.lambda_max,
        delta: a.delta,
        observables,
        x0: a.x0,
    };
    config.validate()?;
    let table = sequence_table(&config.sequence, budget, &mut run)?;
    let report = run_qe(&config, &table)?;

    let mut headers: Vec<String> = ["lambda", "n_lambda", "class", "in_lambda_inf", "L", "empty"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for o in &config.observables {
        for suffix in ["re", "im", "dev"] {
            headers.push(format!("{}_{suffix}", o.name));
        }
    }
    let mut csv = CsvOut::new(&headers);
    for r in &report.rows {
        let mut row = vec![
            fmt_f64(r.lambda),
            r.n_lambda.to_string(),
            r.class.map_or("none", |c| c.as_str()).to_string(),
            bool01(r.in_lambda_infinity),
            fmt_f64(r.width),
            bool01(r.empty),
        ];
        for (e, d) in r.elements.iter().zip(&r.deviations) {
            row.extend([fmt_f64(e.re), fmt_f64(e.im), fmt_f64(*d)]);
        }
        csv.push(row);
    }
    run.write_csv(&a.out, &csv)?;
    let mut s = CsvOut::new(&["observable", "X", "count", "count_inf", "density", "S_all", "S_inf"]);
    for summary in &report.summaries {
        for r in &summary.rows {
            s.push(vec![
                summary.name.clone(),
                fmt_f64(r.x),
                r.count.to_string(),
                r.count_inf.to_string(),
                fmt_f64(r.density),
                fmt_f64(r.s_all),
                fmt_f64(r.s_inf),
            ]);
        }
    }
    run.write_csv(&sibling_path(&a.out, "summary"), &s)?;
    for summary in &report.summaries {
        let last = summary.rows.last().unwrap();
        println!("{}: S_inf({}) = {:.6e}", summary.name, last.x, last.s_inf);
    }
    run.finish(&a.out)
}

/// Inserts `--key=value` pairs from a config file after the subcommand's own
/// arguments, skipping keys already given on the command line.
fn apply_config(argv: &[String]) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv.to_vec());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut out = argv.to_vec();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        let present = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !present {
            out.push(format!("{flag}={}", v.trim()));
        }
    }
    Ok(out)
}

fn init_threads() -> std::result::Result<(), String> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
        if n == 0 {
            return Err(format!("{THREADS_ENV} must be positive"));
        }
        // a second initialization (in-process callers) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Exit status for an error: 2 for bad input, 1 for failures of the math.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

/// Entry point of the `scatter3d` binary; `argv[0]` is the program name.
pub fn dispatch(argv: &[String]) -> i32 {
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let args = match apply_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let budget = cli.memory_budget;
    let result = match &cli.command {
        Command::Density(a) => cmd_density(a, budget, argv),
        Command::Spectrum(a) => cmd_spectrum(a, budget, argv),
        Command::Sequence(a) => cmd_sequence(a, budget, argv),
        Command::GreenNorms(a) => cmd_green_norms(a, budget, argv),
        Command::Weyl(a) => cmd_weyl(a, budget, argv),
        Command::MatrixElement(a) => cmd_matrix_element(a, argv),
        Command::Qe(a) => cmd_qe(a, budget, argv),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
