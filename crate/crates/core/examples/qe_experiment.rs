//! Quantum-ergodicity sweep: Cesàro means of `|⟨Op(a) g, g⟩ - ∫a|` along the
//! midpoint sequence, for every observable shipped with the crate.
//!
//!     cargo run --release --example qe_experiment -- 5000

use std::path::PathBuf;

use scatter3d::experiments::*;
use scatter3d::lattice_arith::{ShellTable, DEFAULT_MEMORY_BUDGET};
use scatter3d::spectrum::SequenceKind;

fn main() -> scatter3d::Result<()> {
    let lambda_max: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5_000.0);
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("observables");
    let config = QERunConfig {
        sequence: SequenceKind::Midpoint,
        lambda_max,
        delta: 0.2,
        observables: load_observables(&[dir])?,
        x0: [0.0; 3],
    };
    let table = ShellTable::sieve(lambda_max as u64 + 1_000, DEFAULT_MEMORY_BUDGET)?;
    let report = run_qe(&config, &table)?;
    let empty = report.rows.iter().filter(|r| r.empty).count();
    println!("{} rows, {empty} with an empty annulus", report.rows.len());
    for s in &report.summaries {
        println!("\n{} (Liouville average {:.6})", s.name, s.liouville.re);
        for r in &s.rows {
            println!("  X = {:>8.0}  S = {:.4e}  S_inf = {:.4e}  density {:.4}", r.x, r.s_all, r.s_inf, r.density);
        }
    }
    Ok(())
}
