//! Perturbed eigenvalues of the point scatterer for a few coupling angles,
//! and the density of the good-shell subsequence.
//!
//!     cargo run --release --example secular_spectrum

use scatter3d::lattice_arith::{ShellTable, DEFAULT_MEMORY_BUDGET};
use scatter3d::spectrum::*;

fn main() -> scatter3d::Result<()> {
    let table = ShellTable::sieve(1_000_000, DEFAULT_MEMORY_BUDGET)?;
    let c0 = compute_c0(&table, 1_000_000)?;
    println!("c0 = {:.12} (shells {:.12}, tail {:.3e}, tail error ~{:.1e})", c0.value, c0.shell_sum, c0.tail, c0.tail_error);

    for phi in [-2.0, 0.0, 1.0, 3.0] {
        let config = ScattererConfig { phi, ..ScattererConfig::default() };
        let spec = solve_spectrum(&table, &config, 8)?;
        let lambdas: Vec<String> = spec.lambdas.iter().map(|e| format!("{:.6}", e.lambda)).collect();
        println!("phi = {phi:>4}: {}", lambdas.join(" "));
    }

    let seq = build_secular_sequence(&table, &ScattererConfig { phi: 1.0, ..ScattererConfig::default() }, 10_000.0)?;
    let density = density_of_subsequence(&seq)?;
    println!("\nsecular sequence, phi = 1, {} entries", seq.entries.len());
    for row in &density.rows {
        println!("  X = {:>8.0}: {:>5} of {:>5} in the good subsequence, density {:.5}", row.x, row.count_inf, row.count, row.density);
    }
    Ok(())
}
