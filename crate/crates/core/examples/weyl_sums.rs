//! Weyl sums of spherical harmonics over lattice spheres, with dyadic
//! maxima of `|W|/r3` split by shell class.
//!
//!     cargo run --release --example weyl_sums -- 4 0 100000

use scatter3d::harmonics::*;
use scatter3d::lattice_arith::{ShellTable, DEFAULT_MEMORY_BUDGET};

fn main() -> scatter3d::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let l: u32 = args.first().and_then(|s| s.parse().ok()).unwrap_or(4);
    let m: i32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let n_max: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let idx = HarmonicIndex::new(l, m)?;
    let table = ShellTable::sieve(n_max, DEFAULT_MEMORY_BUDGET)?;
    let profile = weyl_profile(&table, idx, n_max)?;

    for row in profile.rows.iter().take(12) {
        println!("n = {:>3}  r3 = {:>3}  W = {:>+.6} {:>+.6}i", row.n, row.r3, row.w.re, row.w.im);
    }
    println!("\n{:>3} {:>7} {:>10} {:>7} {:>10}", "k", "shells", "max", "good", "max good");
    for b in &profile.blocks {
        println!("{:>3} {:>7} {:>10.5} {:>7} {:>10.5}", b.k, b.count, b.max_ratio, b.count_good, b.max_ratio_good);
    }
    Ok(())
}
