//! Truncated Green's functions: how close `g_{λ,L}` is to `g_λ` as the
//! annulus widens, and a few point values.
//!
//!     cargo run --release --example green_truncation -- 2000.5

use scatter3d::green::*;
use scatter3d::lattice_arith::{ShellTable, DEFAULT_MEMORY_BUDGET};

fn main() -> scatter3d::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000.5);
    let table = ShellTable::sieve(1_000_000, DEFAULT_MEMORY_BUDGET)?;
    let norms = GreenNorms::new(&table, 1_000_000, 100_000)?;
    println!("‖G_λ‖² = {:.6e} at λ = {lambda}", norms.norm_sq(lambda)?);
    println!("{:>8} {:>10} {:>12}", "L", "points", "‖g - g_L‖");
    for width in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
        match build_truncated(&norms, lambda, width, [0.0; 3]) {
            Ok(tg) => println!("{width:>8} {:>10} {:>12.4e}", tg.coeffs.len(), tg.truncation_distance()),
            Err(e) => println!("{width:>8} {e}"),
        }
    }

    let tg = build_truncated(&norms, lambda, lambda.powf(0.3), [1.0, 2.0, 3.0])?;
    let scale = 1.0 / tg.norm_trunc_sq.sqrt();
    for x in [[1.0, 2.0, 3.0], [1.1, 2.0, 3.0], [4.0, 0.5, 0.0]] {
        println!("g({x:?}) = {:.6e}", evaluate_g(&tg, x) * scale);
    }
    Ok(())
}
