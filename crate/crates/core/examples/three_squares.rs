//! Sums of three squares: the r3 sieve, good and bad shells, nearest shells.
//!
//!     cargo run --release --example three_squares -- 100000

use scatter3d::lattice_arith::*;

fn main() -> scatter3d::Result<()> {
    let x: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let table = ShellTable::sieve(x, DEFAULT_MEMORY_BUDGET)?;

    println!("{:>6} {:>4} {:>6} {:>5} {:>5}", "n", "a", "n1", "r3", "class");
    for n in table.shells_in(1, 50) {
        let rec = table.record(n).unwrap();
        println!("{:>6} {:>4} {:>6} {:>5} {:>5}", rec.n, rec.a, rec.n1, rec.r3, rec.class.map_or("-", |c| c.as_str()));
    }

    let shells = table.shells_in(1, x).count();
    let bad = table.bad_count(x);
    println!("\nshells up to {x}: {shells}");
    println!("bad shells: {} (bound √X log X = {:.1})", bad.count, bad.bound);

    let total: u64 = table.as_slice().iter().map(|&c| c as u64).sum();
    let vol = 4.0 * std::f64::consts::PI / 3.0 * (x as f64).powf(1.5);
    println!("lattice points in the ball: {total}, volume {vol:.0}, ratio {:.5}", total as f64 / vol);

    for lambda in [6.9, 111.5, 1234.56] {
        println!("nearest shell to {lambda}: {}", nearest_shell(lambda)?);
    }
    Ok(())
}
