//! Projects a smooth symbol onto the band `|ζ| ≤ N1`, `l ≤ N2` and writes it
//! as an observable file.
//!
//!     cargo run --release --example symbol_projection -- smooth_u3sq.json

use num_complex::Complex64;
use scatter3d::pdo::*;

fn main() -> scatter3d::Result<()> {
    let out = std::env::args().nth(1);
    // (1 + cos x1 / 2) u3², band limited with N1 = 1, N2 = 2
    let a = |x: [f64; 3], u: [f64; 3]| Complex64::new((1.0 + 0.5 * x[0].cos()) * u[2] * u[2], 0.0);
    let (n1, n2) = (1, 2);
    let mut sym = symbol_project(a, n1, n2, ProjectionGrid::minimal(n1 + 1, n2 + 2))?;
    sym.prune(1e-14);
    for (k, c) in sym.modes() {
        println!("ζ = {:?}  (l, m) = ({}, {:>2})  c = {:+.16} {:+.3e}i", k.zeta, k.harmonic.l, k.harmonic.m, c.re, c.im);
    }
    println!("Liouville average: {:.16}", liouville_average(&sym).re);
    let err = [[0.3, 1.0, 2.0], [2.5, 0.0, 5.0]]
        .iter()
        .flat_map(|&x| [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.0, 1.0, 0.0]].map(move |u| (x, u)))
        .map(|(x, u)| (sym.eval_direction(x, u) - a(x, u)).norm())
        .fold(0.0, f64::max);
    println!("max reconstruction error at probe points: {err:.2e}");
    if let Some(path) = out {
        sym.save(std::path::Path::new(&path))?;
        println!("wrote {path}");
    }
    Ok(())
}
