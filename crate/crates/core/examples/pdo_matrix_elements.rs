//! Matrix elements `⟨Op(a) g_{λ,L}, g_{λ,L}⟩` for a few basis symbols along
//! the midpoint sequence.
//!
//!     cargo run --release --example pdo_matrix_elements

use scatter3d::pdo::*;
use scatter3d::spectrum::build_midpoint_sequence;

fn main() -> scatter3d::Result<()> {
    let symbols = [
        ("identity", BandSymbol::identity()),
        ("e_0_2_0", BandSymbol::basis([0; 3], 2, 0)?),
        ("e_0_4_0", BandSymbol::basis([0; 3], 4, 0)?),
        ("e_100_0_0", BandSymbol::basis([1, 0, 0], 0, 0)?),
    ];
    let x0 = [0.5, 1.0, 1.5];
    let delta = 0.2;
    let seq = build_midpoint_sequence(3_000.0)?;
    println!("{:>9} {:>6}  {}", "lambda", "L", symbols.iter().map(|s| format!("{:>24}", s.0)).collect::<String>());
    for e in seq.entries.iter().step_by(150) {
        let width = e.lambda.powf(delta);
        let annulus = match Annulus::new(e.lambda, width) {
            Ok(a) => a,
            Err(err) => {
                println!("{:>9} {width:>6.3}  {err}", e.lambda);
                continue;
            }
        };
        let cells: Vec<String> = symbols
            .iter()
            .map(|(_, s)| {
                let v = matrix_element_on(s, &annulus, x0);
                format!("{:>+12.4e}{:>+11.4e}i", v.re, v.im)
            })
            .collect();
        println!("{:>9} {width:>6.3}  {}", e.lambda, cells.join(""));
    }
    Ok(())
}
