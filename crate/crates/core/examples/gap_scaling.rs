//! Exponential closing of the crossing gap with string length.

use stringbreak::statics::{gap_length_scaling, CrossingOptions};
use stringbreak::CouplingKernel;

fn main() -> stringbreak::Result<()> {
    let kernel = CouplingKernel::exponential(1.0)?;
    let ells: Vec<usize> = (5..=10).collect();
    for g in [1.0, 1.2] {
        let s = gap_length_scaling(kernel, g, &ells, &CrossingOptions::default())?;
        println!("g = {g}: gap ~ {:.3} (g / {:.3})^ell", s.prefactor, s.base);
        for (ell, h_c, gap) in &s.points {
            println!("  ell = {ell:>2}  h_c = {h_c:.5}  gap = {gap:.3e}");
        }
    }
    Ok(())
}
