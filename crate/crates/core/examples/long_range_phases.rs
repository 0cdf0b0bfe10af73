//! Classical phase boundaries of string breaking for power-law couplings.

use stringbreak::statics::{alpha_max, alpha_min, breaking_alpha, breaking_length};

fn main() -> stringbreak::Result<()> {
    println!("alpha_min = {:.8}", alpha_min()?);
    println!("alpha_max = {:.10}", alpha_max()?);
    for alpha in [1.7, 1.8, 2.0, 2.2, 2.35, 2.45, 2.47, 2.5] {
        println!("alpha = {alpha:<5} ell_c = {}", breaking_length(alpha, 1_000_000)?);
    }
    for ell in [1, 2, 5, 10, 20, 50] {
        println!("ell = {ell:>2} breaks below alpha = {:.6}", breaking_alpha(ell)?);
    }
    Ok(())
}
