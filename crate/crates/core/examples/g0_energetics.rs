//! Classical (g = 0) energetics of a string between two static charges.

use stringbreak::statics::{
    bubble_crossing_fields, enumerate_sector_minimum, g0_breaking_field, g0_energy_gap, g0_potentials,
};
use stringbreak::{ChainSpec, CouplingKernel};

fn main() -> stringbreak::Result<()> {
    let kernel = CouplingKernel::exponential(1.0)?;
    println!("ell  E_bs-E_s(h=0)  h_c        V_s(h_c)   V_bs(h_c)");
    for ell in [1, 3, 5, 9, 15, 25] {
        let chain = ChainSpec::static_chain(ell, kernel)?;
        let h_c = g0_breaking_field(&chain)?;
        let (vs, vbs) = g0_potentials(&chain, h_c)?;
        println!("{ell:>3}  {:>13.6}  {h_c:.6}  {vs:>9.5}  {vbs:>9.5}", g0_energy_gap(&chain, 0.0)?);
    }

    let chain = ChainSpec::static_chain(9, kernel)?;
    println!("\nbubble crossing fields for ell = 9:");
    for b in bubble_crossing_fields(&chain)? {
        println!("  r = {:>2}  h_c = {:.6}", b.r, b.h_c);
    }

    let h = g0_breaking_field(&chain)?;
    let sector = enumerate_sector_minimum(&chain, h, 4)?;
    println!("\nlowest 4-down configuration at h_c: {:?} (edge block: {})", sector.down_sites, sector.edge_adjacent);

    let power = ChainSpec::static_chain(7, CouplingKernel::power_law(2.2)?)?;
    println!("power law alpha = 2.2, ell = 7: E_bs - E_s = {:.6}", g0_energy_gap(&power, 0.0)?);
    Ok(())
}
