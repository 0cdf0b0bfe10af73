//! Locate the string/broken-string avoided crossing and fit the two-level form.

use stringbreak::dynamics::{landau_zener_probability, tau_star};
use stringbreak::statics::{default_h_interval, locate_avoided_crossing, CrossingOptions, ScanAxis};
use stringbreak::{ChainSpec, CouplingKernel, IsingHamiltonian};

fn main() -> stringbreak::Result<()> {
    for ell in [5, 7, 9] {
        let chain = ChainSpec::static_chain(ell, CouplingKernel::exponential(1.0)?)?;
        let op = IsingHamiltonian::for_chain(&chain, 0.0, 1.2)?;
        let fit = locate_avoided_crossing(&op, ScanAxis::H, default_h_interval(&chain)?, &CrossingOptions::default())?;
        println!(
            "ell = {ell}: h_c = {:.5}, gap = {:.5}, slope = {:.3}, tau* = {:.1}, P_LZ(tau=100) = {:.4}",
            fit.control_c,
            fit.gap_c,
            fit.slope,
            tau_star(fit.gap_c, fit.slope)?,
            landau_zener_probability(fit.gap_c, fit.slope, 100.0)?
        );
    }
    Ok(())
}
