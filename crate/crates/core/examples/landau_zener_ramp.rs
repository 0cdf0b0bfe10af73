//! Linear field ramps through the crossing compared with Landau-Zener.

use stringbreak::dynamics::{landau_zener_probability, propagate_ramp, ObservableSet, PropagatorConfig, RampSchedule};
use stringbreak::statics::{default_h_interval, locate_avoided_crossing, CrossingOptions, ScanAxis};
use stringbreak::{ChainSpec, CouplingKernel, IsingHamiltonian};

fn main() -> stringbreak::Result<()> {
    let chain = ChainSpec::static_chain(5, CouplingKernel::exponential(1.0)?)?;
    let op = IsingHamiltonian::for_chain(&chain, 0.0, 1.2)?;
    let fit = locate_avoided_crossing(&op, ScanAxis::H, default_h_interval(&chain)?, &CrossingOptions::default())?;
    let obs = ObservableSet { levels: 4, ..ObservableSet::default() };
    println!("  tau    P_1     P_LZ    P_m     max(1-P0-P1)  V(final)");
    for tau in [5.0, 10.0, 20.0, 50.0, 100.0] {
        let schedule = RampSchedule::new(ScanAxis::H, tau, 2.0 * fit.control_c, 101)?;
        let r = propagate_ramp(&op, &schedule, &PropagatorConfig::default(), &obs, None)?;
        let last = r.samples.last().expect("samples");
        let beyond = r.samples.iter().filter_map(|s| s.beyond_two).fold(0.0, f64::max);
        println!(
            "{tau:>5}  {:.4}  {:.4}  {:.4}  {beyond:.2e}      {:.4}",
            last.populations[1],
            landau_zener_probability(fit.gap_c, fit.slope, tau)?,
            last.p_m.unwrap_or(f64::NAN),
            last.potential.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
