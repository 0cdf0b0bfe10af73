//! Bubble-size statistics when a long string is pulled far past h_c.

use stringbreak::dynamics::{locate_sign_change, propagate_ramp, ObservableSet, PropagatorConfig, RampSchedule};
use stringbreak::statics::ScanAxis;
use stringbreak::{ChainSpec, CouplingKernel, IsingHamiltonian};

fn main() -> stringbreak::Result<()> {
    let obs = ObservableSet { bubbles: true, ..ObservableSet::minimal() };
    for ell in [5, 9] {
        let chain = ChainSpec::static_chain(ell, CouplingKernel::exponential(1.0)?)?;
        let op = IsingHamiltonian::for_chain(&chain, 0.0, 1.2)?;
        let schedule = RampSchedule::new(ScanAxis::H, 100.0, 1.0, 101)?;
        let r = propagate_ramp(&op, &schedule, &PropagatorConfig::default(), &obs, None)?;
        let h_sb = locate_sign_change(&r).map(|s| s.first).ok();
        println!("ell = {ell}: m_z changes sign at h = {h_sb:?}");
        for (size, p) in r.samples.last().expect("samples").bubbles.iter().enumerate() {
            println!("  P_d({size:>2}) = {p:.4}");
        }
    }
    Ok(())
}
