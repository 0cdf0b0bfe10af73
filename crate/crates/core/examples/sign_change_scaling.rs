//! Power-law approach of the dynamical breaking field to h_c, and the
//! collapse of the magnetization curves it implies.

use stringbreak::dynamics::{
    collapse_curves, collapse_spread, locate_sign_change, propagate_ramp, scaling_fit, ObservableSet, PropagatorConfig,
    RampResult, RampSchedule,
};
use stringbreak::statics::{default_h_interval, locate_avoided_crossing, CrossingOptions, ScanAxis};
use stringbreak::{ChainSpec, CouplingKernel, IsingHamiltonian};

fn main() -> stringbreak::Result<()> {
    let ell = 11;
    let chain = ChainSpec::static_chain(ell, CouplingKernel::exponential(1.0)?)?;
    let op = IsingHamiltonian::for_chain(&chain, 0.0, 1.2)?;
    let h_c = locate_avoided_crossing(&op, ScanAxis::H, default_h_interval(&chain)?, &CrossingOptions::default())?.control_c;

    let taus = [10.0, 15.0, 25.0, 40.0, 60.0];
    let mut runs: Vec<(f64, RampResult)> = Vec::new();
    for tau in taus {
        let schedule = RampSchedule::new(ScanAxis::H, tau, 1.0, 201)?;
        runs.push((tau, propagate_ramp(&op, &schedule, &PropagatorConfig::default(), &ObservableSet::minimal(), None)?));
    }
    let pairs: Vec<(f64, f64)> = runs
        .iter()
        .filter_map(|(tau, r)| locate_sign_change(r).ok().map(|s| (*tau, s.first)))
        .collect();
    let fit = scaling_fit(&pairs, h_c)?;
    println!("ell = {ell}, h_c = {h_c:.5}: h_sb - h_c = {:.3} tau^{:.3}", fit.prefactor, fit.exponent);

    let refs: Vec<(f64, &RampResult)> = runs.iter().map(|(t, r)| (*t, r)).collect();
    let curves = collapse_curves(&refs, h_c, fit.exponent);
    let spread = collapse_spread(&curves, 0.5 * fit.prefactor, 1.5 * fit.prefactor, 51);
    println!("largest m_z spread of the rescaled curves near the sign change: {spread:.3}");
    Ok(())
}
