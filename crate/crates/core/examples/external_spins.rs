//! Static against dynamical external spins along the same ramp.

use stringbreak::dynamics::{run_extended_chain, ExtendedSetup, ObservableSet, PropagatorConfig, RampSchedule};
use stringbreak::statics::ScanAxis;

fn main() -> stringbreak::Result<()> {
    let setup = ExtendedSetup::default();
    let schedule = RampSchedule::new(ScanAxis::H, 20.0, 1.0, 11)?;
    let cmp = run_extended_chain(&setup, 1.2, &schedule, &PropagatorConfig::default(), &ObservableSet::minimal())?;
    let inner = cmp.dynamical_run.chain.inner_spins();
    for (a, b) in cmp.static_run.samples.iter().zip(&cmp.dynamical_run.samples) {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:>6.3}")).collect::<Vec<_>>().join(" ");
        println!("h = {:.2}  static [{}]  dynamical [{}]", a.control, fmt(&a.profile), fmt(&b.profile[inner.clone()]));
    }
    println!("max inner difference: {:.4}", cmp.max_difference);
    Ok(())
}
