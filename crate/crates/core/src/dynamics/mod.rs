//! Real-time evolution through linear ramps of `h` or `g` and the
//! observables recorded along the way.

mod analysis;
mod krylov;
mod observables;
mod ramp;

pub use analysis::{
    collapse_curves, collapse_spread, landau_zener_probability, locate_sign_change,
    magnetization_population_estimate, scaling_fit, sign_changes, tau_star, CollapseCurve,
    ScalingFit, SignChange,
};
pub use krylov::{
    evolve, expmv, step, ControlledOperator, Integrator, KrylovWorkspace, PropagatorConfig,
    Ramped,
};
pub use observables::{
    bubble_histogram, bubble_histogram_on, connected_correlator, connected_correlator_on,
    dynamical_potential, energy, instantaneous_populations, magnetization, magnetization_profile,
};
pub use ramp::{
    initial_ground_state, propagate_ramp, run_extended_chain, ExtendedComparison, ExtendedSetup,
    ObservableSet, RampResult, RampSample, RampSchedule,
};
