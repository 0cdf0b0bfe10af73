use serde::Serialize;

use super::krylov::{evolve, KrylovWorkspace, PropagatorConfig, Ramped};
use super::observables::{
    bubble_histogram_on, connected_correlator_on, dynamical_potential, energy,
    instantaneous_populations, magnetization_profile,
};
use crate::model::{Boundary, ChainSpec, CouplingKernel, IsingHamiltonian, StateVector};
use crate::statics::{lowest_spectrum, ScanAxis};
use crate::{Error, Result};

/// Linear ramp `control(t) = t / τ` from 0 to `final_control`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RampSchedule {
    pub axis: ScanAxis,
    pub tau: f64,
    pub final_control: f64,
    /// Samples uniformly spaced in control, both endpoints included.
    pub samples: usize,
}

impl RampSchedule {
    pub fn new(axis: ScanAxis, tau: f64, final_control: f64, samples: usize) -> Result<Self> {
        let s = RampSchedule {
            axis,
            tau,
            final_control,
            samples,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Domain(format!("tau = {} must be positive", self.tau)));
        }
        if !(self.final_control > 0.0 && self.final_control.is_finite()) {
            return Err(Error::Domain(format!("final control {} must be positive", self.final_control)));
        }
        if self.samples < 2 {
            return Err(Error::Domain("a ramp needs at least two samples".into()));
        }
        Ok(())
    }

    pub fn control_at(&self, t: f64) -> f64 {
        t / self.tau
    }

    pub fn duration(&self) -> f64 {
        self.tau * self.final_control
    }

    pub fn sample_controls(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n).map(|i| self.final_control * i as f64 / n as f64).collect()
    }
}

/// Which optional observables to record at each sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableSet {
    /// Number of instantaneous eigenstates for `P_n` (0 disables).
    pub levels: usize,
    pub potential: bool,
    pub bubbles: bool,
}

impl Default for ObservableSet {
    fn default() -> Self {
        Self {
            levels: 8,
            potential: true,
            bubbles: true,
        }
    }
}

impl ObservableSet {
    /// Only magnetization, correlator and energy.
    pub fn minimal() -> Self {
        Self {
            levels: 0,
            potential: false,
            bubbles: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RampSample {
    pub t: f64,
    pub control: f64,
    /// Mean magnetization of the inner chain.
    pub m_z: f64,
    /// `<σ^z_j>` for every dynamical spin.
    pub profile: Vec<f64>,
    pub energy: f64,
    pub correlator: f64,
    /// Running magnetization estimate of the diabatic population.
    pub p_m: Option<f64>,
    /// `P_0, P_1, ...`; empty when populations are disabled.
    pub populations: Vec<f64>,
    /// `1 - P_0 - P_1` when at least two levels are tracked.
    pub beyond_two: Option<f64>,
    pub potential: Option<f64>,
    /// `P_d(r)` over the inner chain; empty when disabled.
    pub bubbles: Vec<f64>,
    pub norm_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RampResult {
    pub chain: ChainSpec,
    pub schedule: RampSchedule,
    /// Value of the control that is held fixed.
    pub fixed_control: f64,
    pub config: PropagatorConfig,
    pub observables: ObservableSet,
    pub samples: Vec<RampSample>,
    #[serde(skip)]
    pub final_state: StateVector,
}

impl RampResult {
    pub fn controls(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.control).collect()
    }

    pub fn magnetizations(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.m_z).collect()
    }
}

/// Ground state of `op` at control 0 along `axis`.
pub fn initial_ground_state(op: &IsingHamiltonian, axis: ScanAxis) -> Result<StateVector> {
    let start = axis.at(op, 0.0);
    let slice = lowest_spectrum(&start, 1, true)?;
    let v = &slice.eigenvectors.expect("requested eigenvectors")[0];
    StateVector::from_real(op.n_spins(), v)
}

fn record(
    op: &IsingHamiltonian,
    state: &StateVector,
    t: f64,
    control: f64,
    m0: Option<f64>,
    observables: &ObservableSet,
) -> Result<RampSample> {
    let inner = op.chain().inner_spins();
    let profile = magnetization_profile(state);
    let m_z = profile[inner.clone()].iter().sum::<f64>() / inner.len() as f64;
    let m0 = m0.unwrap_or(m_z);
    let p_m = (m0.abs() > 1e-12).then(|| (m0 + m_z) / (2.0 * m0));
    let populations = if observables.levels > 0 {
        let k = observables.levels.min(op.dim());
        instantaneous_populations(state, &lowest_spectrum(op, k, true)?)?
    } else {
        Vec::new()
    };
    let beyond_two = (populations.len() >= 2).then(|| (1.0 - populations[0] - populations[1]).max(0.0));
    Ok(RampSample {
        t,
        control,
        m_z,
        energy: energy(op, state),
        correlator: connected_correlator_on(state, inner.clone()),
        p_m,
        populations,
        beyond_two,
        potential: if observables.potential {
            Some(dynamical_potential(op, state)?)
        } else {
            None
        },
        bubbles: if observables.bubbles {
            bubble_histogram_on(state, inner)
        } else {
            Vec::new()
        },
        norm_drift: (state.norm() - 1.0).abs(),
        profile,
    })
}

/// Integrates the Schrödinger equation through the ramp and records the
/// requested observables at each scheduled sample. `op` fixes the chain
/// and the value of the control that is not ramped; `initial` defaults to
/// the ground state at control 0.
pub fn propagate_ramp(
    op: &IsingHamiltonian,
    schedule: &RampSchedule,
    config: &PropagatorConfig,
    observables: &ObservableSet,
    initial: Option<StateVector>,
) -> Result<RampResult> {
    schedule.validate()?;
    config.validate()?;
    let axis = schedule.axis;
    let mut state = match initial {
        Some(s) => s,
        None => initial_ground_state(op, axis)?,
    };
    if state.dim() != op.dim() {
        return Err(Error::LengthMismatch {
            expected: op.dim(),
            got: state.dim(),
        });
    }
    let family = Ramped { op, axis };
    let control = |t: f64| schedule.control_at(t);
    let mut ws = KrylovWorkspace::new(op.dim(), config.krylov_dim);
    let controls = schedule.sample_controls();
    let mut samples = Vec::with_capacity(controls.len());
    let mut m0 = None;
    let mut t_prev = 0.0;
    for (i, &c) in controls.iter().enumerate() {
        let t = c * schedule.tau;
        if i > 0 {
            evolve(&family, &control, state.amplitudes_mut(), t_prev, t, config, &mut ws)?;
        }
        let sample = record(&axis.at(op, c), &state, t, c, m0, observables)?;
        m0.get_or_insert(sample.m_z);
        samples.push(sample);
        t_prev = t;
    }
    Ok(RampResult {
        chain: op.chain().clone(),
        schedule: schedule.clone(),
        fixed_control: match axis {
            ScanAxis::H => op.g(),
            ScanAxis::G => op.h(),
        },
        config: config.clone(),
        observables: observables.clone(),
        samples,
        final_state: state,
    })
}

/// Geometry of the static/dynamical boundary comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedSetup {
    pub ell: usize,
    pub n_ext: usize,
    pub xi: f64,
}

impl Default for ExtendedSetup {
    fn default() -> Self {
        Self {
            ell: 5,
            n_ext: 3,
            xi: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendedComparison {
    pub static_run: RampResult,
    pub dynamical_run: RampResult,
    /// Largest `|<σ^z_j>|` difference over inner spins and samples.
    pub max_difference: f64,
}

/// Runs the same `h` ramp with static external spins and with dynamical
/// external spins between frozen walls, and compares the inner profiles.
pub fn run_extended_chain(
    setup: &ExtendedSetup,
    g: f64,
    schedule: &RampSchedule,
    config: &PropagatorConfig,
    observables: &ObservableSet,
) -> Result<ExtendedComparison> {
    if schedule.axis != ScanAxis::H {
        return Err(Error::Unsupported("the boundary comparison ramps h".into()));
    }
    let kernel = CouplingKernel::exponential(setup.xi)?;
    let fixed = ChainSpec::static_chain(setup.ell, kernel)?;
    let extended = ChainSpec::new(setup.ell, kernel, Boundary::DynamicalExternal { n_ext: setup.n_ext })?;
    let run = |chain: &ChainSpec| -> Result<RampResult> {
        let op = IsingHamiltonian::for_chain(chain, 0.0, g)?;
        propagate_ramp(&op, schedule, config, observables, None)
    };
    let static_run = run(&fixed)?;
    let dynamical_run = run(&extended)?;
    let inner = extended.inner_spins();
    let max_difference = static_run
        .samples
        .iter()
        .zip(&dynamical_run.samples)
        .flat_map(|(a, b)| {
            a.profile
                .iter()
                .zip(&b.profile[inner.clone()])
                .map(|(x, y)| (x - y).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    Ok(ExtendedComparison {
        static_run,
        dynamical_run,
        max_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingKernel;

    fn op(ell: usize, g: f64) -> IsingHamiltonian {
        let chain = ChainSpec::static_chain(ell, CouplingKernel::exponential(1.0).unwrap()).unwrap();
        IsingHamiltonian::for_chain(&chain, 0.0, g).unwrap()
    }

    #[test]
    fn schedule_samples() {
        let s = RampSchedule::new(ScanAxis::H, 10.0, 0.5, 6).unwrap();
        let c = s.sample_controls();
        assert_eq!(c.len(), 6);
        assert_eq!(c[0], 0.0);
        assert_eq!(*c.last().unwrap(), 0.5);
        assert_eq!(s.duration(), 5.0);
        assert!(RampSchedule::new(ScanAxis::H, 0.0, 0.5, 6).is_err());
    }

    #[test]
    fn initial_sample_is_ground_state() {
        let h = op(4, 1.2);
        let s = RampSchedule::new(ScanAxis::H, 5.0, 0.4, 5).unwrap();
        let r = propagate_ramp(&h, &s, &PropagatorConfig::default(), &ObservableSet::default(), None).unwrap();
        let first = &r.samples[0];
        assert!((first.populations[0] - 1.0).abs() < 1e-10);
        assert_eq!(first.p_m, Some(1.0));
        for sample in &r.samples {
            assert!((sample.bubbles.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(sample.norm_drift < 1e-10);
            let p = &sample.profile;
            for j in 0..p.len() {
                assert!((p[j] - p[p.len() - 1 - j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn complete_populations_sum_to_one() {
        let h = op(4, 0.9);
        let s = RampSchedule::new(ScanAxis::H, 3.0, 0.6, 4).unwrap();
        let obs = ObservableSet {
            levels: 16,
            ..ObservableSet::minimal()
        };
        let r = propagate_ramp(&h, &s, &PropagatorConfig::default(), &obs, None).unwrap();
        for sample in &r.samples {
            assert!((sample.populations.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
