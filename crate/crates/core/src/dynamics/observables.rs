use std::ops::Range;

use crate::linalg::cdot;
use crate::model::{IsingHamiltonian, StateVector};
use crate::statics::{lowest_spectrum, SpectrumSlice};
use crate::{Error, Result, C64};

/// `<σ^z_j>` for every spin, site 1 first.
pub fn magnetization_profile(state: &StateVector) -> Vec<f64> {
    let n = state.n_spins();
    let mut up = vec![0.0; n];
    let mut total = 0.0;
    for (s, p) in state.probabilities().enumerate() {
        total += p;
        for (j, u) in up.iter_mut().enumerate() {
            if s >> j & 1 == 1 {
                *u += p;
            }
        }
    }
    up.iter().map(|u| 2.0 * u - total).collect()
}

/// Average magnetization `m_z` and the per-site profile.
pub fn magnetization(state: &StateVector) -> (f64, Vec<f64>) {
    let profile = magnetization_profile(state);
    let m = profile.iter().sum::<f64>() / profile.len() as f64;
    (m, profile)
}

/// `Σ_{i<j} (<σ_i σ_j> - <σ_i><σ_j>)` over all spins.
pub fn connected_correlator(state: &StateVector) -> f64 {
    connected_correlator_on(state, 0..state.n_spins())
}

/// Connected correlator restricted to the spins in `sites` (0-based bits).
pub fn connected_correlator_on(state: &StateVector, sites: Range<usize>) -> f64 {
    // Σ_{i<j} <σσ> = (<M^2> - L)/2 and Σ_{i<j} <σ><σ> = ((Σ<σ>)^2 - Σ<σ>^2)/2
    let len = sites.len() as f64;
    let mask: usize = sites.clone().map(|b| 1usize << b).sum();
    let mut m2 = 0.0;
    for (s, p) in state.probabilities().enumerate() {
        let up = (s & mask).count_ones() as f64;
        m2 += p * (2.0 * up - len).powi(2);
    }
    let profile = magnetization_profile(state);
    let local = &profile[sites];
    let m: f64 = local.iter().sum();
    let sq: f64 = local.iter().map(|x| x * x).sum();
    0.5 * (m2 - len) - 0.5 * (m * m - sq)
}

/// Longest run of set bits within `width` bits of `s` starting at bit `lo`.
pub(crate) fn longest_up_run(s: usize, lo: usize, width: usize) -> usize {
    let mut best = 0;
    let mut run = 0;
    for b in lo..lo + width {
        if s >> b & 1 == 1 {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Distribution `P_d(r)`, `r = 0..=n`, of the largest up domain.
pub fn bubble_histogram(state: &StateVector) -> Vec<f64> {
    bubble_histogram_on(state, 0..state.n_spins())
}

pub fn bubble_histogram_on(state: &StateVector, sites: Range<usize>) -> Vec<f64> {
    let width = sites.len();
    let mut hist = vec![0.0; width + 1];
    for (s, p) in state.probabilities().enumerate() {
        hist[longest_up_run(s, sites.start, width)] += p;
    }
    hist
}

/// `P_n = |<ψ_n|Ψ>|^2` against the eigenvectors stored in `slice`.
pub fn instantaneous_populations(state: &StateVector, slice: &SpectrumSlice) -> Result<Vec<f64>> {
    let vectors = slice
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Domain("spectrum slice carries no eigenvectors".into()))?;
    vectors
        .iter()
        .map(|v| {
            if v.len() != state.dim() {
                return Err(Error::LengthMismatch {
                    expected: state.dim(),
                    got: v.len(),
                });
            }
            let o: C64 = v.iter().zip(state.amplitudes()).map(|(a, b)| b * *a).sum();
            Ok(o.norm_sqr())
        })
        .collect()
}

/// `E(t) = <Ψ|H|Ψ>`.
pub fn energy(op: &IsingHamiltonian, state: &StateVector) -> f64 {
    let mut y = vec![C64::default(); state.dim()];
    op.apply(state.amplitudes(), &mut y);
    cdot(state.amplitudes(), &y).re
}

/// `V = E(t) - E_0^vac + 4h`, with `op` the Hamiltonian at the current
/// control. Constant static-static terms are not included.
pub fn dynamical_potential(op: &IsingHamiltonian, state: &StateVector) -> Result<f64> {
    let vac = lowest_spectrum(&op.vacuum()?, 1, false)?;
    Ok(energy(op, state) - vac.energies[0] + 4.0 * op.h())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(n: usize) -> StateVector {
        let mut amps = vec![C64::default(); 1 << n];
        amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateVector::new(n, amps).unwrap()
    }

    #[test]
    fn basis_state_magnetization() {
        let (m, p) = magnetization(&StateVector::basis(5, 0));
        assert_eq!(m, -1.0);
        assert!(p.iter().all(|x| *x == -1.0));
        assert_eq!(magnetization(&cat(5)).0, 0.0);
    }

    #[test]
    fn correlator_of_cat_and_product_states() {
        assert!((connected_correlator(&cat(5)) - 10.0).abs() < 1e-12);
        assert!(connected_correlator(&StateVector::basis(5, 0b10110)).abs() < 1e-12);
    }

    #[test]
    fn correlator_matches_pairwise_definition() {
        let n = 4;
        let amps: Vec<C64> = (0..1 << n).map(|s| C64::new((s as f64 * 0.37).sin(), (s as f64).cos() * 0.2)).collect();
        let mut st = StateVector::new(n, amps).unwrap();
        st.normalize();
        let sz = |s: usize, j: usize| if s >> j & 1 == 1 { 1.0 } else { -1.0 };
        let probs: Vec<f64> = st.probabilities().collect();
        let mut c = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let zz: f64 = probs.iter().enumerate().map(|(s, p)| p * sz(s, i) * sz(s, j)).sum();
                let zi: f64 = probs.iter().enumerate().map(|(s, p)| p * sz(s, i)).sum();
                let zj: f64 = probs.iter().enumerate().map(|(s, p)| p * sz(s, j)).sum();
                c += zz - zi * zj;
            }
        }
        assert!((connected_correlator(&st) - c).abs() < 1e-12);
    }

    #[test]
    fn bubble_sizes() {
        assert_eq!(bubble_histogram(&StateVector::basis(5, 0))[0], 1.0);
        assert_eq!(bubble_histogram(&StateVector::basis(5, 0b11111))[5], 1.0);
        // (↓↑↑↓↑) with site 1 in bit 0
        assert_eq!(bubble_histogram(&StateVector::basis(5, 0b10110))[2], 1.0);
    }
}
