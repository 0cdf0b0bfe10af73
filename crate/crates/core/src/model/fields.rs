use serde::{Deserialize, Serialize};

use super::{Boundary, ChainSpec, CouplingKernel, SiteLayout};
use crate::zeta::{harmonic, zeta_fn};
use crate::Result;

/// Longitudinal fields acting on the dynamical spins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    /// Field induced by the frozen spins with static charges present.
    pub h_eff: Vec<f64>,
    /// Field induced by the frozen spins in the charge-free vacuum.
    pub h_vac: Vec<f64>,
    /// Uniform longitudinal field (string tension).
    pub h: f64,
    /// Transverse field.
    pub g: f64,
}

impl FieldProfile {
    pub fn new(chain: &ChainSpec, h: f64, g: f64) -> Result<Self> {
        Ok(FieldProfile {
            h_eff: effective_field(chain)?,
            h_vac: vacuum_field(chain)?,
            h,
            g,
        })
    }
}

/// Boundary-induced field `h_eff[j]` on each dynamical spin.
///
/// Static-external chains use the kernel's closed form; the extended layout
/// goes through [`effective_field_summed`].
pub fn effective_field(chain: &ChainSpec) -> Result<Vec<f64>> {
    chain.validate()?;
    if let Boundary::DynamicalExternal { .. } = chain.boundary {
        return Ok(effective_field_summed(&chain.kernel, &chain.layout()));
    }
    let ell = chain.ell;
    let out = match chain.kernel {
        CouplingKernel::Exponential { xi } => {
            let q = (-1.0 / xi).exp();
            let prefactor = (1.0 - 2.0 * q) / (1.0 - q);
            (1..=ell)
                .map(|j| {
                    prefactor
                        * ((-((j - 1) as f64) / xi).exp() + (-((ell - j) as f64) / xi).exp())
                })
                .collect()
        }
        CouplingKernel::PowerLaw { alpha } => {
            let zeta = zeta_fn(alpha)?;
            (1..=ell)
                .map(|j| {
                    let right = ell - j + 1;
                    -2.0 * zeta
                        + (j as f64).powf(-alpha)
                        + (right as f64).powf(-alpha)
                        + harmonic(j, alpha)
                        + harmonic(right, alpha)
                })
                .collect()
        }
    };
    Ok(out)
}

/// Field on each dynamical spin when every external spin points up.
pub fn vacuum_field(chain: &ChainSpec) -> Result<Vec<f64>> {
    chain.validate()?;
    if let Boundary::DynamicalExternal { .. } = chain.boundary {
        return Ok(effective_field_summed(&chain.kernel, &chain.vacuum_layout()));
    }
    let ell = chain.ell;
    let out = match chain.kernel {
        CouplingKernel::Exponential { xi } => {
            let q = (-1.0 / xi).exp();
            (1..=ell)
                .map(|j| {
                    -((-((j - 1) as f64) / xi).exp() + (-((ell - j) as f64) / xi).exp())
                        / (1.0 - q)
                })
                .collect()
        }
        CouplingKernel::PowerLaw { alpha } => {
            let zeta = zeta_fn(alpha)?;
            (1..=ell)
                .map(|j| -2.0 * zeta + harmonic(j - 1, alpha) + harmonic(ell - j, alpha))
                .collect()
        }
    };
    Ok(out)
}

/// Field from an arbitrary frozen layout: explicit sum over frozen sites in
/// the window plus closed-form tails for the up-polarised sites beyond it.
pub fn effective_field_summed(kernel: &CouplingKernel, layout: &SiteLayout) -> Vec<f64> {
    layout
        .dynamical
        .iter()
        .map(|&x| {
            let frozen: f64 = layout
                .frozen
                .iter()
                .map(|&(f, spin)| -spin.sign() * kernel.at(x.abs_diff(f) as usize))
                .sum();
            let left = kernel.tail_sum((x - layout.window_lo + 1) as usize);
            let right = kernel.tail_sum((layout.window_hi - x + 1) as usize);
            frozen - left - right
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_chain(ell: usize, xi: f64) -> ChainSpec {
        ChainSpec::static_chain(ell, CouplingKernel::exponential(xi).unwrap()).unwrap()
    }

    #[test]
    fn exponential_reference_values() {
        let h = effective_field(&exp_chain(5, 1.0)).unwrap();
        assert!((h[0] - 0.425_679_656_814_734_5).abs() < 1e-12);
        assert!((h[2] - 0.113_146_601_550_682_56).abs() < 1e-12);
    }

    #[test]
    fn vanishes_at_threshold_range() {
        let xi = 1.0 / std::f64::consts::LN_2;
        for ell in [1, 4, 9] {
            for v in effective_field(&exp_chain(ell, xi)).unwrap() {
                assert!(v.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn power_law_single_site() {
        let alpha = 2.2;
        let chain =
            ChainSpec::static_chain(1, CouplingKernel::power_law(alpha).unwrap()).unwrap();
        let h = effective_field(&chain).unwrap();
        let expected = 4.0 - 2.0 * zeta_fn(alpha).unwrap();
        assert!((h[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn vacuum_single_site_geometric() {
        let h = vacuum_field(&exp_chain(1, 1.0)).unwrap();
        assert!((h[0] + 3.163_953_413_738_653).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_negative_and_symmetric() {
        for chain in [
            exp_chain(7, 0.8),
            ChainSpec::static_chain(6, CouplingKernel::power_law(1.7).unwrap()).unwrap(),
        ] {
            let h = vacuum_field(&chain).unwrap();
            for j in 0..h.len() {
                assert!(h[j] < 0.0);
                assert!((h[j] - h[h.len() - 1 - j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn positivity_window_around_inverse_log_two() {
        let threshold = 1.0 / std::f64::consts::LN_2;
        for ell in [1, 3, 8] {
            let below = effective_field(&exp_chain(ell, threshold * 0.98)).unwrap();
            assert!(below.iter().all(|&v| v > 0.0));
            let above = effective_field(&exp_chain(ell, threshold * 1.02)).unwrap();
            assert!(above.iter().all(|&v| v < 0.0));
        }
    }
}
