use serde::Serialize;

use crate::model::{Boundary, ChainSpec, CouplingKernel};
use crate::zeta::zeta_fn;
use crate::{Error, Result};

/// Largest chain length accepted by [`enumerate_sector_minimum`].
pub const MAX_ENUMERATION_SITES: usize = 14;

fn require_static(chain: &ChainSpec) -> Result<()> {
    chain.validate()?;
    match chain.boundary {
        Boundary::StaticExternal => Ok(()),
        Boundary::DynamicalExternal { .. } => Err(Error::Unsupported(
            "closed-form g = 0 results assume static external spins".into(),
        )),
    }
}

/// `E_bs - E_s` at `g = 0`: broken string (all dynamical spins up) minus
/// string (all down).
pub fn g0_energy_gap(chain: &ChainSpec, h: f64) -> Result<f64> {
    require_static(chain)?;
    let ell = chain.ell as f64;
    let classical = match chain.kernel {
        CouplingKernel::Exponential { xi } => {
            let q = (-1.0 / xi).exp();
            4.0 * (1.0 - 2.0 * q) * (1.0 - (-ell / xi).exp()) / (1.0 - q).powi(2)
        }
        CouplingKernel::PowerLaw { alpha } => {
            let zeta = zeta_fn(alpha)?;
            let weighted: f64 = (1..=chain.ell)
                .rev()
                .map(|j| (chain.ell - j + 2) as f64 * (j as f64).powf(-alpha))
                .sum();
            -4.0 * ell * zeta + 4.0 * weighted
        }
    };
    Ok(classical - 2.0 * ell * h)
}

/// Field at which string and broken string cross for `g = 0` (exponential
/// kernel only).
pub fn g0_breaking_field(chain: &ChainSpec) -> Result<f64> {
    require_static(chain)?;
    let CouplingKernel::Exponential { xi } = chain.kernel else {
        return Err(Error::Unsupported(
            "power-law chains break at h = 0 or not at all; use the long-range phase boundaries"
                .into(),
        ));
    };
    let threshold = 1.0 / std::f64::consts::LN_2;
    if xi > threshold * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "xi = {xi} exceeds 1/ln 2: the string is already broken at h = 0"
        )));
    }
    let q = (-1.0 / xi).exp();
    let ell = chain.ell as f64;
    Ok(2.0 * (1.0 - 2.0 * q) * (1.0 - (-ell / xi).exp()) / ((1.0 - q).powi(2) * ell))
}

/// String and broken-string potentials `(V_s, V_bs)` at `g = 0`, measured
/// against the charge-free configuration (exponential kernel).
pub fn g0_potentials(chain: &ChainSpec, h: f64) -> Result<(f64, f64)> {
    require_static(chain)?;
    let CouplingKernel::Exponential { xi } = chain.kernel else {
        return Err(Error::Unsupported("closed-form potentials need the exponential kernel".into()));
    };
    let q = (-1.0 / xi).exp();
    let ell = chain.ell as f64;
    let a_s = 4.0 / (1.0 - q).powi(2);
    let b_s = -4.0 / ((1.0 / xi).exp() - 1.0).powi(2);
    let a_bs = 8.0 / (1.0 - q);
    let b_bs = -4.0;
    let decay = (-ell / xi).exp();
    Ok((
        2.0 * h * (ell + 2.0) + a_s + b_s * decay,
        4.0 * h + a_bs + b_bs * decay,
    ))
}

/// Energy of the static charges themselves relative to the vacuum:
/// longitudinal field on sites `0` and `ell + 1` plus their couplings to the
/// frozen external spins. Adding it to `E - E_vac` of the dynamical
/// Hamiltonian gives the full potential.
pub fn static_offset(chain: &ChainSpec, h: f64) -> Result<f64> {
    require_static(chain)?;
    let k = &chain.kernel;
    Ok(4.0 * h + 4.0 * (k.tail_sum(1) + k.tail_sum(chain.ell + 2)))
}

/// Normalization used by [`config_energy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum EnergyConvention {
    /// Energy of the full chain relative to all-up, with the model couplings.
    #[default]
    FirstPrinciples,
    /// The compact form `2n (1/(e^{1/ξ} - 1) + h) - 2 Σ e^{-(i_k - i_j)/ξ}`;
    /// exponential kernel only. Offsets and scales differ from
    /// `FirstPrinciples`, so it is only meaningful for qualitative comparisons.
    AppendixAsWritten,
}

fn validate_down_sites(ell: usize, down: &[usize]) -> Result<()> {
    let bad = |msg: &str| Err(Error::Domain(format!("malformed down-site list {down:?}: {msg}")));
    if down.len() < 2 {
        return bad("needs at least the two static sites");
    }
    if down[0] != 0 || *down.last().unwrap() != ell + 1 {
        return bad("must start at 0 and end at ell + 1");
    }
    if down.windows(2).any(|w| w[0] >= w[1]) {
        return bad("must be strictly ascending");
    }
    Ok(())
}

/// Energy of the configuration whose down spins sit exactly at `down_sites`
/// (which must include the static sites `0` and `ell + 1`), relative to the
/// all-up infinite chain.
pub fn config_energy(
    chain: &ChainSpec,
    h: f64,
    down_sites: &[usize],
    convention: EnergyConvention,
) -> Result<f64> {
    require_static(chain)?;
    validate_down_sites(chain.ell, down_sites)?;
    let n = down_sites.len() as f64;
    let pair_sum = |weight: &dyn Fn(usize) -> f64| -> f64 {
        let mut s = 0.0;
        for (a, &i) in down_sites.iter().enumerate() {
            for &j in &down_sites[a + 1..] {
                s += weight(j - i);
            }
        }
        s
    };
    match convention {
        EnergyConvention::FirstPrinciples => {
            let k = chain.kernel;
            let per_spin = 2.0 * (2.0 * k.tail_sum(1)) + 2.0 * h;
            Ok(n * per_spin - 4.0 * pair_sum(&|d| k.at(d)))
        }
        EnergyConvention::AppendixAsWritten => {
            let CouplingKernel::Exponential { xi } = chain.kernel else {
                return Err(Error::Unsupported(
                    "the compact convention is defined for the exponential kernel only".into(),
                ));
            };
            let per_spin = 1.0 / ((1.0 / xi).exp() - 1.0) + h;
            Ok(2.0 * n * per_spin - 2.0 * pair_sum(&|d| (-(d as f64) / xi).exp()))
        }
    }
}

/// Down sites of the configuration with `m` dynamical down spins packed
/// against the left static charge: `{0, 1, ..., m, ell + 1}`.
pub fn edge_block(ell: usize, m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=m).collect();
    v.push(ell + 1);
    v
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorMinimum {
    /// Down sites including the two static ones.
    pub down_sites: Vec<usize>,
    pub energy: f64,
    /// Whether an edge-adjacent block attains the sector minimum.
    pub edge_adjacent: bool,
}

/// Exhaustive minimum of [`config_energy`] among configurations with exactly
/// `n_down` dynamical down spins.
pub fn enumerate_sector_minimum(chain: &ChainSpec, h: f64, n_down: usize) -> Result<SectorMinimum> {
    require_static(chain)?;
    let ell = chain.ell;
    if ell > MAX_ENUMERATION_SITES {
        return Err(Error::Resource(format!(
            "exhaustive enumeration limited to ell <= {MAX_ENUMERATION_SITES}, got {ell}"
        )));
    }
    if n_down > ell {
        return Err(Error::Domain(format!("n_down = {n_down} exceeds ell = {ell}")));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << ell) {
        if mask.count_ones() as usize != n_down {
            continue;
        }
        let mut sites = vec![0];
        sites.extend((0..ell).filter(|b| mask >> b & 1 == 1).map(|b| b + 1));
        sites.push(ell + 1);
        let e = config_energy(chain, h, &sites, EnergyConvention::FirstPrinciples)?;
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, sites));
        }
    }
    let (energy, sites) = best.expect("at least one configuration per sector");
    let block = edge_block(ell, n_down);
    let block_energy = config_energy(chain, h, &block, EnergyConvention::FirstPrinciples)?;
    let edge_adjacent = block_energy <= energy + 1e-12 * energy.abs().max(1.0);
    Ok(SectorMinimum {
        down_sites: if edge_adjacent { block } else { sites },
        energy: energy.min(block_energy),
        edge_adjacent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BubbleCrossing {
    /// Bubble size: number of up spins in the edge-adjacent configuration.
    pub r: usize,
    /// Field at which that configuration crosses the string.
    pub h_c: f64,
}

/// `h_c(r, ell)` for `r = 1..=ell`: the field at which the configuration
/// with an `r`-site bubble against one charge is degenerate with the string.
///
/// Configuration energies are affine in `h` with slope `2 × (number of down
/// spins)`, so each crossing is the root of a linear equation and is solved
/// exactly.
pub fn bubble_crossing_fields(chain: &ChainSpec) -> Result<Vec<BubbleCrossing>> {
    require_static(chain)?;
    if !matches!(chain.kernel, CouplingKernel::Exponential { .. }) {
        return Err(Error::Unsupported("bubble crossings are defined for the exponential kernel".into()));
    }
    let ell = chain.ell;
    let at_zero = |m: usize| config_energy(chain, 0.0, &edge_block(ell, m), EnergyConvention::FirstPrinciples);
    let string = at_zero(ell)?;
    (1..=ell)
        .map(|r| {
            let bubble = at_zero(ell - r)?;
            Ok(BubbleCrossing {
                r,
                h_c: (bubble - string) / (2.0 * r as f64),
            })
        })
        .collect()
}

#[cfg(test)]
/// `2 Σ_j h_eff[j]`, the field-free part of [`g0_energy_gap`] summed directly.
pub(crate) fn summed_field_gap(chain: &ChainSpec) -> Result<f64> {
    use crate::model::effective_field;
    Ok(2.0 * effective_field(chain)?.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{diagonal_energy, FieldProfile};

    fn exp_chain(ell: usize, xi: f64) -> ChainSpec {
        ChainSpec::static_chain(ell, CouplingKernel::exponential(xi).unwrap()).unwrap()
    }

    #[test]
    fn gap_reference_values() {
        let c = exp_chain(5, 1.0);
        assert!((g0_energy_gap(&c, 0.0).unwrap() - 2.627_389_149_352_361_7).abs() < 1e-12);
        let hc = g0_breaking_field(&c).unwrap();
        assert!((hc - 0.262_738_914_935_236_2).abs() < 1e-12);
        assert!(g0_energy_gap(&c, hc).unwrap().abs() < 1e-12);
        assert!((summed_field_gap(&c).unwrap() - g0_energy_gap(&c, 0.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn breaking_field_scaling_limit() {
        // ell * h_c -> 2 (1 - 2/e) / (1 - 1/e)^2 for xi = 1
        let hc = g0_breaking_field(&exp_chain(60, 1.0)).unwrap();
        assert!((hc * 60.0 - 1.322_606_225_323_068_2).abs() < 1e-12);
    }

    #[test]
    fn breaking_field_vanishes_at_threshold() {
        let xi = 1.0 / std::f64::consts::LN_2;
        for ell in [2, 7] {
            assert!(g0_breaking_field(&exp_chain(ell, xi)).unwrap().abs() < 1e-15);
        }
        assert!(g0_breaking_field(&exp_chain(3, 1.5)).is_err());
    }

    #[test]
    fn breaking_field_rejects_power_law() {
        let c = ChainSpec::static_chain(4, CouplingKernel::power_law(2.2).unwrap()).unwrap();
        assert!(matches!(g0_breaking_field(&c), Err(Error::Unsupported(_))));
    }

    #[test]
    fn power_law_single_site_gap() {
        let alpha = 2.2;
        let c = ChainSpec::static_chain(1, CouplingKernel::power_law(alpha).unwrap()).unwrap();
        let expected = 8.0 - 4.0 * zeta_fn(alpha).unwrap();
        assert!((g0_energy_gap(&c, 0.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn potential_coefficients() {
        let c = exp_chain(5, 1.0);
        let (vs0, vbs0) = g0_potentials(&c, 0.0).unwrap();
        let (vs1, vbs1) = g0_potentials(&c, 1.0).unwrap();
        assert!((vs1 - vs0 - 14.0).abs() < 1e-12);
        assert!((vbs1 - vbs0 - 4.0).abs() < 1e-12);
        assert!((vs0 - 10.001_472_717_605_908).abs() < 1e-12);
        assert!((vbs0 - 12.628_861_866_958_27).abs() < 1e-12);
        // a_s = 4 / (1 - 1/e)^2 is the ell -> infinity limit of V_s(h = 0)
        let (vs_inf, _) = g0_potentials(&exp_chain(80, 1.0), 0.0).unwrap();
        assert!((vs_inf - 10.010_601_204_308_475).abs() < 1e-12);
    }

    #[test]
    fn config_energy_matches_potentials() {
        let c = exp_chain(5, 1.0);
        for h in [0.0, 0.3] {
            let s = config_energy(&c, h, &(0..=6).collect::<Vec<_>>(), EnergyConvention::FirstPrinciples)
                .unwrap();
            let bs = config_energy(&c, h, &[0, 6], EnergyConvention::FirstPrinciples).unwrap();
            let (vs, vbs) = g0_potentials(&c, h).unwrap();
            assert!((s - vs).abs() < 1e-12);
            assert!((bs - vbs).abs() < 1e-12);
            assert!((bs - s - g0_energy_gap(&c, h).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn config_energy_rejects_malformed_lists() {
        let c = exp_chain(4, 1.0);
        let fp = EnergyConvention::FirstPrinciples;
        assert!(config_energy(&c, 0.0, &[1, 5], fp).is_err());
        assert!(config_energy(&c, 0.0, &[0, 4], fp).is_err());
        assert!(config_energy(&c, 0.0, &[0, 2, 2, 5], fp).is_err());
        assert!(config_energy(&c, 0.0, &[0], fp).is_err());
    }

    #[test]
    fn compact_convention_orders_sectors_alike() {
        // Within a fixed-n sector both conventions order configurations the same way.
        let c = exp_chain(6, 1.0);
        let a = [0, 1, 2, 7];
        let b = [0, 2, 5, 7];
        let fp = |s: &[usize]| config_energy(&c, 0.1, s, EnergyConvention::FirstPrinciples).unwrap();
        let ap = |s: &[usize]| config_energy(&c, 0.1, s, EnergyConvention::AppendixAsWritten).unwrap();
        assert_eq!(fp(&a) < fp(&b), ap(&a) < ap(&b));
    }

    #[test]
    fn static_offset_closes_the_potential() {
        let c = exp_chain(5, 1.0);
        let h = 0.2;
        let fields = FieldProfile::new(&c, h, 0.0).unwrap();
        let e_s = diagonal_energy(&c, &fields, &[false; 5]).unwrap();
        let vac = FieldProfile {
            h_eff: fields.h_vac.clone(),
            ..fields.clone()
        };
        let e_vac = diagonal_energy(&c, &vac, &[true; 5]).unwrap();
        let (vs, _) = g0_potentials(&c, h).unwrap();
        assert!((e_s - e_vac + static_offset(&c, h).unwrap() - vs).abs() < 1e-12);
    }

    #[test]
    fn trivial_sectors() {
        let c = exp_chain(6, 1.0);
        let empty = enumerate_sector_minimum(&c, 0.3, 0).unwrap();
        assert_eq!(empty.down_sites, vec![0, 7]);
        let full = enumerate_sector_minimum(&c, 0.3, 6).unwrap();
        assert_eq!(full.down_sites, (0..=7).collect::<Vec<_>>());
        assert!(empty.edge_adjacent && full.edge_adjacent);
    }

    #[test]
    fn enumeration_limit() {
        let c = exp_chain(15, 1.0);
        assert!(matches!(enumerate_sector_minimum(&c, 0.0, 3), Err(Error::Resource(_))));
    }

    #[test]
    fn bubble_crossing_at_full_size_is_breaking_field() {
        for ell in [3, 5, 9] {
            let c = exp_chain(ell, 1.0);
            let table = bubble_crossing_fields(&c).unwrap();
            let last = table.last().unwrap();
            assert_eq!(last.r, ell);
            assert!((last.h_c - g0_breaking_field(&c).unwrap()).abs() < 1e-9);
        }
    }
}
