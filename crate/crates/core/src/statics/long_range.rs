use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::closed_form::{config_energy, g0_energy_gap, static_offset, EnergyConvention};
use super::spectrum::lowest_spectrum;
use crate::model::{effective_field, ChainSpec, CouplingKernel, FieldProfile, IsingHamiltonian};
use crate::zeta::zeta_fn;
use crate::{Error, Result};

const ROOT_TOL: f64 = 1e-13;

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > ROOT_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `ζ(α) = 2`: below it a single-site string already breaks.
pub fn alpha_min() -> Result<f64> {
    bisect(|a| Ok(zeta_fn(a)? - 2.0), 1.5, 2.0)
}

/// Root of `2ζ(α) = ζ(α - 1)`: above it strings of any length are stable at `g = 0`.
pub fn alpha_max() -> Result<f64> {
    bisect(|a| Ok(2.0 * zeta_fn(a)? - zeta_fn(a - 1.0)?), 2.2, 3.0)
}

/// Classical string-breaking length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BreakingLength {
    /// Largest stable length (0 when even `ℓ = 1` breaks).
    Finite(usize),
    /// No length breaks.
    Infinite,
    /// Every length up to the bound was stable, but breaking is expected beyond it.
    AtLeast(usize),
}

impl fmt::Display for BreakingLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BreakingLength::Finite(n) => write!(f, "{n}"),
            BreakingLength::Infinite => write!(f, "inf"),
            BreakingLength::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

impl Serialize for BreakingLength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `ℓ_c(α)` at `g = 0`: the largest `ℓ` with `E_bs - E_s ≥ 0` (ties count as stable).
///
/// The gap is evaluated incrementally, `ΔE(ℓ) = -4ℓ T(ℓ+1) + 8 H_ℓ - 4 K_ℓ` with
/// `T` the zeta tail, `H_ℓ = Σ j^{-α}` and `K_ℓ = Σ j^{1-α}`.
pub fn breaking_length(alpha: f64, ell_max: usize) -> Result<BreakingLength> {
    let zeta = zeta_fn(alpha)?;
    let a_max = alpha_max()?;
    if alpha >= a_max {
        return Ok(BreakingLength::Infinite);
    }
    let (mut h, mut k) = (0.0, 0.0);
    for ell in 1..=ell_max {
        let j = ell as f64;
        h += j.powf(-alpha);
        k += j.powf(1.0 - alpha);
        let gap = -4.0 * j * (zeta - h) + 8.0 * h - 4.0 * k;
        if gap < 0.0 {
            return Ok(BreakingLength::Finite(ell - 1));
        }
    }
    Ok(BreakingLength::AtLeast(ell_max))
}

/// Exponent at which a string of length `ell` is degenerate with the broken
/// string at `g = 0`.
pub fn breaking_alpha(ell: usize) -> Result<f64> {
    let gap = |a: f64| -> Result<f64> {
        g0_energy_gap(&ChainSpec::static_chain(ell, CouplingKernel::power_law(a)?)?, 0.0)
    };
    // Every length is unstable just below alpha_min and stable at alpha_max.
    bisect(gap, alpha_min()? - 1e-3, alpha_max()?)
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseBoundary {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub lc_table: Vec<(f64, BreakingLength)>,
}

/// `α_min`, `α_max` and `ℓ_c` on `alpha_grid`, scanning lengths up to `ell_max`.
pub fn lr_phase_boundaries(alpha_grid: &[f64], ell_max: usize) -> Result<PhaseBoundary> {
    if let Some(a) = alpha_grid.iter().find(|a| !(**a > 1.0)) {
        return Err(Error::Domain(format!("alpha = {a} must exceed 1")));
    }
    let lc_table = alpha_grid
        .par_iter()
        .map(|&a| Ok((a, breaking_length(a, ell_max)?)))
        .collect::<Result<_>>()?;
    Ok(PhaseBoundary {
        alpha_min: alpha_min()?,
        alpha_max: alpha_max()?,
        lc_table,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbativeLevels {
    pub e_s0: f64,
    pub e_bs0: f64,
    /// String energy to second order in `g`.
    pub e_s2: f64,
    /// Broken-string energy to second order in `g`.
    pub e_bs2: f64,
    /// Per-site second-order shifts of the string and the broken string.
    pub string_terms: Vec<f64>,
    pub broken_terms: Vec<f64>,
}

/// Second-order perturbation theory in `g` around the string (all down) and
/// the broken string (all up) at `h = 0`.
pub fn perturbative_energies(chain: &ChainSpec, g: f64) -> Result<PerturbativeLevels> {
    let (e_s0, e_bs0, s_inv, b_inv) = perturbative_parts(chain)?;
    let c = -0.5 * g * g;
    let string_terms: Vec<f64> = s_inv.iter().map(|x| c * x).collect();
    let broken_terms: Vec<f64> = b_inv.iter().map(|x| c * x).collect();
    Ok(PerturbativeLevels {
        e_s0,
        e_bs0,
        e_s2: e_s0 + string_terms.iter().sum::<f64>(),
        e_bs2: e_bs0 + broken_terms.iter().sum::<f64>(),
        string_terms,
        broken_terms,
    })
}

/// `(E_s(0), E_bs(0), 1/(h̃+h_eff), 1/(h̃-h_eff))`.
fn perturbative_parts(chain: &ChainSpec) -> Result<(f64, f64, Vec<f64>, Vec<f64>)> {
    let ell = chain.ell;
    let h_eff = effective_field(chain)?;
    let tilde: Vec<f64> = (1..=ell)
        .map(|j| chain.kernel.partial_sum(j - 1) + chain.kernel.partial_sum(ell - j))
        .collect();
    let inv = |site: usize, d: f64| -> Result<f64> {
        if d.abs() < 1e-12 {
            Err(Error::DegenerateLevel { site })
        } else {
            Ok(1.0 / d)
        }
    };
    let s_inv = (0..ell).map(|i| inv(i + 1, tilde[i] + h_eff[i])).collect::<Result<Vec<_>>>()?;
    let b_inv = (0..ell).map(|i| inv(i + 1, tilde[i] - h_eff[i])).collect::<Result<Vec<_>>>()?;
    let fields = FieldProfile::new(chain, 0.0, 0.0)?;
    let e_s0 = crate::model::diagonal_energy(chain, &fields, &vec![false; ell])?;
    let e_bs0 = crate::model::diagonal_energy(chain, &fields, &vec![true; ell])?;
    Ok((e_s0, e_bs0, s_inv, b_inv))
}

/// Transverse field at which the second-order string and broken-string
/// energies cross, if they do.
pub fn perturbative_crossing(chain: &ChainSpec) -> Result<Option<f64>> {
    let (e_s0, e_bs0, s_inv, b_inv) = perturbative_parts(chain)?;
    // E_bs2 - E_s2 = ΔE0 - g²/2 (Σ b_inv - Σ s_inv)
    let d0 = e_bs0 - e_s0;
    let curvature = b_inv.iter().sum::<f64>() - s_inv.iter().sum::<f64>();
    if d0 <= 0.0 || curvature <= 0.0 {
        return Ok(None);
    }
    Ok(Some((2.0 * d0 / curvature).sqrt()))
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialPoint {
    pub ell: usize,
    /// Ground-state potential `E_0 - E_0^vac` including the static charges.
    pub v_ground: f64,
    pub v_first: f64,
    pub m_ground: f64,
    pub m_first: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialCurve {
    pub points: Vec<PotentialPoint>,
    /// Largest listed length whose ground state (and that of every shorter
    /// listed length) is string-like.
    pub ell_c: BreakingLength,
}

/// Spin count above which `g = 0` points fall back to comparing the string
/// and the broken string only.
const CLASSICAL_ED_LIMIT: usize = 16;

/// Potential of the two lowest levels against length for fixed `g` and `h`.
///
/// `V = E_level - E_0^vac + C`, where `C` accounts for the longitudinal
/// field and frozen-spin couplings of the two static charges so that `V`
/// agrees with the closed-form `g = 0` potentials.
pub fn static_potential_curve(
    kernel: CouplingKernel,
    g: f64,
    h: f64,
    ells: &[usize],
) -> Result<PotentialCurve> {
    let points = ells
        .par_iter()
        .map(|&ell| potential_point(kernel, g, h, ell))
        .collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<&PotentialPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.ell);
    let mut ell_c = BreakingLength::AtLeast(sorted.last().map_or(0, |p| p.ell));
    let mut last_string = 0;
    for p in sorted {
        if p.m_ground > 0.0 {
            ell_c = BreakingLength::Finite(last_string);
            break;
        }
        last_string = p.ell;
    }
    Ok(PotentialCurve { points, ell_c })
}

fn potential_point(kernel: CouplingKernel, g: f64, h: f64, ell: usize) -> Result<PotentialPoint> {
    let chain = ChainSpec::static_chain(ell, kernel)?;
    if g == 0.0 && ell > CLASSICAL_ED_LIMIT {
        let fp = EnergyConvention::FirstPrinciples;
        let vs = config_energy(&chain, h, &(0..=ell + 1).collect::<Vec<_>>(), fp)?;
        let vbs = config_energy(&chain, h, &[0, ell + 1], fp)?;
        let (lo, hi, m) = if vs <= vbs { (vs, vbs, -1.0) } else { (vbs, vs, 1.0) };
        return Ok(PotentialPoint {
            ell,
            v_ground: lo,
            v_first: hi,
            m_ground: m,
            m_first: -m,
        });
    }
    let op = IsingHamiltonian::for_chain(&chain, h, g)?;
    let levels = lowest_spectrum(&op, 2, false)?;
    let vac = lowest_spectrum(&op.vacuum()?, 1, false)?;
    let offset = static_offset(&chain, h)? - vac.energies[0];
    Ok(PotentialPoint {
        ell,
        v_ground: levels.energies[0] + offset,
        v_first: levels.energies[1] + offset,
        m_ground: levels.magnetizations[0],
        m_first: levels.magnetizations[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statics::g0_potentials;

    fn pl(ell: usize, alpha: f64) -> ChainSpec {
        ChainSpec::static_chain(ell, CouplingKernel::power_law(alpha).unwrap()).unwrap()
    }

    #[test]
    fn alpha_roots() {
        assert!((alpha_min().unwrap() - 1.728_647_238_998_183_6).abs() < 1e-10);
        assert!((alpha_max().unwrap() - 2.478_750_785_733_96).abs() < 1e-10);
    }

    #[test]
    fn breaking_lengths_at_reference_exponents() {
        assert_eq!(breaking_length(2.2, 10_000).unwrap(), BreakingLength::Finite(8));
        assert_eq!(breaking_length(2.35, 10_000).unwrap(), BreakingLength::Finite(27));
        assert_eq!(breaking_length(1.6, 100).unwrap(), BreakingLength::Finite(0));
        assert_eq!(breaking_length(2.6, 100).unwrap(), BreakingLength::Infinite);
    }

    #[test]
    fn incremental_gap_matches_closed_form() {
        for alpha in [1.9, 2.2, 2.4] {
            let lc = breaking_length(alpha, 5000).unwrap();
            if let BreakingLength::Finite(n) = lc {
                if n > 0 {
                    assert!(g0_energy_gap(&pl(n, alpha), 0.0).unwrap() >= 0.0);
                }
                assert!(g0_energy_gap(&pl(n + 1, alpha), 0.0).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn breaking_alpha_is_a_root() {
        for ell in [1, 3, 8] {
            let a = breaking_alpha(ell).unwrap();
            assert!(g0_energy_gap(&pl(ell, a), 0.0).unwrap().abs() < 1e-9);
        }
        assert!((breaking_alpha(1).unwrap() - alpha_min().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn zero_field_perturbation_is_trivial() {
        let p = perturbative_energies(&pl(6, 2.2), 0.0).unwrap();
        assert_eq!(p.e_s2, p.e_s0);
        assert_eq!(p.e_bs2, p.e_bs0);
        assert!((p.e_bs0 - p.e_s0 - g0_energy_gap(&pl(6, 2.2), 0.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn edge_correction_for_short_range_limit() {
        // next-nearest terms are O((2/3)^alpha)
        let alpha = 14.0;
        let g = 0.1;
        let p = perturbative_energies(&pl(6, alpha), g).unwrap();
        let estimate = -g * g / (4.0 * 2f64.powf(-alpha));
        assert!((p.broken_terms[0] / estimate - 1.0).abs() < 1e-2);
    }

    #[test]
    fn second_order_matches_exact_for_small_g() {
        let chain = pl(5, 2.2);
        let g = 0.02;
        let p = perturbative_energies(&chain, g).unwrap();
        let op = IsingHamiltonian::for_chain(&chain, 0.0, g).unwrap();
        let e0 = lowest_spectrum(&op, 1, false).unwrap().energies[0];
        assert!((e0 - p.e_s2.min(p.e_bs2)).abs() < 1e-5);
    }

    #[test]
    fn zero_g_potential_matches_closed_form() {
        let k = CouplingKernel::exponential(1.0).unwrap();
        let h = 0.1;
        let curve = static_potential_curve(k, 0.0, h, &[2, 4, 6]).unwrap();
        for p in &curve.points {
            let (vs, vbs) = g0_potentials(&ChainSpec::static_chain(p.ell, k).unwrap(), h).unwrap();
            assert!((p.v_ground - vs.min(vbs)).abs() < 1e-10, "ell {}", p.ell);
        }
    }
}
