use rayon::prelude::*;
use serde::Serialize;

use super::closed_form::g0_breaking_field;
use super::spectrum::{lowest_spectrum, ScanAxis};
use crate::fit::{levenberg_marquardt, linear_fit, LmOptions};
use crate::model::{ChainSpec, CouplingKernel, IsingHamiltonian};
use crate::{Error, Result};

/// Two-level gap `2 sqrt(slope^2 (x - x_c)^2 + (gap_c / 2)^2)`.
pub fn two_level_gap(x: f64, x_c: f64, gap_c: f64, slope: f64) -> f64 {
    2.0 * (slope * slope * (x - x_c).powi(2) + 0.25 * gap_c * gap_c).sqrt()
}

#[derive(Clone, Debug)]
pub struct CrossingOptions {
    /// Points of the coarse bracketing grid.
    pub grid_points: usize,
    /// Golden-section tolerance in the control parameter.
    pub tol: f64,
    /// Fit window half-width in units of `gap_c / slope`.
    pub window: f64,
    /// Samples inside the fit window.
    pub fit_points: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            grid_points: 201,
            tol: 1e-8,
            window: 1.0,
            fit_points: 41,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingFit {
    /// Fitted crossing position (`h_c` or `g_c`).
    pub control_c: f64,
    /// Fitted minimal gap `Δ_c`.
    pub gap_c: f64,
    /// Asymptotic slope of each diabatic level, `ℓ m_*`.
    pub slope: f64,
    /// RMS deviation of the window fit.
    pub residual: f64,
    /// Location and value of the directly minimized gap.
    pub min_control: f64,
    pub min_gap: f64,
    pub window: (f64, f64),
    /// Samples `(x, E_1 - E_0)` used by the fit.
    pub samples: Vec<(f64, f64)>,
}

fn golden_section<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Locates the minimum of an arbitrary gap function on `interval` and fits
/// the two-level form around it. `slope_bound` is an upper bound on the
/// diabatic slope used to size the first probe.
pub fn locate_gap_minimum<F>(
    gap: F,
    interval: (f64, f64),
    slope_bound: f64,
    opts: &CrossingOptions,
) -> Result<CrossingFit>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (lo, hi) = interval;
    if !(lo < hi) || opts.grid_points < 3 {
        return Err(Error::Domain(format!("invalid scan interval [{lo}, {hi}]")));
    }
    let n = opts.grid_points;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| gap(x)).collect::<Result<_>>()?;
    let imin = (0..n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    if imin == 0 || imin == n - 1 {
        return Err(Error::Bracket { lo, hi });
    }
    let (x_min, gap_min) = golden_section(&gap, grid[imin - 1], grid[imin + 1], opts.tol)?;

    // First slope estimate from one probe on each side.
    let delta = 5.0 * gap_min / slope_bound;
    let probe = |x: f64| -> Result<f64> {
        let g = gap(x)?;
        Ok(((0.5 * g).powi(2) - (0.5 * gap_min).powi(2)).max(0.0).sqrt() / delta)
    };
    let mut slope_est = 0.5 * (probe(x_min - delta)? + probe(x_min + delta)?);
    if !(slope_est > 0.0) {
        slope_est = slope_bound;
    }
    let half = opts.window * gap_min / slope_est;
    let m = opts.fit_points.max(5);
    let xs: Vec<f64> = (0..m)
        .map(|i| x_min - half + 2.0 * half * i as f64 / (m - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.par_iter().map(|&x| gap(x)).collect::<Result<_>>()?;

    // Fit in window-scaled units so that all parameters are O(1).
    let us: Vec<f64> = xs.iter().map(|x| (x - x_min) / half).collect();
    let vs: Vec<f64> = ys.iter().map(|y| y / gap_min).collect();
    let model = |p: &[f64], u: f64| two_level_gap(u, p[0], p[1], p[2]);
    let fit = levenberg_marquardt(model, &us, &vs, &[0.0, 1.0, slope_est * half / gap_min], &LmOptions::default())?;
    let (u0, d, s) = (fit.params[0], fit.params[1].abs(), fit.params[2].abs());
    let control_c = x_min + u0 * half;
    if !(control_c > lo && control_c < hi) || !(d > 0.0) {
        return Err(Error::Fit(format!("crossing fit left the scan interval (x_c = {control_c})")));
    }
    Ok(CrossingFit {
        control_c,
        gap_c: d * gap_min,
        slope: s * gap_min / half,
        residual: fit.rms * gap_min,
        min_control: x_min,
        min_gap: gap_min,
        window: (x_min - half, x_min + half),
        samples: xs.into_iter().zip(ys).collect(),
    })
}

/// Avoided crossing of the two lowest levels of `base` along `axis`; the
/// other control stays at its value in `base`.
pub fn locate_avoided_crossing(
    base: &IsingHamiltonian,
    axis: ScanAxis,
    interval: (f64, f64),
    opts: &CrossingOptions,
) -> Result<CrossingFit> {
    let gap = |x: f64| -> Result<f64> {
        let s = lowest_spectrum(&axis.at(base, x), 2, false)?;
        Ok(s.energies[1] - s.energies[0])
    };
    // Each diabatic level changes by at most 2 per unit control per spin.
    let slope_bound = base.n_spins() as f64;
    locate_gap_minimum(gap, interval, slope_bound, opts)
}

/// `[0.5, 1.5] × h_c(ℓ)` at `g = 0`, which brackets the crossing for the
/// transverse fields of interest.
pub fn default_h_interval(chain: &ChainSpec) -> Result<(f64, f64)> {
    let h0 = g0_breaking_field(chain)?;
    Ok((0.5 * h0, 1.5 * h0))
}

#[derive(Clone, Debug, Serialize)]
pub struct GapScaling {
    /// `b` in `Δ_c ∝ (g / b)^ℓ`.
    pub base: f64,
    /// `A` in `Δ_c = A (g / b)^ℓ`.
    pub prefactor: f64,
    /// RMS residual of the `ln Δ_c` fit.
    pub rms: f64,
    /// `(ℓ, h_c, Δ_c)` for every point used in the fit.
    pub points: Vec<(usize, f64, f64)>,
    /// Lengths dropped because the gap fell below the precision floor.
    pub excluded: Vec<usize>,
}

const GAP_FLOOR: f64 = 1e-13;

/// Fits `ln Δ_c = ln A + ℓ ln(g / b)` to precomputed `(ℓ, h_c, Δ_c)` points.
pub fn fit_gap_scaling(g: f64, points: &[(usize, f64, f64)]) -> Result<GapScaling> {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for &p in points {
        if p.2 < GAP_FLOOR {
            excluded.push(p.0);
        } else {
            kept.push(p);
        }
    }
    if kept.len() < 2 {
        return Err(Error::Fit(format!("{} usable lengths for the gap fit", kept.len())));
    }
    let x: Vec<f64> = kept.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = kept.iter().map(|p| p.2.ln()).collect();
    let line = linear_fit(&x, &y)?;
    Ok(GapScaling {
        base: g * (-line.slope).exp(),
        prefactor: line.intercept.exp(),
        rms: line.rms,
        points: kept,
        excluded,
    })
}

/// Locates the crossing in `h` at transverse field `g` for each length and
/// fits the exponential decay of the gap (exponential kernel).
pub fn gap_length_scaling(
    kernel: CouplingKernel,
    g: f64,
    ells: &[usize],
    opts: &CrossingOptions,
) -> Result<GapScaling> {
    if ells.len() < 4 {
        return Err(Error::Domain(format!("gap scaling needs at least 4 lengths, got {}", ells.len())));
    }
    let points = ells
        .iter()
        .map(|&ell| {
            let chain = ChainSpec::static_chain(ell, kernel)?;
            let op = IsingHamiltonian::for_chain(&chain, 0.0, g)?;
            let fit = locate_avoided_crossing(&op, ScanAxis::H, default_h_interval(&chain)?, opts)?;
            Ok((ell, fit.control_c, fit.gap_c))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_gap_scaling(g, &points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_two_level_crossing() {
        let (xc, d, s) = (0.37, 2.5e-3, 4.0);
        let fit = locate_gap_minimum(|x| Ok(two_level_gap(x, xc, d, s)), (0.1, 0.9), 10.0, &CrossingOptions::default())
            .unwrap();
        assert!((fit.control_c - xc).abs() < 1e-9);
        assert!((fit.gap_c - d).abs() < 1e-9 * d.max(1.0));
        assert!((fit.slope - s).abs() < 1e-6 * s);
        assert!(fit.residual <= 1e-6 * fit.gap_c);
    }

    #[test]
    fn edge_minimum_is_a_bracket_error() {
        let r = locate_gap_minimum(|x| Ok(x), (0.0, 1.0), 1.0, &CrossingOptions::default());
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn toy_gap_scaling_recovers_base() {
        let g = 1.2;
        let pts: Vec<_> = (5..=11).map(|l| (l, 0.0, (g / 2.0f64).powi(l as i32))).collect();
        let s = fit_gap_scaling(g, &pts).unwrap();
        assert!((s.base - 2.0).abs() < 1e-12);
        assert!((s.prefactor - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_gaps_are_excluded() {
        let pts = [(3, 0.0, 1e-2), (4, 0.0, 1e-3), (5, 0.0, 1e-4), (6, 0.0, 1e-15)];
        let s = fit_gap_scaling(1.0, &pts).unwrap();
        assert_eq!(s.excluded, vec![6]);
        assert_eq!(s.points.len(), 3);
    }
}
