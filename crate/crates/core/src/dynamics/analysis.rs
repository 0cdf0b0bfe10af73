use serde::Serialize;

use super::ramp::RampResult;
use crate::fit::linear_fit;
use crate::{Error, Result};

fn check_lz(gap_c: f64, slope: f64) -> Result<()> {
    if !(slope > 0.0) {
        return Err(Error::Domain(format!("slope = {slope} must be positive")));
    }
    if !(gap_c >= 0.0) {
        return Err(Error::Domain(format!("gap = {gap_c} must be non-negative")));
    }
    Ok(())
}

/// Diabatic transition probability `exp(-π Δ_c^2 τ / (4 slope))`.
pub fn landau_zener_probability(gap_c: f64, slope: f64, tau: f64) -> Result<f64> {
    check_lz(gap_c, slope)?;
    Ok((-std::f64::consts::PI * gap_c * gap_c * tau / (4.0 * slope)).exp())
}

/// Ramp time `τ_* = 4 slope / (π Δ_c^2)` at which `P_LZ = 1/e`.
pub fn tau_star(gap_c: f64, slope: f64) -> Result<f64> {
    check_lz(gap_c, slope)?;
    Ok(4.0 * slope / (std::f64::consts::PI * gap_c * gap_c))
}

/// `P_m = (m_0 + m_f) / (2 m_0)`.
pub fn magnetization_population_estimate(m_z0: f64, m_zf: f64) -> Result<f64> {
    if m_z0 == 0.0 {
        return Err(Error::UndefinedEstimate("initial magnetization is zero".into()));
    }
    Ok((m_z0 + m_zf) / (2.0 * m_z0))
}

/// All zero crossings of `values` against `controls`, linearly interpolated.
pub fn sign_changes(controls: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..controls.len().min(values.len()).saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            let (c0, c1) = (controls[i], controls[i + 1]);
            out.push(c0 + (c1 - c0) * a / (a - b));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignChange {
    /// Control value of the first zero of `m_z`.
    pub first: f64,
    /// Every crossing in ramp order.
    pub all: Vec<f64>,
}

/// Control value `h_sb` where `m_z` first changes sign.
pub fn locate_sign_change(result: &RampResult) -> Result<SignChange> {
    let all = sign_changes(&result.controls(), &result.magnetizations());
    match all.first() {
        Some(&first) => Ok(SignChange { first, all }),
        None => Err(Error::NotFound("m_z does not change sign during the ramp".into())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingFit {
    /// `A` in `h_sb - h_c = A τ^b`.
    pub prefactor: f64,
    /// `b` in `h_sb - h_c = A τ^b`.
    pub exponent: f64,
    pub rms: f64,
    pub used: Vec<(f64, f64)>,
    /// `τ` values dropped because `h_sb ≤ h_c`.
    pub excluded: Vec<f64>,
}

/// Least-squares fit of `ln(h_sb - h_c)` against `ln τ`.
pub fn scaling_fit(pairs: &[(f64, f64)], h_c: f64) -> Result<ScalingFit> {
    if pairs.len() < 5 {
        return Err(Error::Domain(format!("scaling fit needs at least 5 ramp times, got {}", pairs.len())));
    }
    let (used, dropped): (Vec<_>, Vec<_>) = pairs.iter().partition(|(_, h)| *h - h_c > 0.0);
    if used.len() < 2 {
        return Err(Error::Fit("fewer than two points above h_c".into()));
    }
    let x: Vec<f64> = used.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = used.iter().map(|(_, h)| (h - h_c).ln()).collect();
    let line = linear_fit(&x, &y)?;
    Ok(ScalingFit {
        prefactor: line.intercept.exp(),
        exponent: line.slope,
        rms: line.rms,
        used,
        excluded: dropped.into_iter().map(|(t, _)| t).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseCurve {
    pub tau: f64,
    /// `((h - h_c) τ^{-b}, m_z)` pairs.
    pub points: Vec<(f64, f64)>,
}

/// Rescales each ramp's `m_z(h)` so that all sign changes line up when
/// `h_sb - h_c ∝ τ^exponent`.
pub fn collapse_curves(runs: &[(f64, &RampResult)], h_c: f64, exponent: f64) -> Vec<CollapseCurve> {
    runs.iter()
        .map(|&(tau, r)| CollapseCurve {
            tau,
            points: r
                .samples
                .iter()
                .map(|s| ((s.control - h_c) * tau.powf(-exponent), s.m_z))
                .collect(),
        })
        .collect()
}

fn interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        (x >= x0 && x <= x1 && x1 > x0).then(|| y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    })
}

/// Largest pointwise spread of the collapsed curves on `[lo, hi]` (in
/// rescaled units), sampled on `n` points.
pub fn collapse_spread(curves: &[CollapseCurve], lo: f64, hi: f64, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
        let ys: Vec<f64> = curves.iter().filter_map(|c| interpolate(&c.points, x)).collect();
        if ys.len() >= 2 {
            let max = ys.iter().copied().fold(f64::MIN, f64::max);
            let min = ys.iter().copied().fold(f64::MAX, f64::min);
            worst = worst.max(max - min);
        }
    }
    worst
}
