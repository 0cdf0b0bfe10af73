use serde::{Deserialize, Serialize};

use crate::zeta::{harmonic, hurwitz_zeta, MIN_EXPONENT};
use crate::{Error, Result};

/// Distance-dependent ferromagnetic coupling `J(d)`, normalised so that the
/// exponential family has `J(1) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingKernel {
    /// `J(d) = exp(-(d - 1) / xi)`.
    Exponential { xi: f64 },
    /// `J(d) = d^(-alpha)`, `alpha > 1`.
    PowerLaw { alpha: f64 },
}

impl CouplingKernel {
    pub fn exponential(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::Domain(format!("xi must be positive and finite, got {xi}")));
        }
        Ok(CouplingKernel::Exponential { xi })
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > MIN_EXPONENT && alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "alpha must exceed 1 for convergent tails, got {alpha}"
            )));
        }
        Ok(CouplingKernel::PowerLaw { alpha })
    }

    /// Re-checks the parameter domain, for kernels built by struct literal or
    /// deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            CouplingKernel::Exponential { xi } => Self::exponential(xi).map(|_| ()),
            CouplingKernel::PowerLaw { alpha } => Self::power_law(alpha).map(|_| ()),
        }
    }

    pub fn coupling(&self, d: usize) -> Result<f64> {
        if d == 0 {
            return Err(Error::InvalidDistance(d));
        }
        Ok(self.at(d))
    }

    /// Unchecked `J(d)`; `d` must be at least 1.
    #[inline]
    pub(crate) fn at(&self, d: usize) -> f64 {
        debug_assert!(d >= 1);
        match *self {
            CouplingKernel::Exponential { xi } => (-((d - 1) as f64) / xi).exp(),
            CouplingKernel::PowerLaw { alpha } => (d as f64).powf(-alpha),
        }
    }

    /// `Σ_{d ≥ from} J(d)` in closed form (geometric series or Hurwitz zeta).
    pub fn tail_sum(&self, from: usize) -> f64 {
        let from = from.max(1);
        match *self {
            CouplingKernel::Exponential { xi } => {
                let q = (-1.0 / xi).exp();
                (-((from - 1) as f64) / xi).exp() / (1.0 - q)
            }
            CouplingKernel::PowerLaw { alpha } => {
                hurwitz_zeta(alpha, from as f64).expect("kernel exponent validated at construction")
            }
        }
    }

    /// `Σ_{d=1}^{n} J(d)`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        match *self {
            CouplingKernel::Exponential { xi } => {
                let q = (-1.0 / xi).exp();
                (1.0 - q.powi(n as i32)) / (1.0 - q)
            }
            CouplingKernel::PowerLaw { alpha } => harmonic(n, alpha),
        }
    }
}

/// `J(d)` for the given kernel; `d = 0` is rejected.
pub fn coupling_strength(kernel: &CouplingKernel, d: usize) -> Result<f64> {
    kernel.coupling(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_formula_values() {
        let exp1 = CouplingKernel::exponential(1.0).unwrap();
        assert_eq!(exp1.coupling(1).unwrap(), 1.0);
        assert!((exp1.coupling(3).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let pl = CouplingKernel::power_law(2.2).unwrap();
        assert!((pl.coupling(2).unwrap() - 0.217_637_640_824_031).abs() < 1e-12);
    }

    #[test]
    fn zero_distance_rejected() {
        let k = CouplingKernel::exponential(1.0).unwrap();
        assert!(matches!(k.coupling(0), Err(Error::InvalidDistance(0))));
    }

    #[test]
    fn domain_checks() {
        assert!(CouplingKernel::exponential(0.0).is_err());
        assert!(CouplingKernel::exponential(-1.0).is_err());
        assert!(CouplingKernel::power_law(1.0).is_err());
        assert!(CouplingKernel::power_law(0.5).is_err());
    }

    #[test]
    fn strictly_decreasing() {
        for k in [
            CouplingKernel::exponential(0.7).unwrap(),
            CouplingKernel::power_law(1.5).unwrap(),
        ] {
            for d in 1..50 {
                assert!(k.at(d + 1) < k.at(d));
            }
        }
    }

    #[test]
    fn tail_plus_partial_is_total() {
        for k in [
            CouplingKernel::exponential(1.3).unwrap(),
            CouplingKernel::power_law(2.2).unwrap(),
        ] {
            let total = k.tail_sum(1);
            for n in [1usize, 4, 17] {
                let split = k.partial_sum(n) + k.tail_sum(n + 1);
                assert!((split - total).abs() < 1e-13, "{k:?} n={n}");
            }
        }
    }
}
