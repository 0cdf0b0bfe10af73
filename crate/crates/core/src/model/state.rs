use crate::linalg::{cdot, cnorm};
use crate::{Error, Result, C64};

/// Complex amplitudes over the `2^n` computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_spins: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(n_spins: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n_spins {
            return Err(Error::LengthMismatch {
                expected: 1 << n_spins,
                got: amps.len(),
            });
        }
        Ok(StateVector { n_spins, amps })
    }

    /// Product state with the given basis index.
    pub fn basis(n_spins: usize, index: usize) -> Self {
        let mut amps = vec![C64::default(); 1 << n_spins];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n_spins, amps }
    }

    /// Promotes a real vector (e.g. an eigenvector) to a state; normalizes it.
    pub fn from_real(n_spins: usize, v: &[f64]) -> Result<Self> {
        let mut s = Self::new(n_spins, v.iter().map(|&x| C64::new(x, 0.0)).collect())?;
        s.normalize();
        Ok(s)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        cnorm(&self.amps)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> C64 {
        cdot(&self.amps, &other.amps)
    }

    /// `|a_s|^2` for each basis state.
    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amps.iter().map(|a| a.norm_sqr())
    }
}
