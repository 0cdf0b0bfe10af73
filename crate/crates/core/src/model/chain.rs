use serde::{Deserialize, Serialize};

use super::CouplingKernel;
use crate::{Error, Result};

/// How the region around the string is modelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Boundary {
    /// Sites `0` and `ell + 1` frozen down, every other external site frozen up.
    StaticExternal,
    /// `n_ext` dynamical spins on each side of the frozen domain-wall pairs.
    DynamicalExternal { n_ext: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    /// Number of dynamical spins between the static charges.
    pub ell: usize,
    pub kernel: CouplingKernel,
    pub boundary: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Explicit positions of dynamical and frozen sites inside a finite window;
/// every site outside `[window_lo, window_hi]` is frozen up.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteLayout {
    pub window_lo: i64,
    pub window_hi: i64,
    /// Positions of the dynamical spins, ascending. Basis bit `a` belongs to
    /// `dynamical[a]`.
    pub dynamical: Vec<i64>,
    pub frozen: Vec<(i64, Spin)>,
}

impl ChainSpec {
    pub fn new(ell: usize, kernel: CouplingKernel, boundary: Boundary) -> Result<Self> {
        let spec = ChainSpec {
            ell,
            kernel,
            boundary,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn static_chain(ell: usize, kernel: CouplingKernel) -> Result<Self> {
        Self::new(ell, kernel, Boundary::StaticExternal)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::Domain("ell must be at least 1".into()));
        }
        if let Boundary::DynamicalExternal { n_ext } = self.boundary {
            if n_ext == 0 {
                return Err(Error::Domain("n_ext must be at least 1".into()));
            }
        }
        self.kernel.validate()
    }

    /// Number of spins carried by the Hilbert space.
    pub fn n_spins(&self) -> usize {
        match self.boundary {
            Boundary::StaticExternal => self.ell,
            Boundary::DynamicalExternal { n_ext } => self.ell + 2 * n_ext,
        }
    }

    /// Basis-bit indices of the `ell` spins between the static charges.
    pub fn inner_spins(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::StaticExternal => 0..self.ell,
            Boundary::DynamicalExternal { n_ext } => n_ext..n_ext + self.ell,
        }
    }

    /// Same chain with the static-external boundary.
    pub fn with_static_boundary(&self) -> Self {
        ChainSpec {
            boundary: Boundary::StaticExternal,
            ..*self
        }
    }

    /// Site geometry with the static charges in place.
    pub fn layout(&self) -> SiteLayout {
        let ell = self.ell as i64;
        match self.boundary {
            Boundary::StaticExternal => SiteLayout {
                window_lo: 0,
                window_hi: ell + 1,
                dynamical: (1..=ell).collect(),
                frozen: vec![(0, Spin::Down), (ell + 1, Spin::Down)],
            },
            Boundary::DynamicalExternal { n_ext } => {
                let n = n_ext as i64;
                let total = ell + 2 * n + 4;
                let frozen = vec![
                    (n + 1, Spin::Up),
                    (n + 2, Spin::Down),
                    (n + ell + 3, Spin::Down),
                    (n + ell + 4, Spin::Up),
                ];
                let dynamical = (1..=total)
                    .filter(|p| frozen.iter().all(|(f, _)| f != p))
                    .collect();
                SiteLayout {
                    window_lo: 1,
                    window_hi: total,
                    dynamical,
                    frozen,
                }
            }
        }
    }

    /// Same geometry with every frozen spin up (no static charges).
    pub fn vacuum_layout(&self) -> SiteLayout {
        let mut layout = self.layout();
        for f in layout.frozen.iter_mut() {
            f.1 = Spin::Up;
        }
        layout
    }
}
