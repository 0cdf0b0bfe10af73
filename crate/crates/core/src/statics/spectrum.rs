use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{dense_lowest, lanczos_lowest, EigenPairs, LanczosOptions};
use crate::model::IsingHamiltonian;
use crate::{Error, Result};

/// Which control parameter a scan varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    /// Longitudinal field `h` at fixed `g`.
    H,
    /// Transverse field `g` at fixed `h`.
    G,
}

impl ScanAxis {
    /// Copy of `base` with the scanned control set to `x`.
    pub fn at(self, base: &IsingHamiltonian, x: f64) -> IsingHamiltonian {
        match self {
            ScanAxis::H => base.with_control(x, base.g()),
            ScanAxis::G => base.with_control(base.h(), x),
        }
    }

    pub fn control(self, op: &IsingHamiltonian) -> f64 {
        match self {
            ScanAxis::H => op.h(),
            ScanAxis::G => op.g(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    /// Spin count up to which the full dense spectrum is computed.
    pub dense_max_spins: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            dense_max_spins: 8,
            lanczos: LanczosOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSlice {
    /// Value of the scanned control (`h` unless set otherwise by a scan).
    pub control: f64,
    pub energies: Vec<f64>,
    /// Inner-chain magnetization `<m_z>` of each eigenstate.
    pub magnetizations: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
}

/// Lowest `k` eigenpairs of `op` with default solver options.
pub fn lowest_spectrum(op: &IsingHamiltonian, k: usize, want_vectors: bool) -> Result<SpectrumSlice> {
    lowest_spectrum_with(op, k, want_vectors, &SpectrumOptions::default())
}

pub fn lowest_spectrum_with(
    op: &IsingHamiltonian,
    k: usize,
    want_vectors: bool,
    opts: &SpectrumOptions,
) -> Result<SpectrumSlice> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::Domain(format!("requested {k} levels of a {dim}-dimensional space")));
    }
    let pairs = if op.g() == 0.0 {
        classical_lowest(op, k)
    } else if op.n_spins() <= opts.dense_max_spins {
        dense_lowest(&op.to_dense()?, k)
    } else {
        lanczos_lowest(op, k, &opts.lanczos)?
    };
    let inner = op.chain().inner_spins();
    let magnetizations = pairs
        .vectors
        .iter()
        .map(|v| inner_magnetization(v, inner.clone()))
        .collect();
    Ok(SpectrumSlice {
        control: op.h(),
        energies: pairs.values,
        magnetizations,
        eigenvectors: want_vectors.then_some(pairs.vectors),
        residuals: pairs.residuals,
    })
}

/// At `g = 0` the Hamiltonian is diagonal and its eigenvectors are basis
/// states; ties are ordered by basis index.
fn classical_lowest(op: &IsingHamiltonian, k: usize) -> EigenPairs {
    let diag = op.diagonal();
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    order.truncate(k);
    let values = order.iter().map(|&s| diag[s]).collect();
    let vectors = order
        .iter()
        .map(|&s| {
            let mut v = vec![0.0; diag.len()];
            v[s] = 1.0;
            v
        })
        .collect();
    EigenPairs {
        values,
        vectors,
        residuals: vec![0.0; k],
    }
}

fn inner_magnetization(v: &[f64], inner: std::ops::Range<usize>) -> f64 {
    let width = inner.len() as f64;
    let mask: usize = inner.clone().map(|b| 1usize << b).sum();
    let total: f64 = v
        .iter()
        .enumerate()
        .map(|(s, a)| {
            let up = (s & mask).count_ones() as f64;
            a * a * (2.0 * up - width)
        })
        .sum();
    total / width
}

/// Spectra at each value of `controls` along `axis`, in input order.
pub fn scan_spectrum(
    base: &IsingHamiltonian,
    axis: ScanAxis,
    controls: &[f64],
    k: usize,
    want_vectors: bool,
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumSlice>> {
    controls
        .par_iter()
        .map(|&x| {
            let mut slice = lowest_spectrum_with(&axis.at(base, x), k, want_vectors, opts)?;
            slice.control = x;
            Ok(slice)
        })
        .collect()
}
