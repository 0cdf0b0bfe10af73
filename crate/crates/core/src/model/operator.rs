use std::ops::{Add, Mul};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{ChainSpec, CouplingKernel, FieldProfile, StateVector};
use crate::{Error, Result};

/// Largest spin count accepted by [`assemble_operator`] (2^20 amplitudes).
pub const DEFAULT_MAX_SPINS: usize = 20;

/// Largest spin count for which a dense matrix may be materialised.
pub const MAX_DENSE_SPINS: usize = 12;

const PAR_MIN_DIM: usize = 1 << 12;
const PAR_CHUNK: usize = 1 << 10;

/// Matrix-free transverse-field Ising Hamiltonian over the dynamical spins,
///
/// `H = -Σ_{a<b} J_ab σ^z_a σ^z_b - g Σ_a σ^x_a + Σ_a (f_a - h) σ^z_a`,
///
/// where `f` is the boundary-induced site field (`h_eff`, or `h_vac` for the
/// charge-free reference). The `h`-independent part of the diagonal is
/// tabulated once and shared between copies made by [`with_control`].
///
/// [`with_control`]: IsingHamiltonian::with_control
#[derive(Clone, Debug)]
pub struct IsingHamiltonian {
    chain: ChainSpec,
    fields: FieldProfile,
    vacuum: bool,
    n: usize,
    classical: Arc<Vec<f64>>,
}

/// Builds the operator with the default spin limit.
pub fn assemble_operator(chain: &ChainSpec, fields: &FieldProfile) -> Result<IsingHamiltonian> {
    IsingHamiltonian::build(chain, fields, false, DEFAULT_MAX_SPINS)
}

/// Classical energy of one basis configuration (`true` = spin up), site 1 first.
pub fn diagonal_energy(chain: &ChainSpec, fields: &FieldProfile, s: &[bool]) -> Result<f64> {
    let n = chain.n_spins();
    if s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: s.len(),
        });
    }
    if fields.h_eff.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: fields.h_eff.len(),
        });
    }
    let positions = chain.layout().dynamical;
    let sigma: Vec<f64> = s.iter().map(|&up| if up { 1.0 } else { -1.0 }).collect();
    let mut energy = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let d = positions[a].abs_diff(positions[b]) as usize;
            energy -= chain.kernel.at(d) * sigma[a] * sigma[b];
        }
        energy += (fields.h_eff[a] - fields.h) * sigma[a];
    }
    Ok(energy)
}

fn classical_table(kernel: &CouplingKernel, positions: &[i64], site_field: &[f64]) -> Vec<f64> {
    let n = positions.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b, kernel.at(positions[a].abs_diff(positions[b]) as usize)));
        }
    }
    let energy = |s: usize| -> f64 {
        let spin = |a: usize| if (s >> a) & 1 == 1 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for &(a, b, j) in &pairs {
            e -= j * spin(a) * spin(b);
        }
        for (a, f) in site_field.iter().enumerate() {
            e += f * spin(a);
        }
        e
    };
    let dim = 1usize << n;
    if dim >= PAR_MIN_DIM {
        (0..dim).into_par_iter().map(energy).collect()
    } else {
        (0..dim).map(energy).collect()
    }
}

impl IsingHamiltonian {
    pub fn build(
        chain: &ChainSpec,
        fields: &FieldProfile,
        vacuum: bool,
        max_spins: usize,
    ) -> Result<Self> {
        chain.validate()?;
        let n = chain.n_spins();
        if n > max_spins {
            return Err(Error::Resource(format!(
                "{n} spins exceed the configured maximum of {max_spins}"
            )));
        }
        let site_field = if vacuum { &fields.h_vac } else { &fields.h_eff };
        if site_field.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: site_field.len(),
            });
        }
        let positions = chain.layout().dynamical;
        let classical = classical_table(&chain.kernel, &positions, site_field);
        Ok(IsingHamiltonian {
            chain: *chain,
            fields: fields.clone(),
            vacuum,
            n,
            classical: Arc::new(classical),
        })
    }

    /// Convenience constructor computing the field profile from the chain.
    pub fn for_chain(chain: &ChainSpec, h: f64, g: f64) -> Result<Self> {
        let fields = FieldProfile::new(chain, h, g)?;
        assemble_operator(chain, &fields)
    }

    /// The charge-free reference Hamiltonian (`h_eff` replaced by `h_vac`).
    pub fn vacuum(&self) -> Result<Self> {
        Self::build(&self.chain, &self.fields, true, self.n)
    }

    pub fn is_vacuum(&self) -> bool {
        self.vacuum
    }

    /// Copy at a different `(h, g)`, sharing the tabulated diagonal.
    pub fn with_control(&self, h: f64, g: f64) -> Self {
        let mut out = self.clone();
        out.fields.h = h;
        out.fields.g = g;
        out
    }

    pub fn chain(&self) -> &ChainSpec {
        &self.chain
    }

    pub fn fields(&self) -> &FieldProfile {
        &self.fields
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn h(&self) -> f64 {
        self.fields.h
    }

    pub fn g(&self) -> f64 {
        self.fields.g
    }

    /// Matrix element between basis states differing in one bit.
    pub fn flip_amplitude(&self) -> f64 {
        -self.fields.g
    }

    #[inline]
    fn diag_with(&self, h: f64, s: usize) -> f64 {
        let m = 2.0 * s.count_ones() as f64 - self.n as f64;
        self.classical[s] - h * m
    }

    #[inline]
    pub fn diag_at(&self, s: usize) -> f64 {
        self.diag_with(self.fields.h, s)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|s| self.diag_at(s)).collect()
    }

    /// `y = H x` at the stored control values.
    pub fn apply<T>(&self, x: &[T], y: &mut [T])
    where
        T: Copy + Default + Send + Sync + Add<Output = T> + Mul<f64, Output = T>,
    {
        self.apply_with(self.fields.h, self.fields.g, x, y)
    }

    /// `y = H(h, g) x` without building a new operator. Each output element
    /// is computed independently, so results do not depend on thread count.
    pub fn apply_with<T>(&self, h: f64, g: f64, x: &[T], y: &mut [T])
    where
        T: Copy + Default + Send + Sync + Add<Output = T> + Mul<f64, Output = T>,
    {
        let dim = self.dim();
        assert_eq!(x.len(), dim, "input length");
        assert_eq!(y.len(), dim, "output length");
        let n = self.n;
        let block = |start: usize, ys: &mut [T]| {
            for (off, out) in ys.iter_mut().enumerate() {
                let s = start + off;
                let mut acc = x[s] * self.diag_with(h, s);
                if g != 0.0 {
                    let mut flips = T::default();
                    for b in 0..n {
                        flips = flips + x[s ^ (1 << b)];
                    }
                    acc = acc + flips * (-g);
                }
                *out = acc;
            }
        };
        if dim >= PAR_MIN_DIM {
            y.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(c, ys)| block(c * PAR_CHUNK, ys));
        } else {
            block(0, y);
        }
    }

    /// `⟨ψ|H|ψ⟩` for a normalized state.
    pub fn expectation(&self, state: &StateVector) -> f64 {
        let mut hx = vec![crate::C64::default(); self.dim()];
        self.apply(state.amplitudes(), &mut hx);
        crate::linalg::cdot(state.amplitudes(), &hx).re
    }

    /// Explicit dense matrix, for small systems and cross-checks.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n > MAX_DENSE_SPINS {
            return Err(Error::Resource(format!(
                "dense matrix requested for {} spins (limit {MAX_DENSE_SPINS})",
                self.n
            )));
        }
        let dim = self.dim();
        let g = self.fields.g;
        let mut m = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            m[(s, s)] = self.diag_at(s);
            if g != 0.0 {
                for b in 0..self.n {
                    m[(s ^ (1 << b), s)] = -g;
                }
            }
        }
        Ok(m)
    }
}
