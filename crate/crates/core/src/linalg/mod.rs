//! Deterministic vector kernels and the symmetric eigensolvers.

mod eigs;
mod vector;

pub use eigs::{dense_lowest, lanczos_lowest, EigenPairs, LanczosOptions, SymmetricOperator};
pub use vector::{axpy, cdot, cnorm, dot, norm, scale};
