//! Numerical laboratory for string breaking in quantum Ising chains with
//! static boundary charges.
//!
//! The crate is organised in layers:
//!
//! * [`model`] builds coupling kernels, boundary-induced fields and the
//!   matrix-free Ising Hamiltonian over the dynamical spins.
//! * [`statics`] covers closed-form `g = 0` results, exact diagonalization,
//!   avoided-crossing fits, long-range phase boundaries and perturbation theory.
//! * [`dynamics`] propagates states through linear field ramps and extracts
//!   magnetization, populations, correlators, potentials and bubble statistics.
//! * [`cli`] holds the configuration format, command dispatch and CSV/JSON
//!   writers behind the `stringbreak` binary.
//!
//! Conventions: bit `1` of a basis index means `σ^z = +1`; site 1 is the least
//! significant bit; energies are in units of the nearest-neighbour coupling.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod model;
pub mod statics;
pub mod zeta;

pub use error::{Error, Result};
pub use model::{
    assemble_operator, coupling_strength, diagonal_energy, effective_field, vacuum_field,
    Boundary, ChainSpec, CouplingKernel, FieldProfile, IsingHamiltonian, StateVector,
};
pub use zeta::zeta_fn;

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
