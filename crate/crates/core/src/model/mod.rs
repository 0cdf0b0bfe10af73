//! Chain geometry, boundary-induced fields and the Ising Hamiltonian.

mod chain;
mod fields;
mod kernel;
mod operator;
mod state;

pub use chain::{Boundary, ChainSpec, SiteLayout, Spin};
pub use fields::{effective_field, effective_field_summed, vacuum_field, FieldProfile};
pub use kernel::{coupling_strength, CouplingKernel};
pub use operator::{assemble_operator, diagonal_energy, IsingHamiltonian, DEFAULT_MAX_SPINS};
pub use state::StateVector;
