//! Entanglement transfer between two remote atom qubits in a lossy
//! two-cavity network joined by a fiber, with parity-deformed field modes.
//!
//! The pipeline is: [`network::assemble_hamiltonian`] →
//! [`network::diagonalize`] → an initial state from [`scenarios`] →
//! [`dynamics::propagate_closed_form`] → [`observables`]. The [`sweep`]
//! module wraps it into batch runs with CSV/JSON output.

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod network;
pub mod observables;
pub mod parity;
pub mod scenarios;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Execution;
pub use network::{DressedBasis, NetworkParams};
pub use scenarios::{InitialState, Preset, ScenarioConfig};
