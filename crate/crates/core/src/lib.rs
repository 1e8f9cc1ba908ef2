//! Exact mapping of N-level quantum dynamics onto networks of classical coupled oscillators.
//!
//! Closed systems map through either the coherence vector of the density matrix
//! ([`liouville_map`]) or the real and imaginary parts of the state vector
//! ([`schrodinger_map`]); open systems with a relaxation matrix map through
//! [`dissipative`]. [`oscillator_network`] turns the resulting generators into
//! spring constants and propagates them, and [`verify`] checks the classical
//! trajectories against exact quantum evolution.

// `!(x > 0.0)` is used on purpose so NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dissipative;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod liouville_map;
pub mod ode;
pub mod operator_basis;
pub mod oscillator_network;
pub mod schrodinger_map;
pub mod verify;

pub use error::{Error, Result};
pub use hamiltonian::{Hamiltonian, TwoLevelParams};
pub use liouville_map::{Generator, GeneratorSource};
pub use operator_basis::{CoherenceVector, OperatorBasis};
pub use oscillator_network::{OscillatorNetwork, Trajectory};
