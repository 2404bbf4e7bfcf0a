//! Partial separability of pure multi-qubit states.
//!
//! A block of qubits splits off a pure state as a tensor factor exactly when
//! the reduced state of the block is pure, which is the same as its
//! coherent vector reaching the maximal squared norm `2 (1 - 2^-m)`. This
//! crate computes those norms, cross-checks every verdict against the
//! Schmidt rank of the amplitudes, finds the finest tensor factorization of
//! a state, and regenerates the three-qubit classification by support.
//!
//! Qubit 1 is the most significant bit of the amplitude index.

pub mod classify;
pub mod cli;
pub mod error;
pub mod paulispace;
pub mod rearrange;
pub mod sepcrit;
pub mod statecore;

pub use error::{Error, Result};
pub use statecore::{DensityMatrix, PureState, QubitLabel, Subsystem};
