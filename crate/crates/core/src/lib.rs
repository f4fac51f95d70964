//! Exact small-scale simulation of Set Local Hamiltonian instances, CRESP
//! games and Pointer QPCP verifiers, with the reductions between them.

pub mod chain;
pub mod cli;
pub mod config;
pub mod encoding;
mod error;
pub mod game;
pub mod generate;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod reductions;
pub mod slh;

pub use config::{Limits, Tolerances};
pub use error::{Error, Result};
