//! Markovian open-quantum-system toolkit: generators, subsystem
//! certification, deterministic and stochastic dynamics, and feedback
//! synthesis for state and subspace stabilization.

pub mod error;
pub mod linquant;
pub mod random;
pub mod generator;
pub mod models;
pub mod subsystems;
pub mod dynamics;
pub mod synthesis;
pub mod document;
pub mod cli;

pub use error::{Error, Result};
