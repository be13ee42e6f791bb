//! Eigenvalue and orbit models for nilpotent Gelfand pairs.

pub mod cli;
pub mod error;
pub mod fock;
pub mod moment;
pub mod pairs;
pub mod polyalg;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
