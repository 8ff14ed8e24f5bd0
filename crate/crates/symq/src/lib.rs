//! Symmetrized execution toolkit for trapped-ion circuits.

pub mod aggregate;
pub mod analysis;
pub mod circuit;
pub mod error;
pub mod harness;
pub mod seeds;
pub mod sim;
pub mod symmetry;
pub mod voting;

pub use error::{Error, Result};
