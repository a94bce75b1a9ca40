//! Peano-curve approximations of self-similar spaces, their identification
//! graphs and Laplacian spectra.

pub mod analysis;
pub mod curves;
pub mod error;
pub mod exact;
pub mod graphs;
pub mod reports;
pub mod spectra;

pub use error::{Error, Result};
