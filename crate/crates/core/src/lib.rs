//! Essential spectra and Fredholm certificates for convolution-dominated
//! operators on discrete groups.

pub mod coeff;
pub mod error;
pub mod fourier;
pub mod group;
pub mod numeric;
pub mod opalg;
pub mod spectra;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
