//! Ground-state entanglement entropy of arrays of harmonic chains coupled
//! through a collective all-to-all inter-chain interaction.
//!
//! The coupling matrix of the array has a block-Toeplitz structure: one
//! banded Toeplitz symbol inside each chain and a second one shared by every
//! pair of chains. Both square roots of the potential matrix inherit that
//! structure, which lets correlation windows, block spectra, and entropies be
//! computed on n_x-sized matrices regardless of the number of chains.
//!
//! Modules:
//! - [`model`]: couplings, lattice geometry, block placement, validation.
//! - [`spectral`]: Toeplitz symbols, band extrema, log-determinant estimates.
//! - [`correlations`]: structured V^{1/2} and V^{-1/2}, block windows.
//! - [`entropy`]: sector spectra and the bosonic entropy functional.
//! - [`analysis`]: sweeps, scaling fits, and consistency checks.
//! - [`oracle`]: dense reference path for cross-checking.

pub mod analysis;
pub mod correlations;
pub mod entropy;
mod error;
pub(crate) mod linalg;
pub mod model;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
