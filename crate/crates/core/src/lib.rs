//! Disk-model dynamics of attracting basins.
//!
//! A finite Blaschke product is the disk model of a polynomial restricted
//! to an immediate attracting basin. This crate provides:
//!
//! - [`blaschke`]: products, derivatives, preimage solving and
//!   generation-labelled preimage trees;
//! - [`hyperbolic`]: Poincare distance, curve lengths, and the
//!   radial-plus-arc bound curve;
//! - [`shadowing`]: nearest-preimage distances over boundary-approaching
//!   grids, the explicit power-map constants, expanding annuli and
//!   boundary density profiles;
//! - [`polydyn`]: polynomial fixed points, basin membership by iteration,
//!   inverse-orbit trees and deterministic basin rasters.

pub mod blaschke;
pub mod error;
pub mod hyperbolic;
pub mod polydyn;
pub mod roots;
pub mod shadowing;

pub use error::{Error, Result};
pub use num_complex::Complex64;
