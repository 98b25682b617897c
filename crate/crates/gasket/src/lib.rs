//! Certified Hausdorff-dimension brackets for Apollonian-gasket subsystems.
//!
//! Everything downstream of the interval layer computes with directed
//! rounding, so every reported bound is a machine-checked inequality.

pub mod apollonian;
pub mod complex;
pub mod distortion;
pub mod error;
pub mod interval;
pub mod moebius;
pub mod pressure;
pub mod spectrum;

pub use complex::RigorousComplex;
pub use error::{GasketError, Result};
pub use interval::RigorousScalar;
pub use moebius::{Disk, MoebiusMap};
