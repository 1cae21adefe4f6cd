//! Classification of invariant algebraic D-modules on unipotent groups,
//! algebraic tori and Borel subgroups.
//!
//! Everything is built on exact Gaussian-rational linear algebra, with a
//! floating-point path for spectra that do not split.

pub mod bch;
pub mod borel;
pub mod dmod;
pub mod error;
pub mod generate;
pub mod intertwine;
pub mod io;
pub mod laurent;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod mpoly;
pub mod poly;
pub mod scalar;
pub mod spectrum;
pub mod tolerance;
pub mod torus;
pub mod unipotent;

pub use error::{DmodError, Result};
pub use matrix::{CMatrix, Matrix, QMatrix};
pub use scalar::{Field, Gq, Ring, Scalar, C64};
pub use tolerance::ToleranceConfig;
