//! Numerical laboratory for the vector Allen-Cahn energy
//! `E(u; B_R) = int_{B_R} |grad u|^2 / 2 + W(u)` with a single-zero potential.
//!
//! Every numerical routine is generic over [`Scalar`] (`f32` or `f64`);
//! the `*64` aliases below fix the scalar to `f64`, which is what the
//! experiments and reports use.

pub mod boundary;
pub mod competitor;
pub mod error;
pub mod field;
pub mod growth;
pub mod minimizer;
pub mod monotonicity;
pub mod optimize;
pub mod potential;
pub mod scalar;
pub mod slice;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Grid64 = field::Grid<f64>;
pub type VectorField64 = field::VectorField<f64>;
pub type ScalarField64 = field::ScalarField<f64>;
pub type PotentialSpec64 = potential::PotentialSpec<f64>;
