//! Finite-dimensional simulation toolkit for spectral measures of unitary
//! matrices: probability measures on the unit circle, the L² Wasserstein
//! distance for the chordal cost, free multiplicative convolution (moment
//! recursion and random-matrix sampler), Haar unitary sampling with
//! functional calculus, and the two-stage contraction homotopy
//! (spectrum randomization followed by a deformation pulling spectral
//! mass to 1).
//!
//! All operations are deterministic given their seeds; random sampling is
//! derived from 64-bit master seeds through the counter scheme in [`rng`].

pub mod angle;
pub mod backend;
pub mod error;
pub mod freeconv;
pub mod homotopy;
pub mod matrix;
pub mod measure;
pub mod par;
pub mod rng;
pub mod transport;

pub use angle::Angle;
pub use error::CoreError;
pub use matrix::{HermitianGenerator, UnitaryMatrix};
pub use measure::{CircleMeasure, MomentSequence};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
