//! Exact computation of formal operations on Hochschild complexes of
//! commutative algebras.

pub mod algebra;
pub mod circle;
pub mod error;
pub mod finset;
pub mod formal;
pub mod homology;
pub mod loday;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use finset::{FinSetMap, Morphism};
pub use scalar::{Field, Scalar};
