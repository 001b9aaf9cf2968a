//! Exact homology: sparse elimination, finite complexes and the complex of
//! formal operations.

pub mod complex;
pub mod linalg;
pub mod nat;

pub use complex::{FiniteChainComplex, HomologyDegree};
pub use linalg::{SparseMatrix, SparseVec};
pub use nat::{nat_complex, nat_homology_report, NatBasisIndex, NatComplex, NatHomologyReport};
