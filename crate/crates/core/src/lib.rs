//! Decomposition of orthogonal representations of the symmetric group into
//! irreducible representations.
//!
//! Multiplicities come from the joint spectrum of the Young–Jucys–Murphy
//! matrices, whose rows are content vectors of standard tableaux. Repeated
//! copies of an irreducible are then separated by solving an intertwining
//! null-space problem. The [`oracle`] module recomputes multiplicities from
//! characters so every floating-point result can be checked exactly.

pub mod cli;
pub mod combinatorics;
pub mod decompose;
pub mod eigen;
pub mod error;
pub mod irrep;
pub mod operator;
pub mod oracle;
pub mod repbuild;

pub use combinatorics::{ContentVector, Partition, StandardTableau};
pub use decompose::{block_diagonalize, multiplicities, DecompositionResult};
pub use error::{Error, Result};
pub use repbuild::Representation;
