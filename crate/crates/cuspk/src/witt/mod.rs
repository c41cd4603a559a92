//! Big Witt vectors over finite fields (and over the integers for oracle
//! testing): truncation sets, ghost components, universal structure
//! polynomials with asserted integrality, Verschiebung, Frobenius, and
//! Teichmuller lifts.

pub mod field;
pub mod poly;
pub mod table;
mod truncation;
mod vector;

pub use field::{FieldElem, FiniteField};
pub use table::{StructureTable, TableStore, DEFAULT_TABLE_CAP};
pub use truncation::TruncationSet;
pub use vector::{WittIntRing, WittIntVector, WittRing, WittVector, DEFAULT_ENUM_CAP};
