//! Relative algebraic K-groups of planar cuspidal curves y^a = x^b over
//! finite fields, computed three independent ways and cross-checked:
//!
//! * a closed form as a product of truncated Witt vector groups,
//! * brute-force enumeration of the big Witt vector quotient
//!   W_S(k) / (V_a W_{S/a}(k) + V_b W_{S/b}(k)),
//! * elimination of the fixed-point/Tate towers computing the odd TC groups.
//!
//! A fourth component checks the weight-graded pieces of the relative cyclic
//! bar construction against the predicted two-cell homology, degree by
//! degree, with exact integer Smith normal forms.

pub mod algebra;
pub mod cli;
pub mod cyclicbar;
pub mod error;
pub mod kgroups;
pub mod semigroup;
pub mod tcmodel;
pub mod witt;

pub use error::{Error, Result};
