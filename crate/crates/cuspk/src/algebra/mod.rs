//! Exact integer linear algebra: arbitrary-precision matrices, Smith normal
//! form, finite abelian group structures, and generic subgroup closure.

mod closure;
mod matrix;
mod snf;
mod structure;

pub use closure::{
    abelian_structure_from_elements, subgroup_closure, SubgroupClosure, DEFAULT_CLOSURE_CAP,
};
pub use matrix::IntegerMatrix;
pub use snf::{
    kernel_basis, rank, smith_diagonal, smith_normal_form, solve_exact, SnfDecomposition,
};
pub(crate) use snf::snf_diag_and_u_inv;
pub use structure::{cokernel_structure, group_from_parts, homology_at, AbelianGroupStructure};
