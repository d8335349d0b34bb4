//! Dense complex linear algebra and small-scale optimisation kernel.

mod eigen;
mod lp;
mod matrix;
mod nelder_mead;

pub use eigen::{hermitian_eigs, hermitian_eigvals, min_eigenvalue, Spectrum};
pub use lp::{solve_lp, Constraint, LinearProgram};
pub use matrix::{
    determinant3, inner, kron_vec, norm, normalize, partial_transpose, partial_transpose_second, tensor_product,
    ComplexMatrix, C64,
};
pub use nelder_mead::{nelder_mead, NelderMeadResult, MAX_DIM as NELDER_MEAD_MAX_DIM};
