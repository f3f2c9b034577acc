//! Dense complex linear algebra: tensor products, partial traces and
//! transposes, Hermitian eigen-decomposition, SVD, the symmetric-subspace
//! isometry and the real embedding of Hermitian matrices.

mod decomp;
mod matrix;
mod ops;
mod sym;

use thiserror::Error;

pub use decomp::{
    hermitian_eig, hermitian_eigenvalues, min_eigenvalue, real_embed, singular_values, svd,
    HermitianEigen, Svd,
};
pub use matrix::{ComplexMatrix, HERMITIAN_TOL};
pub use ops::{
    compose, digits, kron, kron_all, partial_trace, partial_trace_systems, partial_transpose,
    partial_transpose_index, partial_transpose_systems, permutation_map, permute_systems,
    BipartitionLayout, Side,
};
pub use sym::{sym_isometry, symmetric_basis, symmetric_dim, SparseColumn};

pub use num_complex::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HermlinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max entry deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("partial trace needs at least one kept subsystem")]
    EmptyKeepSet,
}
