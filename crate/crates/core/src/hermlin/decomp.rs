use nalgebra::linalg::{SymmetricEigen, SVD};
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ComplexMatrix, HermlinError, HERMITIAN_TOL};

/// Eigen-decomposition of a Hermitian matrix; eigenvalues are descending and
/// column `i` of `vectors` belongs to `values[i]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        (0..self.vectors.rows())
            .map(|r| self.vectors[(r, i)])
            .collect()
    }
}

/// `M = U diag(singular_values) V†` with singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Hermitian eigen-decomposition. The input is symmetrized before
/// factorization, so entry mismatches below [`HERMITIAN_TOL`] are absorbed.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen, HermlinError> {
    check_hermitian(m)?;
    let sym = m.hermitian_part();
    let eig = SymmetricEigen::new(sym.to_nalgebra());
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only (descending).
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, HermlinError> {
    check_hermitian(m)?;
    let mut vals: Vec<f64> = SymmetricEigen::new(m.hermitian_part().to_nalgebra())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64, HermlinError> {
    Ok(*hermitian_eigenvalues(m)?.last().unwrap_or(&f64::NAN))
}

fn check_hermitian(m: &ComplexMatrix) -> Result<(), HermlinError> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(HermlinError::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Thin singular value decomposition.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let dec = SVD::new(m.to_nalgebra(), true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V^T");
    let k = dec.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let singular_values = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u = ComplexMatrix::from_fn(m.rows(), k, |r, c| u[(r, order[c])]);
    let v = ComplexMatrix::from_fn(m.cols(), k, |r, c| v_t[(order[c], r)].conj());
    Svd {
        u,
        singular_values,
        v,
    }
}

/// Singular values only, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.to_nalgebra(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `[[Re H, -Im H], [Im H, Re H]]`.
pub fn real_embed(h: &ComplexMatrix) -> Result<DMatrix<f64>, HermlinError> {
    check_hermitian(h)?;
    let n = h.rows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(n + i, n + j)] = z.re;
            out[(n + i, j)] = z.im;
            out[(i, n + j)] = -z.im;
        }
    }
    Ok(out)
}
