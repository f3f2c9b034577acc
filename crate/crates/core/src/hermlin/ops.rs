//! Tensor-product bookkeeping on composite systems.
//!
//! Composite indices are big-endian: the leftmost subsystem is the slowest
//! varying digit.

use num_complex::Complex64;

use super::{ComplexMatrix, HermlinError};

/// Subsystem dimensions together with a cut separating the left party from
/// the right party.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitionLayout {
    dims: Vec<usize>,
    cut: usize,
}

/// Which side of a [`BipartitionLayout`] an operation applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl BipartitionLayout {
    pub fn new(dims: Vec<usize>, cut: usize) -> Result<Self, HermlinError> {
        if cut == 0 || cut >= dims.len() {
            return Err(HermlinError::InvalidLayout(format!(
                "cut {cut} must satisfy 1 <= cut < {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(HermlinError::InvalidLayout(
                "zero subsystem dimension".into(),
            ));
        }
        Ok(Self { dims, cut })
    }

    /// Two-party layout `d_a | d_b`.
    pub fn bipartite(d_a: usize, d_b: usize) -> Result<Self, HermlinError> {
        Self::new(vec![d_a, d_b], 1)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn left_dim(&self) -> usize {
        self.dims[..self.cut].iter().product()
    }

    pub fn right_dim(&self) -> usize {
        self.dims[self.cut..].iter().product()
    }

    /// Subsystem indices belonging to `side`.
    pub fn systems(&self, side: Side) -> Vec<usize> {
        match side {
            Side::Left => (0..self.cut).collect(),
            Side::Right => (self.cut..self.dims.len()).collect(),
        }
    }

    fn check(&self, m: &ComplexMatrix) -> Result<(), HermlinError> {
        check_square(m, self.total_dim())
    }
}

fn check_square(m: &ComplexMatrix, dim: usize) -> Result<(), HermlinError> {
    if m.rows() != dim || m.cols() != dim {
        return Err(HermlinError::DimensionMismatch {
            expected: dim,
            found: if m.rows() != dim { m.rows() } else { m.cols() },
        });
    }
    Ok(())
}

/// Splits a composite index into per-subsystem digits.
pub fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for s in (0..dims.len()).rev() {
        out[s] = index % dims[s];
        index /= dims[s];
    }
}

pub fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Maps a matrix position `(row, col)` to its position after transposing the
/// subsystems flagged in `mask`.
pub fn partial_transpose_index(
    row: usize,
    col: usize,
    dims: &[usize],
    mask: &[bool],
    scratch: &mut [usize],
) -> (usize, usize) {
    let n = dims.len();
    let (rd, cd) = scratch.split_at_mut(n);
    digits(row, dims, rd);
    digits(col, dims, cd);
    for s in 0..n {
        if mask[s] {
            std::mem::swap(&mut rd[s], &mut cd[s]);
        }
    }
    (compose(rd, dims), compose(cd, dims))
}

/// Transposes the listed subsystems of `m`.
pub fn partial_transpose_systems(
    m: &ComplexMatrix,
    dims: &[usize],
    systems: &[usize],
) -> Result<ComplexMatrix, HermlinError> {
    let total: usize = dims.iter().product();
    check_square(m, total)?;
    let mut mask = vec![false; dims.len()];
    for &s in systems {
        if s >= dims.len() {
            return Err(HermlinError::InvalidLayout(format!("no subsystem {s}")));
        }
        mask[s] = true;
    }
    let mut scratch = vec![0; 2 * dims.len()];
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            let (pi, pj) = partial_transpose_index(i, j, dims, &mask, &mut scratch);
            out[(pi, pj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Partial transpose of one party of a bipartition.
pub fn partial_transpose(
    m: &ComplexMatrix,
    layout: &BipartitionLayout,
    side: Side,
) -> Result<ComplexMatrix, HermlinError> {
    layout.check(m)?;
    partial_transpose_systems(m, layout.dims(), &layout.systems(side))
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original order.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &BipartitionLayout,
    keep: &[usize],
) -> Result<ComplexMatrix, HermlinError> {
    layout.check(m)?;
    partial_trace_systems(m, layout.dims(), keep)
}

pub fn partial_trace_systems(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix, HermlinError> {
    if keep.is_empty() {
        return Err(HermlinError::EmptyKeepSet);
    }
    let total: usize = dims.iter().product();
    check_square(m, total)?;
    let mut kept = vec![false; dims.len()];
    for &s in keep {
        if s >= dims.len() {
            return Err(HermlinError::InvalidLayout(format!("no subsystem {s}")));
        }
        kept[s] = true;
    }
    let keep_sorted: Vec<usize> = (0..dims.len()).filter(|&s| kept[s]).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&s| dims[s]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mut kr = vec![0; keep_sorted.len()];
    let mut kc = vec![0; keep_sorted.len()];
    for i in 0..total {
        digits(i, dims, &mut rd);
        for j in 0..total {
            digits(j, dims, &mut cd);
            let traced_match = (0..dims.len()).all(|s| kept[s] || rd[s] == cd[s]);
            if !traced_match {
                continue;
            }
            for (t, &s) in keep_sorted.iter().enumerate() {
                kr[t] = rd[s];
                kc[t] = cd[s];
            }
            let oi = compose(&kr, &keep_dims);
            let oj = compose(&kc, &keep_dims);
            out[(oi, oj)] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorders subsystems: subsystem `perm[t]` of the input becomes subsystem `t`
/// of the output.
pub fn permute_systems(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix, HermlinError> {
    let total: usize = dims.iter().product();
    check_square(m, total)?;
    let map = permutation_map(dims, perm)?;
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Index map `old -> new` for [`permute_systems`]; also usable on vectors.
pub fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>, HermlinError> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
    {
        return Err(HermlinError::InvalidLayout(format!(
            "{perm:?} is not a permutation of 0..{n}"
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let mut d = vec![0; n];
    let mut nd = vec![0; n];
    Ok((0..total)
        .map(|i| {
            digits(i, dims, &mut d);
            for t in 0..n {
                nd[t] = d[perm[t]];
            }
            compose(&nd, &new_dims)
        })
        .collect())
}
