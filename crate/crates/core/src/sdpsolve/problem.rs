use nalgebra::DMatrix;

use super::SdpError;

/// One stored entry of a block-diagonal symmetric matrix. Only the upper
/// triangle (`row <= col`) is stored; an off-diagonal entry stands for both
/// `(row, col)` and `(col, row)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Sparse block-diagonal symmetric matrix.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockSparse {
    entries: Vec<SymEntry>,
}

impl BlockSparse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)` and, implicitly, at `(col, row)`.
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: f64) {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push(SymEntry {
            block,
            row,
            col,
            value,
        });
    }

    pub fn identity(block: usize, n: usize) -> Self {
        let mut m = Self::new();
        for i in 0..n {
            m.push(block, i, i, 1.0);
        }
        m
    }

    /// Reads the upper triangle of a dense symmetric matrix.
    pub fn from_dense(block: usize, m: &DMatrix<f64>) -> Result<Self, SdpError> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(SdpError::InvalidProblem(
                "block matrix must be square".into(),
            ));
        }
        let mut out = Self::new();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)]).abs() > super::SYMMETRY_TOL {
                    return Err(SdpError::InvalidProblem(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
                if m[(i, j)] != 0.0 {
                    out.push(block, i, j, m[(i, j)]);
                }
            }
        }
        Ok(out)
    }

    pub fn entries(&self) -> &[SymEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts entries, merges duplicates and drops exact zeros.
    pub fn canonicalize(&mut self) {
        self.entries.sort_by_key(|e| (e.block, e.row, e.col));
        let mut merged: Vec<SymEntry> = Vec::with_capacity(self.entries.len());
        for e in self.entries.drain(..) {
            match merged.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => {
                    last.value += e.value;
                }
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.value != 0.0);
        self.entries = merged;
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| SymEntry {
                    value: e.value * s,
                    ..*e
                })
                .collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let mut out = self.clone();
        out.entries.extend(other.scaled(s).entries);
        out.canonical()
    }

    /// Trace inner product `<self, X>` against dense blocks.
    pub fn inner(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let v = e.value * x[e.block][(e.row, e.col)];
                if e.row == e.col {
                    v
                } else {
                    2.0 * v
                }
            })
            .sum()
    }

    /// Sum of the diagonal entries restricted to the given blocks.
    pub fn trace_on(&self, blocks: &[usize]) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.row == e.col && blocks.contains(&e.block))
            .map(|e| e.value)
            .sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let v = e.value * e.value;
                if e.row == e.col {
                    v
                } else {
                    2.0 * v
                }
            })
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.value.abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self, block_dims: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        self.add_to_dense(1.0, &mut out);
        out
    }

    /// `out += s * self`.
    pub fn add_to_dense(&self, s: f64, out: &mut [DMatrix<f64>]) {
        for e in &self.entries {
            let m = &mut out[e.block];
            m[(e.row, e.col)] += s * e.value;
            if e.row != e.col {
                m[(e.col, e.row)] += s * e.value;
            }
        }
    }
}

/// Linear equality `<A_i, X> = rhs` of the primal problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub matrix: BlockSparse,
    pub rhs: f64,
}

/// Linear equality on the dual vector, `sum_i coeffs_i y_i = rhs`.
///
/// In the primal it appears as a free variable `z` with column `coeffs`
/// added to the equality constraints and cost `rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualEquality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Standard-form block SDP
///
/// ```text
///   optimize <C, X>  s.t.  <A_i, X> + (G^T z)_i = b_i,   X ⪰ 0 (block diagonal)
/// ```
///
/// with dual `b^T y` subject to `C - sum_i y_i A_i ⪰ 0` and `G y = f`. The
/// free-variable part is empty for ordinary problems.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub objective: BlockSparse,
    pub constraints: Vec<Constraint>,
    pub sense: Sense,
    pub dual_equalities: Vec<DualEquality>,
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>, sense: Sense) -> Self {
        Self {
            block_dims,
            objective: BlockSparse::new(),
            constraints: Vec::new(),
            sense,
            dual_equalities: Vec::new(),
        }
    }

    pub fn with_objective(mut self, c: BlockSparse) -> Self {
        self.objective = c;
        self
    }

    pub fn add_constraint(&mut self, matrix: BlockSparse, rhs: f64) {
        self.constraints.push(Constraint { matrix, rhs });
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.block_dims.is_empty() || self.block_dims.contains(&0) {
            return Err(SdpError::InvalidProblem("blocks must be non-empty".into()));
        }
        let check = |m: &BlockSparse, what: &str| -> Result<(), SdpError> {
            for e in m.entries() {
                let ok = e.block < self.block_dims.len()
                    && e.row <= e.col
                    && e.col < self.block_dims[e.block]
                    && e.value.is_finite();
                if !ok {
                    return Err(SdpError::InvalidProblem(format!(
                        "{what}: entry {e:?} outside block structure {:?}",
                        self.block_dims
                    )));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            check(&c.matrix, &format!("constraint {i}"))?;
            if !c.rhs.is_finite() {
                return Err(SdpError::InvalidProblem(format!(
                    "constraint {i}: rhs not finite"
                )));
            }
        }
        for (k, eq) in self.dual_equalities.iter().enumerate() {
            if eq
                .coeffs
                .iter()
                .any(|&(i, v)| i >= self.constraints.len() || !v.is_finite())
            {
                return Err(SdpError::InvalidProblem(format!(
                    "dual equality {k} out of range"
                )));
            }
        }
        Ok(())
    }
}
