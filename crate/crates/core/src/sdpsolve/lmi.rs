use num_complex::Complex64;

use super::{
    solve, BlockSparse, DualEquality, InfeasibilityKind, SdpError, SdpProblem, SdpSolution, Sense,
    SolveStatus, SolverOptions,
};
use crate::hermlin::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockId(pub usize);

#[derive(Clone, Debug)]
struct LmiBlock {
    n: usize,
    complex: bool,
    slack: bool,
}

impl LmiBlock {
    fn real_dim(&self) -> usize {
        if self.complex {
            2 * self.n
        } else {
            self.n
        }
    }
}

/// Linear matrix inequality `F0 + sum_i y_i F_i - t I_slack ⪰ 0` over real
/// variables `y`, with optional linear equalities on `y`. Solving maximizes
/// `t`, the largest uniform shift of the slack blocks that keeps every block
/// positive semidefinite.
///
/// Hermitian blocks are stored through their real embedding, which preserves
/// the spectrum (with doubled multiplicity).
#[derive(Clone, Debug, Default)]
pub struct LmiBuilder {
    blocks: Vec<LmiBlock>,
    num_vars: usize,
    constant: BlockSparse,
    terms: Vec<BlockSparse>,
    equalities: Vec<(Vec<(usize, f64)>, f64)>,
}

#[derive(Clone, Debug)]
pub struct LmiMargin {
    /// Optimal shift `t`; `+inf` or `-inf` when the solver certifies
    /// unboundedness or infeasibility.
    pub margin: f64,
    /// Optimal values of the declared variables.
    pub values: Vec<f64>,
    pub solution: SdpSolution,
}

impl LmiMargin {
    /// Dual certificate restricted to a block, mapped back to a Hermitian
    /// matrix `Y` with `<X, embed(H)> = tr(Y H)`.
    pub fn certificate_block(&self, builder: &LmiBuilder, block: BlockId) -> ComplexMatrix {
        let b = &builder.blocks[block.0];
        let x = &self.solution.primal_blocks[block.0];
        let n = b.n;
        if b.complex {
            ComplexMatrix::from_fn(n, n, |i, j| {
                Complex64::new(x[(i, j)] + x[(n + i, n + j)], x[(n + i, j)] - x[(i, n + j)])
            })
        } else {
            ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(x[(i, j)], 0.0))
        }
    }
}

impl LmiBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self) -> VarId {
        self.terms.push(BlockSparse::new());
        self.num_vars += 1;
        VarId(self.num_vars - 1)
    }

    pub fn add_vars(&mut self, count: usize) -> Vec<VarId> {
        (0..count).map(|_| self.add_var()).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Real symmetric block of size `n`.
    pub fn add_block(&mut self, n: usize, slack: bool) -> BlockId {
        self.blocks.push(LmiBlock {
            n,
            complex: false,
            slack,
        });
        BlockId(self.blocks.len() - 1)
    }

    /// Complex Hermitian block of size `n`.
    pub fn add_hermitian_block(&mut self, n: usize, slack: bool) -> BlockId {
        self.blocks.push(LmiBlock {
            n,
            complex: true,
            slack,
        });
        BlockId(self.blocks.len() - 1)
    }

    pub fn block_size(&self, block: BlockId) -> usize {
        self.blocks[block.0].n
    }

    /// Adds `z` at `(r, c)` of the constant term and `conj(z)` at `(c, r)`.
    pub fn add_constant(&mut self, block: BlockId, r: usize, c: usize, z: Complex64) {
        let mut target = std::mem::take(&mut self.constant);
        self.push_entry(&mut target, block, r, c, z);
        self.constant = target;
    }

    /// Adds `z` at `(r, c)` of the coefficient of `var` and `conj(z)` at `(c, r)`.
    pub fn add_term(&mut self, var: VarId, block: BlockId, r: usize, c: usize, z: Complex64) {
        let mut target = std::mem::take(&mut self.terms[var.0]);
        self.push_entry(&mut target, block, r, c, z);
        self.terms[var.0] = target;
    }

    /// Adds a full Hermitian matrix to the constant term (upper triangle read).
    pub fn add_constant_matrix(&mut self, block: BlockId, m: &ComplexMatrix, scale: f64) {
        for i in 0..m.rows() {
            for j in i..m.cols() {
                let z = m[(i, j)] * scale;
                if z != Complex64::new(0.0, 0.0) {
                    self.add_constant(block, i, j, z);
                }
            }
        }
    }

    pub fn add_term_matrix(&mut self, var: VarId, block: BlockId, m: &ComplexMatrix, scale: f64) {
        for i in 0..m.rows() {
            for j in i..m.cols() {
                let z = m[(i, j)] * scale;
                if z != Complex64::new(0.0, 0.0) {
                    self.add_term(var, block, i, j, z);
                }
            }
        }
    }

    /// Adds `sum coeffs_k y_k = rhs`.
    pub fn add_equality(&mut self, coeffs: &[(VarId, f64)], rhs: f64) {
        self.equalities
            .push((coeffs.iter().map(|&(v, c)| (v.0, c)).collect(), rhs));
    }

    fn push_entry(
        &self,
        target: &mut BlockSparse,
        block: BlockId,
        r: usize,
        c: usize,
        z: Complex64,
    ) {
        let b = &self.blocks[block.0];
        let (r, c, z) = if r <= c { (r, c, z) } else { (c, r, z.conj()) };
        if b.complex {
            let n = b.n;
            target.push(block.0, r, c, z.re);
            target.push(block.0, n + r, n + c, z.re);
            if r != c {
                target.push(block.0, r, n + c, -z.im);
                target.push(block.0, c, n + r, z.im);
            }
        } else {
            target.push(block.0, r, c, z.re);
        }
    }

    /// Rough peak working-set estimate of the solve, in bytes.
    pub fn estimated_bytes(&self) -> usize {
        let m = self.num_vars + 1;
        let blocks: usize = self.blocks.iter().map(|b| b.real_dim().pow(2)).sum();
        let nnz: usize = self.terms.iter().map(|t| t.entries().len()).sum::<usize>()
            + self.constant.entries().len();
        8 * (3 * m * m + 2 * self.equalities.len() * m + 14 * blocks) + 48 * nnz
    }

    /// Standard-form problem whose dual is the LMI; the last dual variable is `t`.
    pub fn to_problem(&self) -> Result<SdpProblem, SdpError> {
        let slack: Vec<usize> = (0..self.blocks.len())
            .filter(|&k| self.blocks[k].slack)
            .collect();
        if slack.is_empty() {
            return Err(SdpError::InvalidProblem("LMI has no slack block".into()));
        }
        let dims = self.blocks.iter().map(LmiBlock::real_dim).collect();
        let mut p = SdpProblem::new(dims, Sense::Minimize).with_objective(self.constant.clone());
        for t in &self.terms {
            p.add_constraint(t.scaled(-1.0), 0.0);
        }
        let mut shift = BlockSparse::new();
        for &k in &slack {
            for i in 0..self.blocks[k].real_dim() {
                shift.push(k, i, i, 1.0);
            }
        }
        p.add_constraint(shift, 1.0);
        for (coeffs, rhs) in &self.equalities {
            p.dual_equalities.push(DualEquality {
                coeffs: coeffs.clone(),
                rhs: *rhs,
            });
        }
        Ok(p)
    }

    /// Maximizes the shift `t`. Runs that stop short of the tolerance with
    /// residuals above `1e-6` are reported as numerical failures.
    pub fn solve(&self, opts: &SolverOptions) -> Result<LmiMargin, SdpError> {
        let p = self.to_problem()?;
        let solution = solve(&p, opts)?;
        let margin = match solution.status {
            SolveStatus::Optimal => solution.dual_objective,
            SolveStatus::InfeasibleCertificate(InfeasibilityKind::Primal) => f64::INFINITY,
            SolveStatus::InfeasibleCertificate(InfeasibilityKind::Dual) => f64::NEG_INFINITY,
            SolveStatus::MaxIterations => {
                if solution.kkt.max() > 1e-6 {
                    return Err(SdpError::NumericalFailure(format!(
                        "no convergence after {} iterations (residuals {:?})",
                        solution.iterations, solution.kkt
                    )));
                }
                solution.dual_objective
            }
        };
        let values = solution.dual_vector[..self.num_vars].to_vec();
        Ok(LmiMargin {
            margin,
            values,
            solution,
        })
    }
}
