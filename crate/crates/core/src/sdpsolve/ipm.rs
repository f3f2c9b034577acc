use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::presolve::{check_consistency, constraint_gram, independent_set};
use super::{
    BlockSparse, InfeasibilityKind, KktResiduals, SdpError, SdpProblem, SdpSolution, Sense,
    SolveStatus, SolverOptions,
};

/// Ratio below which an iterate is accepted as an infeasibility certificate.
const CERTIFICATE_TOL: f64 = 1e-8;

type Blocks = Vec<DMatrix<f64>>;

/// Solves a block SDP with a Nesterov-Todd scaled Mehrotra predictor-corrector
/// method. Linearly dependent constraints are removed first; inconsistent ones
/// are reported as [`SdpError::IllPosed`].
///
/// For [`Sense::Maximize`] the reported dual is `min b^T y` subject to
/// `sum_i y_i A_i - C ⪰ 0` and `G y = f`.
pub fn solve(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let m = problem.constraints.len();
    let neq = problem.dual_equalities.len();
    let a: Vec<BlockSparse> = problem
        .constraints
        .iter()
        .map(|c| c.matrix.clone().canonical())
        .collect();
    let b: Vec<f64> = problem.constraints.iter().map(|c| c.rhs).collect();
    let mut g = DMatrix::zeros(neq, m);
    for (k, eq) in problem.dual_equalities.iter().enumerate() {
        for &(i, v) in &eq.coeffs {
            g[(k, i)] += v;
        }
    }
    let f: Vec<f64> = problem
        .dual_equalities
        .iter()
        .map(|e| sign * e.rhs)
        .collect();
    let c = problem.objective.clone().canonical().scaled(sign);

    // presolve: drop dependent constraints, then dependent dual equalities
    let refs: Vec<&BlockSparse> = a.iter().collect();
    let gram = constraint_gram(&refs, &g);
    let kept = independent_set(&gram, opts.dependency_tolerance);
    check_consistency(&gram, &kept, &b, "constraint")?;
    let g_cols = g.select_columns(&kept);
    let ggt = &g_cols * g_cols.transpose();
    let kept_eq = independent_set(&ggt, opts.dependency_tolerance);
    check_consistency(&ggt, &kept_eq, &f, "dual equality")?;

    let core = Core::new(
        problem.block_dims.clone(),
        c.clone(),
        kept.iter().map(|&i| a[i].clone()).collect(),
        DVector::from_iterator(kept.len(), kept.iter().map(|&i| b[i])),
        g_cols.select_rows(&kept_eq),
        DVector::from_iterator(kept_eq.len(), kept_eq.iter().map(|&k| f[k])),
    );
    let raw = core.run(opts).inspect_err(|_| super::stats::record_failure())?;

    let mut y = vec![0.0; m];
    for (t, &i) in kept.iter().enumerate() {
        y[i] = raw.y[t];
    }
    let mut z = vec![0.0; neq];
    for (t, &k) in kept_eq.iter().enumerate() {
        z[k] = raw.z[t];
    }

    // residuals against the full (unreduced) problem
    let full = Core::new(
        problem.block_dims.clone(),
        c,
        a,
        DVector::from_vec(b),
        g,
        DVector::from_vec(f),
    );
    let yv = DVector::from_vec(y);
    let zv = DVector::from_vec(z);
    let res = full.residuals(&raw.x, &yv, &raw.s, &zv);

    let (primal_objective, dual_objective) = (sign * res.pobj, sign * res.dobj);
    let solution = SdpSolution {
        status: raw.status,
        primal_blocks: raw.x,
        dual_slack: raw.s,
        dual_vector: yv.iter().map(|v| sign * v).collect(),
        free_vector: zv.iter().copied().collect(),
        objective_value: primal_objective,
        primal_objective,
        dual_objective,
        kkt: res.kkt,
        iterations: raw.iterations,
    };
    super::stats::record(&solution);
    Ok(solution)
}

struct RawSolution {
    status: SolveStatus,
    x: Blocks,
    s: Blocks,
    y: DVector<f64>,
    z: DVector<f64>,
    iterations: usize,
}

struct Residuals {
    rp: DVector<f64>,
    rd: Blocks,
    rg: DVector<f64>,
    pobj: f64,
    dobj: f64,
    kkt: KktResiduals,
    // A(X) + G^T z and A*(y) + S, used by the certificate tests
    ax_norm: f64,
    aty_s_norm: f64,
    gy_norm: f64,
}

/// Internal minimization form with independent constraints.
struct Core {
    dims: Vec<usize>,
    c: BlockSparse,
    a: Vec<BlockSparse>,
    b: DVector<f64>,
    geq: DMatrix<f64>,
    f: DVector<f64>,
    /// Per block: (constraint index, entries on that block).
    by_block: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>,
    c_norm: f64,
    b_norm: f64,
    f_norm: f64,
}

struct Scaling {
    g: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: DVector<f64>,
}

impl Core {
    fn new(
        dims: Vec<usize>,
        c: BlockSparse,
        a: Vec<BlockSparse>,
        b: DVector<f64>,
        geq: DMatrix<f64>,
        f: DVector<f64>,
    ) -> Self {
        let mut by_block: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>> =
            vec![Vec::new(); dims.len()];
        for (i, ai) in a.iter().enumerate() {
            for e in ai.entries() {
                let list = &mut by_block[e.block];
                if list.last().map(|(j, _)| *j) != Some(i) {
                    list.push((i, Vec::new()));
                }
                list.last_mut().unwrap().1.push((e.row, e.col, e.value));
            }
        }
        let c_norm = c.frobenius_sq().sqrt();
        let b_norm = b.norm();
        let f_norm = f.norm();
        Self {
            dims,
            c,
            a,
            b,
            geq,
            f,
            by_block,
            c_norm,
            b_norm,
            f_norm,
        }
    }

    fn m(&self) -> usize {
        self.a.len()
    }

    fn op_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.a.iter().map(|ai| ai.inner(x)))
    }

    fn op_at(&self, y: &DVector<f64>) -> Blocks {
        let mut out: Blocks = self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (ai, &yi) in self.a.iter().zip(y.iter()) {
            if yi != 0.0 {
                ai.add_to_dense(yi, &mut out);
            }
        }
        out
    }

    fn residuals(&self, x: &Blocks, y: &DVector<f64>, s: &Blocks, z: &DVector<f64>) -> Residuals {
        let ax = self.op_a(x);
        let gtz = self.geq.tr_mul(z);
        let rp = &self.b - &ax - &gtz;
        let aty = self.op_at(y);
        let mut rd = self.c.to_dense(&self.dims);
        let mut aty_s_sq = 0.0;
        for k in 0..self.dims.len() {
            let t = &aty[k] + &s[k];
            aty_s_sq += t.norm_squared();
            rd[k] -= t;
        }
        let gy = &self.geq * y;
        let rg = &self.f - &gy;
        let pobj = self.c.inner(x) + self.f.dot(z);
        let dobj = self.b.dot(y);
        let rd_norm = rd.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        let kkt = KktResiduals {
            primal_feasibility: rp.norm() / (1.0 + self.b_norm),
            dual_feasibility: (rd_norm / (1.0 + self.c_norm)).max(rg.norm() / (1.0 + self.f_norm)),
            duality_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        Residuals {
            rp,
            rd,
            rg,
            pobj,
            dobj,
            kkt,
            ax_norm: (ax + gtz).norm(),
            aty_s_norm: aty_s_sq.sqrt(),
            gy_norm: gy.norm(),
        }
    }

    fn initial_point(&self) -> (Blocks, Blocks) {
        let mut x = Vec::new();
        let mut s = Vec::new();
        for (k, &n) in self.dims.iter().enumerate() {
            let nf = n as f64;
            let mut xi: f64 = 10.0_f64.max(nf.sqrt());
            let mut eta: f64 = 10.0_f64.max(nf.sqrt());
            let c_k: f64 = self
                .c
                .entries()
                .iter()
                .filter(|e| e.block == k)
                .map(|e| {
                    if e.row == e.col {
                        e.value * e.value
                    } else {
                        2.0 * e.value * e.value
                    }
                })
                .sum::<f64>()
                .sqrt();
            eta = eta.max(c_k);
            for (i, ent) in &self.by_block[k] {
                let norm = ent
                    .iter()
                    .map(|&(r, c, v)| if r == c { v * v } else { 2.0 * v * v })
                    .sum::<f64>()
                    .sqrt();
                xi = xi.max(nf * (1.0 + self.b[*i].abs()) / (1.0 + norm));
                eta = eta.max(norm);
            }
            x.push(DMatrix::identity(n, n) * xi);
            s.push(DMatrix::identity(n, n) * eta);
        }
        (x, s)
    }

    fn run(&self, opts: &SolverOptions) -> Result<RawSolution, SdpError> {
        let m = self.m();
        let neq = self.geq.nrows();
        let n_total: usize = self.dims.iter().sum();
        let (mut x, mut s) = self.initial_point();
        let mut y = DVector::zeros(m);
        let mut z = DVector::zeros(neq);
        let mut stalled = 0;
        let mut status = SolveStatus::MaxIterations;
        let mut iterations = 0;

        for iter in 0..=opts.max_iterations {
            iterations = iter;
            let res = self.residuals(&x, &y, &s, &z);
            if res.kkt.max() <= opts.tolerance {
                status = SolveStatus::Optimal;
                break;
            }
            if let Some(kind) = self.certificate(&res) {
                status = SolveStatus::InfeasibleCertificate(kind);
                break;
            }
            if iter == opts.max_iterations || stalled >= 3 {
                break;
            }

            let Some(scal) = x
                .iter()
                .zip(&s)
                .map(|(xb, sb)| nt_scaling(xb, sb))
                .collect::<Option<Vec<_>>>()
            else {
                break;
            };
            let w: Blocks = scal.iter().map(|sc| sc.w.clone()).collect();
            let schur = self.schur(&w);
            let Some(chol) = regularized_cholesky(schur) else {
                return Err(SdpError::NumericalFailure(
                    "Schur complement is not positive definite".into(),
                ));
            };
            let saddle = Saddle::new(&chol, &self.geq)?;
            let rd_scaled: Blocks = scal
                .iter()
                .zip(&res.rd)
                .map(|(sc, rd)| sc.g.tr_mul(rd) * &sc.g)
                .collect();
            let mu = scal
                .iter()
                .map(|sc| sc.lambda.iter().map(|l| l * l).sum::<f64>())
                .sum::<f64>()
                / n_total as f64;

            // predictor
            let t_aff: Blocks = scal
                .iter()
                .map(|sc| DMatrix::from_diagonal(&sc.lambda.map(|l| -l * l)))
                .collect();
            let aff = self.direction(&scal, &t_aff, &rd_scaled, &res, &chol, &saddle);
            let ap = scal
                .iter()
                .zip(&aff.dx_s)
                .map(|(sc, d)| max_step(&sc.lambda, d))
                .fold(f64::INFINITY, f64::min)
                .min(1.0);
            let ad = scal
                .iter()
                .zip(&aff.ds_s)
                .map(|(sc, d)| max_step(&sc.lambda, d))
                .fold(f64::INFINITY, f64::min)
                .min(1.0);
            let mut mu_aff = 0.0;
            for ((sc, dx), ds) in scal.iter().zip(&aff.dx_s).zip(&aff.ds_s) {
                let xa = DMatrix::from_diagonal(&sc.lambda) + dx * ap;
                let sa = DMatrix::from_diagonal(&sc.lambda) + ds * ad;
                mu_aff += xa.dot(&sa);
            }
            mu_aff /= n_total as f64;
            let sigma = (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0);

            // corrector
            let t_cor: Blocks = scal
                .iter()
                .enumerate()
                .map(|(k, sc)| {
                    let prod = &aff.dx_s[k] * &aff.ds_s[k];
                    let mut t = -(&prod + prod.transpose()) * 0.5;
                    for i in 0..sc.lambda.len() {
                        t[(i, i)] += sigma * mu - sc.lambda[i] * sc.lambda[i];
                    }
                    t
                })
                .collect();
            let dir = self.direction(&scal, &t_cor, &rd_scaled, &res, &chol, &saddle);
            let gamma = opts.step_fraction;
            let ap = scal
                .iter()
                .zip(&dir.dx_s)
                .map(|(sc, d)| max_step(&sc.lambda, d))
                .fold(f64::INFINITY, f64::min);
            let ad = scal
                .iter()
                .zip(&dir.ds_s)
                .map(|(sc, d)| max_step(&sc.lambda, d))
                .fold(f64::INFINITY, f64::min);
            let ap = (gamma * ap).min(1.0);
            let ad = (gamma * ad).min(1.0);
            if ap < 1e-10 && ad < 1e-10 {
                stalled += 1;
            } else {
                stalled = 0;
            }
            for k in 0..self.dims.len() {
                let dx = &scal[k].g * &dir.dx_s[k] * scal[k].g.transpose();
                x[k] += dx * ap;
                x[k] = symmetrize(&x[k]);
                s[k] += &dir.ds[k] * ad;
                s[k] = symmetrize(&s[k]);
            }
            y += &dir.dy * ad;
            z += &dir.dz * ap;
        }
        Ok(RawSolution {
            status,
            x,
            s,
            y,
            z,
            iterations,
        })
    }

    fn certificate(&self, res: &Residuals) -> Option<InfeasibilityKind> {
        if res.dobj > 0.0 {
            let r = res.aty_s_norm.max(res.gy_norm) / res.dobj;
            if r < CERTIFICATE_TOL && res.kkt.duality_gap > 1e-2 {
                return Some(InfeasibilityKind::Primal);
            }
        }
        if res.pobj < 0.0 {
            let r = res.ax_norm / -res.pobj;
            if r < CERTIFICATE_TOL && res.kkt.duality_gap > 1e-2 {
                return Some(InfeasibilityKind::Dual);
            }
        }
        None
    }

    fn direction(
        &self,
        scal: &[Scaling],
        t: &[DMatrix<f64>],
        rd_scaled: &[DMatrix<f64>],
        res: &Residuals,
        chol: &Cholesky<f64, Dyn>,
        saddle: &Saddle,
    ) -> Direction {
        // Lyapunov solve in the scaled space
        let yb: Blocks = scal
            .iter()
            .zip(t)
            .map(|(sc, tk)| {
                let l = &sc.lambda;
                DMatrix::from_fn(l.len(), l.len(), |i, j| 2.0 * tk[(i, j)] / (l[i] + l[j]))
            })
            .collect();
        let h_mat: Blocks = scal
            .iter()
            .zip(&yb)
            .zip(rd_scaled)
            .map(|((sc, yk), rdk)| &sc.g * (yk - rdk) * sc.g.transpose())
            .collect();
        let h = &res.rp - self.op_a(&h_mat);
        let (mut dy, mut dz) = saddle.solve(chol, &self.geq, &h, &res.rg);
        let mut parts = self.complete(scal, &yb, &res.rd, &dy);
        // one refinement step against the operator itself; the formed Schur
        // matrix is inaccurate near the boundary
        let dx: Blocks = scal
            .iter()
            .zip(&parts.2)
            .map(|(sc, d)| &sc.g * d * sc.g.transpose())
            .collect();
        let e = &res.rp - self.op_a(&dx) - self.geq.tr_mul(&dz);
        let eg = &res.rg - &self.geq * &dy;
        if e.amax() > 0.0 || eg.amax() > 0.0 {
            let (cy, cz) = saddle.solve(chol, &self.geq, &e, &eg);
            dy += cy;
            dz += cz;
            parts = self.complete(scal, &yb, &res.rd, &dy);
        }
        let (ds, ds_s, dx_s) = parts;
        Direction {
            dx_s,
            ds,
            ds_s,
            dy,
            dz,
        }
    }

    /// `(dS, dS` scaled`, dX` scaled`)` from `dy`.
    fn complete(
        &self,
        scal: &[Scaling],
        yb: &[DMatrix<f64>],
        rd: &[DMatrix<f64>],
        dy: &DVector<f64>,
    ) -> (Blocks, Blocks, Blocks) {
        let aty = self.op_at(dy);
        let ds: Blocks = rd
            .iter()
            .zip(&aty)
            .map(|(r, a)| symmetrize(&(r - a)))
            .collect();
        let ds_s: Blocks = scal
            .iter()
            .zip(&ds)
            .map(|(sc, d)| symmetrize(&(sc.g.tr_mul(d) * &sc.g)))
            .collect();
        let dx_s: Blocks = yb
            .iter()
            .zip(&ds_s)
            .map(|(yk, d)| symmetrize(&(yk - d)))
            .collect();
        (ds, ds_s, dx_s)
    }

    /// `M_ij = <A_i, W A_j W>` using the sparsity of each `A_j`.
    fn schur(&self, w: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (k, cons) in self.by_block.iter().enumerate() {
            let wk = &w[k];
            let n = self.dims[k];
            let mut loc = vec![usize::MAX; n];
            for (jj, (j, ent_j)) in cons.iter().enumerate() {
                let mut rows: Vec<usize> = ent_j.iter().flat_map(|&(r, c, _)| [r, c]).collect();
                rows.sort_unstable();
                rows.dedup();
                for (p, &r) in rows.iter().enumerate() {
                    loc[r] = p;
                }
                // column p holds row rows[p] of A_j W, transposed
                let mut awt = DMatrix::zeros(n, rows.len());
                for &(r, c, v) in ent_j {
                    awt.column_mut(loc[r]).axpy(v, &wk.column(c), 1.0);
                    if r != c {
                        awt.column_mut(loc[c]).axpy(v, &wk.column(r), 1.0);
                    }
                }
                let q = wk.select_columns(&rows) * awt.transpose();
                for (i, ent_i) in &cons[..=jj] {
                    let sum: f64 = ent_i
                        .iter()
                        .map(|&(r, c, v)| {
                            if r == c {
                                v * q[(r, c)]
                            } else {
                                v * (q[(r, c)] + q[(c, r)])
                            }
                        })
                        .sum();
                    out[(*i, *j)] += sum;
                }
                for &r in &rows {
                    loc[r] = usize::MAX;
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                let v = out[(i, j)] + out[(j, i)];
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

struct Direction {
    dx_s: Blocks,
    ds: Blocks,
    ds_s: Blocks,
    dy: DVector<f64>,
    dz: DVector<f64>,
}

/// Factorization of `G M^{-1} G^T` for the saddle system `[M G^T; G 0]`.
struct Saddle {
    minv_gt: DMatrix<f64>,
    k: Option<Cholesky<f64, Dyn>>,
}

impl Saddle {
    fn new(chol: &Cholesky<f64, Dyn>, geq: &DMatrix<f64>) -> Result<Self, SdpError> {
        if geq.nrows() == 0 {
            return Ok(Self {
                minv_gt: DMatrix::zeros(0, 0),
                k: None,
            });
        }
        let minv_gt = chol.solve(&geq.transpose());
        let k = geq * &minv_gt;
        let k = regularized_cholesky(k).ok_or_else(|| {
            SdpError::NumericalFailure("equality block of the saddle system is singular".into())
        })?;
        Ok(Self {
            minv_gt,
            k: Some(k),
        })
    }

    fn solve(
        &self,
        chol: &Cholesky<f64, Dyn>,
        geq: &DMatrix<f64>,
        h: &DVector<f64>,
        rg: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>) {
        let minv_h = chol.solve(h);
        match &self.k {
            None => (minv_h, DVector::zeros(0)),
            Some(k) => {
                let dz = k.solve(&(geq * &minv_h - rg));
                let dy = minv_h - &self.minv_gt * &dz;
                (dy, dz)
            }
        }
    }
}

fn regularized_cholesky(m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let n = m.nrows();
    if let Some(c) = m.clone().cholesky() {
        return Some(c);
    }
    let scale = (0..n)
        .map(|i| m[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut delta = 1e-14 * scale;
    for _ in 0..6 {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += delta;
        }
        if let Some(c) = shifted.cholesky() {
            return Some(c);
        }
        delta *= 100.0;
    }
    None
}

fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let lx = x.clone().cholesky()?.unpack();
    let ls = s.clone().cholesky()?.unpack();
    let prod = ls.tr_mul(&lx);
    let svd = prod.svd(false, true);
    let v = svd.v_t?.transpose();
    let lambda = svd.singular_values;
    if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return None;
    }
    let mut g = lx * v;
    for (j, &l) in lambda.iter().enumerate() {
        g.column_mut(j).scale_mut(1.0 / l.sqrt());
    }
    let w = &g * g.transpose();
    Some(Scaling { g, w, lambda })
}

/// Largest `alpha` with `diag(lambda) + alpha * d ⪰ 0`.
fn max_step(lambda: &DVector<f64>, d: &DMatrix<f64>) -> f64 {
    let n = lambda.len();
    let z = DMatrix::from_fn(n, n, |i, j| d[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let lmin = z
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
