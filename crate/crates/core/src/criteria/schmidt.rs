//! Outer relaxations `S_D^k` of the Schmidt-number-`D` states.
//!
//! `ω` lives on `A A' B' B` with `dim A' = dim B' = D`; the variable is
//! `E = ω / D`, constrained to `S^k` across `AA' | B'B` and to
//! `D · Π_D† E Π_D = σ`.

use num_complex::Complex64;

use super::dps::dps_margin;
use super::extension::SymExtension;
use super::herm::{add_mapped_var, coord_image, Entries, HermEqualities, HermVar};
use super::spectral::ppt_check;
use super::{CriteriaError, CriteriaOptions, Criterion, CriterionVerdict};
use crate::hermlin::{partial_transpose_index, permute_systems, ComplexMatrix};
use crate::qstate::BipartiteState;
use crate::sdpsolve::{BlockId, LmiBuilder, LmiMargin};

/// `Π_D = 1_A ⊗ Σ_j |j j>_{A'B'} ⊗ 1_B`, of size `(d_a D D d_b) x (d_a d_b)`.
pub fn schmidt_projector(d_a: usize, d_b: usize, dim: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(d_a * dim * dim * d_b, d_a * d_b);
    for a in 0..d_a {
        for b in 0..d_b {
            for j in 0..dim {
                p[(((a * dim + j) * dim + j) * d_b + b, a * d_b + b)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    p
}

/// Margin of `σ ∈ S_D^k`. Level one uses the form reduced by the `U ⊗ Ū`
/// symmetry of `|ψ⁺_D>`; higher levels build the extension explicitly.
pub fn schmidt_hierarchy_margin(
    sigma: &BipartiteState,
    dim: usize,
    k: usize,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict, CriteriaError> {
    if dim == 0 || k == 0 {
        return Err(CriteriaError::InvalidArgument(
            "Schmidt dimension and level must be at least 1".into(),
        ));
    }
    let criterion = Criterion::SchmidtHierarchy { dim, k };
    if dim == 1 {
        let margin = if k == 1 {
            ppt_check(sigma).margin
        } else {
            dps_margin(sigma, k, opts)?.margin
        };
        return Ok(CriterionVerdict::new(criterion, margin));
    }
    if k == 1 {
        let margin = reduced_level_one(sigma, dim, opts)?;
        return Ok(CriterionVerdict::new(criterion, margin));
    }
    Ok(schmidt_hierarchy_direct(sigma, dim, k, opts)?.verdict)
}

/// Level one with `ω = α ⊗ (1 - P) + (σ / D) ⊗ P`, `P` the normalized
/// projector on `|ψ⁺_D>`. The partial transpose splits into the symmetric
/// and antisymmetric sectors of `A'B'`.
fn reduced_level_one(
    sigma: &BipartiteState,
    dim: usize,
    opts: &CriteriaOptions,
) -> Result<f64, CriteriaError> {
    let (d_a, d_b) = (sigma.d_a(), sigma.d_b());
    let n = d_a * d_b;
    let dd = dim as f64;
    let mut lmi = LmiBuilder::new();
    let alpha = HermVar::new(&mut lmi, n);
    let psd = lmi.add_hermitian_block(n, false);
    add_mapped_var(&mut lmi, &alpha, psd, 1.0, &mut |p, q| {
        vec![(p, q, Complex64::new(1.0, 0.0))]
    });
    let dims = [d_a, d_b];
    let mask = [false, true];
    let mut pt = |p: usize, q: usize| -> Entries {
        let mut scratch = [0; 4];
        let (r, c) = partial_transpose_index(p, q, &dims, &mask, &mut scratch);
        vec![(r, c, Complex64::new(1.0, 0.0))]
    };
    let sigma_pt = sigma.partial_transpose_b();
    let cube = dd * dd * dd;
    for (coef, sign) in [(dd * dd - dd, 1.0), (dd * dd + dd, -1.0)] {
        let block = lmi.add_hermitian_block(n, true);
        add_mapped_var(&mut lmi, &alpha, block, coef / cube, &mut pt);
        lmi.add_constant_matrix(block, &sigma_pt, sign / cube);
    }
    lmi.add_equality(&alpha.trace_coeffs(), 1.0 / dd);
    opts.guard(lmi.estimated_bytes())?;
    Ok(lmi.solve(&opts.solver)?.margin)
}

/// Explicit extension solve, kept for inspecting and lifting the dual
/// certificate.
#[derive(Clone, Debug)]
pub struct SchmidtDirect {
    pub verdict: CriterionVerdict,
    pub dim: usize,
    pub k: usize,
    /// Whether `A` and `B` were exchanged so that the extension sits on the
    /// smaller side.
    pub swapped: bool,
    pub(crate) lmi: LmiBuilder,
    pub(crate) blocks: DirectBlocks,
    /// Target after orientation, with its local dimensions.
    pub(crate) target: ComplexMatrix,
    pub(crate) dims: (usize, usize),
    pub solution: LmiMargin,
}

#[derive(Clone, Debug)]
pub(crate) struct DirectBlocks {
    pub e_block: BlockId,
    pub cuts: Vec<BlockId>,
}

impl SchmidtDirect {
    /// Dual certificate on the extension block.
    pub fn e_certificate(&self) -> ComplexMatrix {
        self.solution.certificate_block(&self.lmi, self.blocks.e_block)
    }

    /// Dual certificate on cut `j` (last `j` copies transposed).
    pub fn cut_certificate(&self, j: usize) -> ComplexMatrix {
        self.solution.certificate_block(&self.lmi, self.blocks.cuts[j - 1])
    }
}

/// Orients `σ` so that `d_a ≥ d_b`; the extension then sits on `B'B`.
pub(crate) fn oriented(sigma: &BipartiteState) -> Result<(ComplexMatrix, usize, usize, bool), CriteriaError> {
    let (d_a, d_b) = (sigma.d_a(), sigma.d_b());
    if d_a < d_b {
        let m = permute_systems(sigma.rho(), &[d_a, d_b], &[1, 0])?;
        Ok((m, d_b, d_a, true))
    } else {
        Ok((sigma.rho().clone(), d_a, d_b, false))
    }
}

/// Builds the level-`k` LMI for an oriented target. The extension block
/// carries the slack only for `k ≥ 2`.
pub(crate) fn build_direct(
    target: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    dim: usize,
    k: usize,
) -> (LmiBuilder, DirectBlocks) {
    let mut lmi = LmiBuilder::new();
    let ext = SymExtension::new(&mut lmi, d_a * dim, dim * d_b, k);
    let e_block = ext.add_e_block(&mut lmi, k >= 2);
    let cuts = ext.add_cut_blocks(&mut lmi);
    let dd = dim as f64;
    let mut eqs = HermEqualities::default();
    for &(v, c) in &ext.var.vars {
        let img = coord_image(c, &mut |p, q| project_marginal(&ext, p, q, d_b, dim, dd));
        eqs.add_image(v, &img, 1.0);
    }
    eqs.emit(&mut lmi, target);
    lmi.add_equality(&ext.var.trace_coeffs(), 1.0);
    (lmi, DirectBlocks { e_block, cuts })
}

/// `D · Π_D† marg(E_pq) Π_D`.
fn project_marginal(ext: &SymExtension, p: usize, q: usize, d_b: usize, dim: usize, dd: f64) -> Entries {
    let split = |r: usize| {
        let (x, y) = (r / ext.dy, r % ext.dy);
        (x / dim, x % dim, y / d_b, y % d_b)
    };
    ext.marginal_unit(p, q)
        .into_iter()
        .filter_map(|(r, c, z)| {
            let (a, j, j2, b) = split(r);
            let (a2, l, l2, b2) = split(c);
            (j == j2 && l == l2).then(|| (a * d_b + b, a2 * d_b + b2, z * dd))
        })
        .collect()
}

pub(crate) fn direct_var_count(d_a: usize, d_b: usize, dim: usize, k: usize) -> usize {
    SymExtension::var_count(d_a.max(d_b) * dim, d_a.min(d_b) * dim, k)
}

/// Solves the explicit level-`k` problem.
pub fn schmidt_hierarchy_direct(
    sigma: &BipartiteState,
    dim: usize,
    k: usize,
    opts: &CriteriaOptions,
) -> Result<SchmidtDirect, CriteriaError> {
    if dim == 0 || k == 0 {
        return Err(CriteriaError::InvalidArgument(
            "Schmidt dimension and level must be at least 1".into(),
        ));
    }
    let m = direct_var_count(sigma.d_a(), sigma.d_b(), dim, k) + 1;
    opts.guard(24 * m * m)?;
    let (target, d_a, d_b, swapped) = oriented(sigma)?;
    let (lmi, blocks) = build_direct(&target, d_a, d_b, dim, k);
    opts.guard(lmi.estimated_bytes())?;
    let solution = lmi.solve(&opts.solver)?;
    Ok(SchmidtDirect {
        verdict: CriterionVerdict::new(Criterion::SchmidtHierarchy { dim, k }, solution.margin),
        dim,
        k,
        swapped,
        lmi,
        blocks,
        target,
        dims: (d_a, d_b),
        solution,
    })
}
