//! Lifting a level-one dual certificate of `S_D^1` to level two.
//!
//! If `(Y_E, Y_Γ, z)` proves `σ ∉ S_D^1`, then `Y_E2 = V†(1 ⊗ Y_E)V`,
//! `Y_cut1 = 1 ⊗ Y_Γ`, `Y_cut2 = 0` with the same `z` is a primal-feasible
//! point of the level-two problem with the same objective, which proves
//! `σ ∉ S_D^2` without solving it.

use nalgebra::DMatrix;

use super::schmidt::{build_direct, SchmidtDirect};
use super::{CriteriaError, CriteriaOptions};
use crate::hermlin::{kron, min_eigenvalue, real_embed, sym_isometry, ComplexMatrix};
use crate::sdpsolve::MARGIN_BAND;

/// Level-two primal point built from a level-one solve, with its checks.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedCertificate {
    /// Primal objective; an upper bound on the level-two margin.
    pub value: f64,
    /// Largest equality residual of the lifted point.
    pub residual: f64,
    /// Smallest eigenvalue over the lifted blocks (after normalization).
    pub min_eigenvalue: f64,
}

impl LiftedCertificate {
    /// Whether the point is a valid certificate of a negative margin.
    pub fn certifies_outside(&self) -> bool {
        self.value < -MARGIN_BAND && self.residual < 1e-7 && self.min_eigenvalue > -1e-9
    }
}

/// Builds the level-two problem for the same target and evaluates the lifted
/// point against it.
pub fn lift_schmidt_certificate(
    level_one: &SchmidtDirect,
    opts: &CriteriaOptions,
) -> Result<LiftedCertificate, CriteriaError> {
    if level_one.k != 1 {
        return Err(CriteriaError::InvalidArgument("lifting starts from level one".into()));
    }
    let dim = level_one.dim;
    let (d_a, d_b) = level_one.dims;
    let (dx, dy) = (d_a * dim, dim * d_b);
    let m = super::schmidt::direct_var_count(d_a, d_b, dim, 2) + 1;
    opts.guard(64 * m * (dx * dy).max(64))?;

    let y_e = level_one.e_certificate().hermitian_part();
    let y_cut = level_one.cut_certificate(1).hermitian_part();
    let id_y = ComplexMatrix::identity(dy);
    // 1_{Y1} ⊗ M with M on X ⊗ Y2, in the order X Y1 Y2
    let spread = |mat: &ComplexMatrix| {
        ComplexMatrix::from_fn(dx * dy * dy, dx * dy * dy, |r, c| {
            let (x, y1, y2) = (r / (dy * dy), (r / dy) % dy, r % dy);
            let (x2, z1, z2) = (c / (dy * dy), (c / dy) % dy, c % dy);
            if y1 == z1 {
                mat[(x * dy + y2, x2 * dy + z2)] * id_y[(y1, z1)]
            } else {
                Default::default()
            }
        })
    };
    let v = kron(&ComplexMatrix::identity(dx), &sym_isometry(dy, 2));
    let y_e2 = (&(&v.adjoint() * &spread(&y_e)) * &v).hermitian_part();
    let y_c1 = spread(&y_cut);
    let (lmi, blocks2) = build_direct(&level_one.target, d_a, d_b, dim, 2);
    let c2 = lmi.block_size(blocks2.cuts[1]);
    let y_c2 = ComplexMatrix::zeros(c2, c2);
    let norm = y_e2.trace().re + y_c1.trace().re;
    if norm <= 0.0 {
        return Err(CriteriaError::InvalidArgument("level-one certificate is zero".into()));
    }
    let mut min_eig = f64::INFINITY;
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    for y in [&y_e2, &y_c1, &y_c2] {
        let scaled = y.scale(1.0 / norm);
        min_eig = min_eig.min(min_eigenvalue(&scaled)?);
        blocks.push(real_embed(&scaled)? * 0.5);
    }

    let problem = lmi.to_problem()?;
    let z1 = &level_one.solution.solution.free_vector;
    if z1.len() != problem.dual_equalities.len() {
        return Err(CriteriaError::InvalidArgument(format!(
            "equality layout differs between levels ({} vs {})",
            z1.len(),
            problem.dual_equalities.len()
        )));
    }
    let z: Vec<f64> = z1.iter().map(|v| v / norm).collect();
    let mut gtz = vec![0.0; problem.constraints.len()];
    let mut value = problem.objective.inner(&blocks);
    for (k, eq) in problem.dual_equalities.iter().enumerate() {
        for &(i, c) in &eq.coeffs {
            gtz[i] += c * z[k];
        }
        value += eq.rhs * z[k];
    }
    let residual = problem
        .constraints
        .iter()
        .zip(&gtz)
        .map(|(c, g)| (c.rhs - c.matrix.inner(&blocks) - g).abs())
        .fold(0.0, f64::max);
    Ok(LiftedCertificate {
        value,
        residual,
        min_eigenvalue: min_eig,
    })
}
