use super::{Criterion, CriterionVerdict};
use crate::hermlin::{kron, min_eigenvalue, ComplexMatrix};
use crate::qstate::BipartiteState;

/// Minimum eigenvalue of `ρ^{T_B}`.
pub fn ppt_check(rho: &BipartiteState) -> CriterionVerdict {
    let margin = min_eigenvalue(&rho.partial_transpose_b()).expect("partial transpose is Hermitian");
    CriterionVerdict::new(Criterion::Ppt, margin)
}

/// Larger of the minimum eigenvalues of `1_A ⊗ ρ_B - ρ` and `ρ_A ⊗ 1_B - ρ`.
pub fn reduction_check(rho: &BipartiteState) -> CriterionVerdict {
    let ia = ComplexMatrix::identity(rho.d_a());
    let ib = ComplexMatrix::identity(rho.d_b());
    let left = &kron(&ia, &rho.reduced_b()) - rho.rho();
    let right = &kron(&rho.reduced_a(), &ib) - rho.rho();
    let m1 = min_eigenvalue(&left.hermitian_part()).expect("Hermitian");
    let m2 = min_eigenvalue(&right.hermitian_part()).expect("Hermitian");
    CriterionVerdict::new(Criterion::Reduction, m1.max(m2))
}
