//! Inner approximation `Ũ_D` of the `D`-unfaithful states.

use num_complex::Complex64;

use super::herm::{add_mapped_var, HermVar};
use super::{CriteriaError, CriteriaOptions, Criterion, CriterionVerdict};
use crate::hermlin::ComplexMatrix;
use crate::qstate::BipartiteState;
use crate::sdpsolve::LmiBuilder;

/// Optimal point of the unfaithfulness LMI.
#[derive(Clone, Debug)]
pub struct UnfaithfulSolution {
    pub verdict: CriterionVerdict,
    pub mu: f64,
    pub m_a: ComplexMatrix,
    pub m_b: ComplexMatrix,
}

/// Margin of `ρ ∈ Ũ_D`: the largest `t` with
/// `M_A ⊗ 1 + 1 ⊗ M_B - ρ ⪰ t·1`, `0 ⪯ M_A ⪯ μ·1`, `0 ⪯ M_B ⪯ (1-μ)·1`,
/// `tr M_A = (D-1)μ`, `tr M_B = (D-1)(1-μ)` and `0 ≤ μ ≤ 1`.
pub fn unfaithful_margin(
    rho: &BipartiteState,
    dim: usize,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict, CriteriaError> {
    Ok(unfaithful_margin_detailed(rho, dim, opts)?.verdict)
}

pub fn unfaithful_margin_detailed(
    rho: &BipartiteState,
    dim: usize,
    opts: &CriteriaOptions,
) -> Result<UnfaithfulSolution, CriteriaError> {
    let (d_a, d_b) = (rho.d_a(), rho.d_b());
    if dim < 2 || dim > d_a.min(d_b) {
        return Err(CriteriaError::InvalidArgument(format!(
            "unfaithfulness dimension {dim} outside 2..={}",
            d_a.min(d_b)
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut lmi = LmiBuilder::new();
    let mu = lmi.add_var();
    let m_a = HermVar::new(&mut lmi, d_a);
    let m_b = HermVar::new(&mut lmi, d_b);

    let main = lmi.add_hermitian_block(d_a * d_b, true);
    add_mapped_var(&mut lmi, &m_a, main, 1.0, &mut |p, q| {
        (0..d_b).map(|b| (p * d_b + b, q * d_b + b, one)).collect()
    });
    add_mapped_var(&mut lmi, &m_b, main, 1.0, &mut |p, q| {
        (0..d_a).map(|a| (a * d_b + p, a * d_b + q, one)).collect()
    });
    lmi.add_constant_matrix(main, rho.rho(), -1.0);

    for (x, upper_is_mu) in [(&m_a, true), (&m_b, false)] {
        let n = x.n;
        let lower = lmi.add_hermitian_block(n, false);
        add_mapped_var(&mut lmi, x, lower, 1.0, &mut |p, q| vec![(p, q, one)]);
        let upper = lmi.add_hermitian_block(n, false);
        add_mapped_var(&mut lmi, x, upper, -1.0, &mut |p, q| vec![(p, q, one)]);
        for i in 0..n {
            if upper_is_mu {
                lmi.add_term(mu, upper, i, i, one);
            } else {
                lmi.add_constant(upper, i, i, one);
                lmi.add_term(mu, upper, i, i, -one);
            }
        }
    }
    let mu_block = lmi.add_block(1, false);
    lmi.add_term(mu, mu_block, 0, 0, one);
    let rest_block = lmi.add_block(1, false);
    lmi.add_constant(rest_block, 0, 0, one);
    lmi.add_term(mu, rest_block, 0, 0, -one);

    let scale = (dim - 1) as f64;
    let mut eq_a = m_a.trace_coeffs();
    eq_a.push((mu, -scale));
    lmi.add_equality(&eq_a, 0.0);
    let mut eq_b = m_b.trace_coeffs();
    eq_b.push((mu, scale));
    lmi.add_equality(&eq_b, scale);

    opts.guard(lmi.estimated_bytes())?;
    let out = lmi.solve(&opts.solver)?;
    Ok(UnfaithfulSolution {
        verdict: CriterionVerdict::new(Criterion::Unfaithful { dim }, out.margin),
        mu: out.values[mu.0],
        m_a: m_a.value(&out.values),
        m_b: m_b.value(&out.values),
    })
}
