use super::CriteriaError;
use crate::qstate::{schmidt_decompose, BipartiteState, PureBipartiteState};

/// `W_D = F·1 - |ψ><ψ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityWitness {
    pub target: PureBipartiteState,
    pub dimension: usize,
    pub fidelity_bound: f64,
}

impl FidelityWitness {
    /// Witness with the smallest valid bound.
    pub fn minimal(target: PureBipartiteState, dimension: usize) -> Result<Self, CriteriaError> {
        let fidelity_bound = min_fidelity(&target, dimension)?;
        Ok(Self {
            target,
            dimension,
            fidelity_bound,
        })
    }

    /// Rejects bounds below the minimal valid one.
    pub fn new(target: PureBipartiteState, dimension: usize, fidelity_bound: f64) -> Result<Self, CriteriaError> {
        let min = min_fidelity(&target, dimension)?;
        if fidelity_bound < min - 1e-12 {
            return Err(CriteriaError::InvalidArgument(format!(
                "fidelity bound {fidelity_bound} below the valid minimum {min}"
            )));
        }
        Ok(Self {
            target,
            dimension,
            fidelity_bound,
        })
    }
}

/// Sum of the `D - 1` largest squared Schmidt coefficients.
pub fn min_fidelity(target: &PureBipartiteState, dim: usize) -> Result<f64, CriteriaError> {
    let max = target.d_a().min(target.d_b()) + 1;
    if dim < 2 || dim > max {
        return Err(CriteriaError::InvalidArgument(format!(
            "witness dimension {dim} outside 2..={max}"
        )));
    }
    let spec = schmidt_decompose(target).spectrum;
    Ok(spec.top_sum(dim - 1).min(1.0))
}

/// `tr[W ρ] = F - <ψ|ρ|ψ>`; negative values certify that ρ has Schmidt
/// number at least `D`.
pub fn eval_fidelity_witness(w: &FidelityWitness, rho: &BipartiteState) -> Result<f64, CriteriaError> {
    if (w.target.d_a(), w.target.d_b()) != (rho.d_a(), rho.d_b()) {
        return Err(CriteriaError::InvalidArgument(format!(
            "witness on {}x{} applied to a {}x{} state",
            w.target.d_a(),
            w.target.d_b(),
            rho.d_a(),
            rho.d_b()
        )));
    }
    Ok(w.fidelity_bound - rho.fidelity_with(&w.target))
}
