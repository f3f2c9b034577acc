//! An unfaithful state whose tensor square is faithful.

use serde::{Deserialize, Serialize};

use schmidt_core::criteria::{reduction_check, unfaithful_margin, CriteriaOptions};
use schmidt_core::qstate::{embed, maximally_entangled, noisy_state, tensor_power_bipartite, RngStream};
use schmidt_core::witness::search_witness;

use crate::named::activation_state;
use crate::CliError;

pub const DEFAULT_RESTARTS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationReport {
    /// Margin of the single copy in `Ũ_2` (positive: unfaithful).
    pub single_copy_margin: f64,
    /// Best single-copy witness violation found (expected non-positive).
    pub single_copy_violation: f64,
    /// Best witness violation on the tensor square across `A1A2 | B1B2`.
    pub square_violation: f64,
    /// Reduction margin of the control state and the violation on its square.
    pub control_reduction_margin: f64,
    pub control_square_violation: f64,
    pub restarts: usize,
    pub reproduced: bool,
}

/// Control: noisy `|Ψ_2>` in `3 x 3` at `p = 0.9`, inside the reduction set.
pub fn control_state() -> schmidt_core::qstate::BipartiteState {
    let psi = embed(&maximally_entangled(2), 3, 3).expect("2 <= 3");
    noisy_state(&psi, 0.9).expect("p in range")
}

pub fn run_activation(restarts: usize, seed: u64, workers: Option<usize>) -> Result<ActivationReport, CliError> {
    let rho = activation_state();
    let opts = CriteriaOptions::default();
    crate::with_workers(workers, || {
        let single = unfaithful_margin(&rho, 2, &opts)?;
        let single_w = search_witness(&rho, 2, restarts.min(64), RngStream::new(seed, 0))?;
        let square = tensor_power_bipartite(&rho, 2)?;
        let square_w = search_witness(&square, 2, restarts, RngStream::new(seed, 1))?;
        let control = control_state();
        let control_sq = tensor_power_bipartite(&control, 2)?;
        let control_w = search_witness(&control_sq, 2, restarts.min(64), RngStream::new(seed, 2))?;
        let reproduced = single.margin > 1e-7 && square_w.violation > 1e-7;
        Ok(ActivationReport {
            single_copy_margin: single.margin,
            single_copy_violation: single_w.violation,
            square_violation: square_w.violation,
            control_reduction_margin: reduction_check(&control).margin,
            control_square_violation: control_w.violation,
            restarts,
            reproduced,
        })
    })
}
