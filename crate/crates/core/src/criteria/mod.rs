//! Membership criteria for entanglement-dimension and unfaithfulness sets.
//!
//! Every criterion returns a signed margin. Outer relaxations (PPT, DPS,
//! Schmidt-number hierarchy) certify non-membership when the margin is
//! negative; inner approximations (SDP-based unfaithfulness, reduction)
//! certify membership when it is positive.

mod certificate;
mod dps;
mod extension;
mod fidelity;
mod herm;
mod schmidt;
mod spectral;
mod unfaithful;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermlin::HermlinError;
use crate::qstate::QstateError;
use crate::sdpsolve::{MarginBand, SdpError, SolverOptions};

pub use certificate::{lift_schmidt_certificate, LiftedCertificate};
pub use dps::{dps_margin, dps_margin_detailed};
pub use fidelity::{eval_fidelity_witness, min_fidelity, FidelityWitness};
pub use schmidt::{schmidt_hierarchy_direct, schmidt_hierarchy_margin, schmidt_projector, SchmidtDirect};
pub use spectral::{ppt_check, reduction_check};
pub use unfaithful::{unfaithful_margin, unfaithful_margin_detailed, UnfaithfulSolution};

/// Default cap on the estimated solver working set.
pub const DEFAULT_MEMORY_CAP: usize = 4 << 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("estimated memory {estimated} bytes exceeds cap {cap} bytes")]
    MemoryGuard { estimated: usize, cap: usize },
    #[error(transparent)]
    Solver(#[from] SdpError),
    #[error(transparent)]
    State(#[from] QstateError),
    #[error(transparent)]
    Linalg(#[from] HermlinError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaOptions {
    pub solver: SolverOptions,
    pub memory_cap: usize,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

impl CriteriaOptions {
    pub(crate) fn guard(&self, estimated: usize) -> Result<(), CriteriaError> {
        if estimated > self.memory_cap {
            return Err(CriteriaError::MemoryGuard {
                estimated,
                cap: self.memory_cap,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Criterion {
    Ppt,
    Dps { k: usize },
    SchmidtHierarchy { dim: usize, k: usize },
    Unfaithful { dim: usize },
    Reduction,
}

impl Criterion {
    /// Outer criteria bound a set from outside; the rest are inner.
    pub fn is_outer(&self) -> bool {
        matches!(
            self,
            Criterion::Ppt | Criterion::Dps { .. } | Criterion::SchmidtHierarchy { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    CertifiesMembership,
    CertifiesNonmembership,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: Criterion,
    pub margin: f64,
    pub band: MarginBand,
    pub interpretation: Interpretation,
}

impl CriterionVerdict {
    pub fn new(criterion: Criterion, margin: f64) -> Self {
        let band = MarginBand::classify(margin);
        let interpretation = match (criterion.is_outer(), band) {
            (true, MarginBand::Outside) => Interpretation::CertifiesNonmembership,
            (false, MarginBand::Inside) => Interpretation::CertifiesMembership,
            _ => Interpretation::Inconclusive,
        };
        Self {
            criterion,
            margin,
            band,
            interpretation,
        }
    }

    pub fn inside(&self) -> bool {
        self.band == MarginBand::Inside
    }

    pub fn outside(&self) -> bool {
        self.band == MarginBand::Outside
    }
}
