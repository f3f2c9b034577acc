//! Primal-dual interior-point solver for block-diagonal real SDPs, with
//! feasibility-margin front-ends and an SDPA-sparse writer.
//!
//! Complex Hermitian constraints enter through the real embedding
//! `H -> [[Re H, -Im H], [Im H, Re H]]`; see [`LmiBuilder`].

mod ipm;
mod lmi;
mod margin;
mod presolve;
mod problem;
mod sdpa;
mod stats;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ipm::solve;
pub use lmi::{BlockId, LmiBuilder, LmiMargin, VarId};
pub use margin::{feasibility_margin, FeasibilityMargin};
pub use problem::{BlockSparse, Constraint, DualEquality, SdpProblem, Sense, SymEntry};
pub use sdpa::{read_sdpa, write_sdpa};
pub use stats::{reset_solve_stats, solve_stats, SolveStats};

/// Symmetry tolerance for dense input blocks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Margins with `|margin| <= MARGIN_BAND` are treated as inconclusive.
pub const MARGIN_BAND: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("ill-posed problem: {0}")]
    IllPosed(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("margin is unbounded: {0}")]
    UnboundedMargin(String),
    #[error("estimated memory {estimated} bytes exceeds cap {cap} bytes")]
    MemoryGuard { estimated: usize, cap: usize },
    #[error("io: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibilityKind {
    /// The primal problem has no feasible point (the dual is unbounded).
    Primal,
    /// The dual problem has no feasible point (the primal is unbounded).
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    InfeasibleCertificate(InfeasibilityKind),
    MaxIterations,
}

/// Relative KKT residuals of the returned point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub primal_feasibility: f64,
    pub dual_feasibility: f64,
    pub duality_gap: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal_feasibility
            .max(self.dual_feasibility)
            .max(self.duality_gap)
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// `X`, one dense block per block of the problem.
    pub primal_blocks: Vec<DMatrix<f64>>,
    /// `S = C - sum_i y_i A_i`.
    pub dual_slack: Vec<DMatrix<f64>>,
    pub dual_vector: Vec<f64>,
    /// Free primal variables `z` attached to the dual equalities.
    pub free_vector: Vec<f64>,
    /// Primal objective in the sense of the original problem.
    pub objective_value: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub kkt: KktResiduals,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target for relative primal/dual infeasibility and gap.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Relative pivot threshold for dropping dependent constraints.
    pub dependency_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 200,
            step_fraction: 0.95,
            dependency_tolerance: 1e-10,
        }
    }
}

/// Three-way reading of a feasibility margin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginBand {
    Inside,
    Outside,
    Inconclusive,
}

impl MarginBand {
    pub fn classify(margin: f64) -> Self {
        if margin > MARGIN_BAND {
            MarginBand::Inside
        } else if margin < -MARGIN_BAND {
            MarginBand::Outside
        } else {
            MarginBand::Inconclusive
        }
    }
}
