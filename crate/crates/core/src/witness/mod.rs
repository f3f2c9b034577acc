//! Search for pure-state fidelity witnesses `F·1 - |ψ><ψ|` with minimal `F`.
//!
//! The objective over unit vectors is
//! `f(ψ) = <ψ|ρ|ψ> - Σ_{i<D} σ_i(ψ)²`, with `σ_i` the singular values of the
//! coefficient matrix of `ψ`. A positive value is a witness violation.

mod objective;
mod search;

use thiserror::Error;

use crate::qstate::{PureBipartiteState, QstateError};

pub use objective::{gradient_check, objective, objective_gradient};
pub use search::{search_witness, search_witness_with, SearchOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Schmidt spectrum degenerate at the cut (gap {gap:.3e})")]
    DegenerateSpectrum { gap: f64 },
    #[error(transparent)]
    State(#[from] QstateError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCandidate {
    pub psi: PureBipartiteState,
    pub dim: usize,
    /// `<ψ|ρ|ψ> - Σ_{i<D} λ_i(ψ)`.
    pub violation: f64,
    pub restarts_used: usize,
    /// Restart that produced the candidate (0: top eigenvector, 1: maximally
    /// entangled, then Haar-random starts).
    pub restart_index: usize,
}
