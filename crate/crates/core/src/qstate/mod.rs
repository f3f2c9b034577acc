//! Bipartite states, Schmidt decompositions, random-state samplers and the
//! state families used by the experiments.

mod family;
mod io;
mod rng;
mod sample;
mod state;

use thiserror::Error;

use crate::hermlin::HermlinError;

pub use family::{
    embed, maximally_entangled, mix, noisy_state, product_basis, tensor_power_bipartite,
};
pub use io::{read_state_json, write_state_json, StateFile};
pub use rng::{haar_unitary, RngStream, StreamRng};
pub use sample::{sample_bures, sample_haar_pure, sample_hs, sample_real, Ensemble};
pub use state::{
    schmidt_decompose, BipartiteState, PureBipartiteState, SchmidtDecomposition, SchmidtSpectrum,
    STATE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QstateError {
    #[error("invalid state: {invariant} violated ({detail})")]
    InvalidState {
        invariant: &'static str,
        detail: String,
    },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("invalid mixture weights: {0}")]
    WeightViolation(String),
    #[error("cannot embed {from:?} into smaller space {to:?}")]
    ShrinkingEmbedding {
        from: (usize, usize),
        to: (usize, usize),
    },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("state file: {0}")]
    Format(String),
    #[error(transparent)]
    Linalg(#[from] HermlinError),
}
