#![allow(dead_code)]

use schmidt_core::hermlin::Complex64;
use schmidt_core::qstate::{mix, BipartiteState, PureBipartiteState, RngStream, StreamRng};

/// Pure state whose coefficient matrix has rank at most `rank`.
pub fn low_rank_pure(d_a: usize, d_b: usize, rank: usize, rng: &mut StreamRng) -> PureBipartiteState {
    let left = rng.ginibre(d_a, rank);
    let right = rng.ginibre(rank, d_b);
    let c = &left * &right;
    let amps: Vec<Complex64> = (0..d_a).flat_map(|i| (0..d_b).map(move |j| (i, j))).map(|(i, j)| c[(i, j)]).collect();
    PureBipartiteState::normalized(amps, d_a, d_b).unwrap()
}

/// Random mixture of `terms` pure states of Schmidt rank at most `rank`.
pub fn low_rank_mixture(d_a: usize, d_b: usize, rank: usize, terms: usize, seed: u64, index: u64) -> BipartiteState {
    let mut rng = RngStream::new(seed, index).generator();
    let states: Vec<BipartiteState> = (0..terms)
        .map(|_| BipartiteState::pure(&low_rank_pure(d_a, d_b, rank, &mut rng)))
        .collect();
    let raw: Vec<f64> = (0..terms).map(|_| rng.uniform() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let head: f64 = weights[..terms - 1].iter().sum();
    weights[terms - 1] = 1.0 - head;
    let parts: Vec<(f64, &BipartiteState)> = weights.iter().copied().zip(states.iter()).collect();
    mix(&parts).unwrap()
}
