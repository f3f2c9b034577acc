use num_complex::Complex64;
use rayon::prelude::*;

use super::objective::{eval, gradient};
use super::{WitnessCandidate, WitnessError};
use crate::hermlin::hermitian_eig;
use crate::qstate::{sample_haar_pure, BipartiteState, PureBipartiteState, RngStream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub max_iterations: usize,
    /// Stop when the relative gain of an accepted step falls below this.
    pub gain_tolerance: f64,
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gain_tolerance: 1e-10,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
        }
    }
}

/// Best witness over `restarts` projected-gradient ascents. Restart 0
/// starts from the top eigenvector of `ρ`, restart 1 from the maximally
/// entangled vector, the rest from Haar-random vectors drawn from stream
/// `r` of a key derived from `rng`. The result does not depend on the
/// thread count; ties go to the lowest restart index.
pub fn search_witness(
    rho: &BipartiteState,
    dim: usize,
    restarts: usize,
    rng: RngStream,
) -> Result<WitnessCandidate, WitnessError> {
    search_witness_with(rho, dim, restarts, rng, &SearchOptions::default())
}

pub fn search_witness_with(
    rho: &BipartiteState,
    dim: usize,
    restarts: usize,
    rng: RngStream,
    opts: &SearchOptions,
) -> Result<WitnessCandidate, WitnessError> {
    if restarts == 0 {
        return Err(WitnessError::InvalidArgument("at least one restart".into()));
    }
    let max = rho.d_a().min(rho.d_b()) + 1;
    if dim < 2 || dim > max {
        return Err(WitnessError::InvalidArgument(format!(
            "witness dimension {dim} outside 2..={max}"
        )));
    }
    let key = derive_key(rng);
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = start_vector(rho, r, key)?;
            let (psi, value) = ascend(rho, dim, start, opts);
            Ok((r, psi, value))
        })
        .collect::<Result<Vec<_>, WitnessError>>()?
        .into_iter()
        .fold(None, |acc: Option<(usize, Vec<Complex64>, f64)>, cur| match acc {
            Some(a) if a.2 >= cur.2 => Some(a),
            _ => Some(cur),
        })
        .expect("at least one restart");
    let (restart_index, psi, _) = best;
    let psi = PureBipartiteState::normalized(psi, rho.d_a(), rho.d_b())?;
    let violation = eval(rho, psi.amplitudes(), dim);
    Ok(WitnessCandidate {
        psi,
        dim,
        violation,
        restarts_used: restarts,
        restart_index,
    })
}

fn derive_key(rng: RngStream) -> u64 {
    // splitmix64 finalizer over (seed, stream)
    let mut z = rng.seed ^ rng.stream_index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn start_vector(rho: &BipartiteState, r: usize, key: u64) -> Result<Vec<Complex64>, WitnessError> {
    let (d_a, d_b) = (rho.d_a(), rho.d_b());
    match r {
        0 => {
            let eig = hermitian_eig(rho.rho()).map_err(crate::qstate::QstateError::from)?;
            Ok(eig.vector(0))
        }
        1 => {
            let m = d_a.min(d_b);
            let mut v = vec![Complex64::new(0.0, 0.0); d_a * d_b];
            for i in 0..m {
                v[i * d_b + i] = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
            }
            Ok(v)
        }
        _ => {
            let mut g = RngStream::new(key, r as u64).generator();
            Ok(sample_haar_pure(d_a, d_b, &mut g)?.amplitudes().to_vec())
        }
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Armijo-backtracked ascent along the tangent gradient, renormalizing
/// after every step.
fn ascend(rho: &BipartiteState, dim: usize, mut psi: Vec<Complex64>, opts: &SearchOptions) -> (Vec<Complex64>, f64) {
    normalize(&mut psi);
    let mut value = eval(rho, &psi, dim);
    for _ in 0..opts.max_iterations {
        let mut g = gradient(rho, &psi, dim);
        let radial: f64 = psi.iter().zip(&g).map(|(p, q)| (p.conj() * q).re).sum();
        for (gk, pk) in g.iter_mut().zip(&psi) {
            *gk -= pk * radial;
        }
        let g_sq: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        if g_sq < 1e-28 {
            break;
        }
        let mut step = opts.initial_step;
        let mut accepted = None;
        while step > 1e-12 {
            let mut trial: Vec<Complex64> = psi.iter().zip(&g).map(|(p, q)| p + q * step).collect();
            normalize(&mut trial);
            let tv = eval(rho, &trial, dim);
            if tv >= value + opts.armijo * step * g_sq {
                accepted = Some((trial, tv));
                break;
            }
            step *= opts.shrink;
        }
        let Some((next, next_value)) = accepted else { break };
        let gain = next_value - value;
        psi = next;
        value = next_value;
        if gain <= opts.gain_tolerance * value.abs().max(1.0) {
            break;
        }
    }
    (psi, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{embed, maximally_entangled};

    #[test]
    fn finds_embedded_bell_state() {
        let bell = embed(&maximally_entangled(2), 3, 3).unwrap();
        let rho = BipartiteState::pure(&bell);
        let w = search_witness(&rho, 2, 8, RngStream::new(1, 0)).unwrap();
        assert!(w.violation >= 0.5 - 1e-6, "{}", w.violation);
    }

    #[test]
    fn maximally_mixed_never_violates() {
        let rho = BipartiteState::maximally_mixed(3, 3);
        for dim in 2..=3 {
            let w = search_witness(&rho, dim, 8, RngStream::new(2, 0)).unwrap();
            assert!(w.violation <= 0.0);
        }
    }

    #[test]
    fn more_restarts_never_worse() {
        let mut g = RngStream::new(4, 0).generator();
        let rho = crate::qstate::sample_hs(3, &mut g).unwrap();
        let mut last = f64::NEG_INFINITY;
        for r in [1, 2, 4, 8] {
            let w = search_witness(&rho, 2, r, RngStream::new(4, 1)).unwrap();
            assert!(w.violation >= last - 1e-12);
            last = w.violation;
        }
    }
}
