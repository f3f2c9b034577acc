use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rng::{haar_unitary, StreamRng};
use super::{BipartiteState, PureBipartiteState, QstateError};
use crate::hermlin::ComplexMatrix;

/// Random-state measures on `C^d ⊗ C^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Hilbert-Schmidt measure.
    Hs,
    Bures,
    /// Real Wishart states.
    Real,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [Ensemble::Hs, Ensemble::Bures, Ensemble::Real];

    pub fn label(&self) -> &'static str {
        match self {
            Ensemble::Hs => "HS",
            Ensemble::Bures => "B",
            Ensemble::Real => "R",
        }
    }

    pub fn sample(&self, d: usize, rng: &mut StreamRng) -> Result<BipartiteState, QstateError> {
        match self {
            Ensemble::Hs => sample_hs(d, rng),
            Ensemble::Bures => sample_bures(d, rng),
            Ensemble::Real => sample_real(d, rng),
        }
    }
}

fn check_d(d: usize) -> Result<(), QstateError> {
    if d < 2 {
        return Err(QstateError::Dimension(format!("local dimension {d} < 2")));
    }
    Ok(())
}

fn normalize_gram(m: &ComplexMatrix, d: usize) -> Result<BipartiteState, QstateError> {
    let g = &(m * &m.adjoint());
    let tr = g.trace().re;
    BipartiteState::new_trusted(g.scale(1.0 / tr).hermitian_part(), d, d)
}

/// `M M† / tr(M M†)` for a complex Ginibre `M` of size `d² x d²`.
pub fn sample_hs(d: usize, rng: &mut StreamRng) -> Result<BipartiteState, QstateError> {
    check_d(d)?;
    let n = d * d;
    let m = rng.ginibre(n, n);
    normalize_gram(&m, d)
}

/// `(1 + U) M M† (1 + U†)`, normalized, with `U` Haar-random. `M` is drawn
/// before `U`.
pub fn sample_bures(d: usize, rng: &mut StreamRng) -> Result<BipartiteState, QstateError> {
    check_d(d)?;
    let n = d * d;
    let m = rng.ginibre(n, n);
    let u = haar_unitary(n, rng);
    let mut one_plus_u = u;
    for i in 0..n {
        one_plus_u[(i, i)] += Complex64::new(1.0, 0.0);
    }
    normalize_gram(&(&one_plus_u * &m), d)
}

/// `M M^T / tr(M M^T)` for a real Gaussian `M`.
pub fn sample_real(d: usize, rng: &mut StreamRng) -> Result<BipartiteState, QstateError> {
    check_d(d)?;
    let n = d * d;
    let m = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.normal(), 0.0));
    normalize_gram(&m, d)
}

/// Normalized complex Gaussian vector on `C^{d_a} ⊗ C^{d_b}`.
pub fn sample_haar_pure(
    d_a: usize,
    d_b: usize,
    rng: &mut StreamRng,
) -> Result<PureBipartiteState, QstateError> {
    let amps: Vec<Complex64> = (0..d_a * d_b).map(|_| rng.complex_normal()).collect();
    PureBipartiteState::normalized(amps, d_a, d_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::RngStream;

    #[test]
    fn fixed_seed_reproduces_first_matrix() {
        let a = sample_hs(3, &mut RngStream::new(42, 0).generator()).unwrap();
        let b = sample_hs(3, &mut RngStream::new(42, 0).generator()).unwrap();
        assert_eq!(a, b);
        let c = sample_hs(3, &mut RngStream::new(42, 1).generator()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn real_states_have_no_imaginary_part() {
        let mut g = RngStream::new(5, 0).generator();
        for _ in 0..20 {
            let s = sample_real(3, &mut g).unwrap();
            assert!(s.rho().data().iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn dimension_below_two_is_rejected() {
        let mut g = RngStream::new(5, 0).generator();
        assert!(sample_bures(1, &mut g).is_err());
    }
}
