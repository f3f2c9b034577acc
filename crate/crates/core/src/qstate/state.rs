use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QstateError;
use crate::hermlin::{
    hermitian_eigenvalues, partial_trace, partial_transpose, svd, BipartitionLayout, ComplexMatrix,
    Side,
};

/// Tolerance for density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;

/// Density matrix on `C^{d_a} ⊗ C^{d_b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    rho: ComplexMatrix,
    d_a: usize,
    d_b: usize,
}

impl BipartiteState {
    /// Validates Hermiticity, unit trace, positivity and dimensions.
    pub fn new(rho: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self, QstateError> {
        let s = Self { rho, d_a, d_b };
        s.validate()?;
        Ok(s)
    }

    /// Skips the positivity check (one eigen-decomposition); the remaining
    /// invariants are still enforced.
    pub(crate) fn new_trusted(
        rho: ComplexMatrix,
        d_a: usize,
        d_b: usize,
    ) -> Result<Self, QstateError> {
        let s = Self { rho, d_a, d_b };
        s.validate_cheap()?;
        Ok(s)
    }

    fn validate_cheap(&self) -> Result<(), QstateError> {
        let n = self.d_a * self.d_b;
        if self.d_a == 0 || self.d_b == 0 || !self.rho.is_square() || self.rho.rows() != n {
            return Err(QstateError::InvalidState {
                invariant: "dimension",
                detail: format!(
                    "matrix is {}x{}, expected {n}x{n} for d_a={} d_b={}",
                    self.rho.rows(),
                    self.rho.cols(),
                    self.d_a,
                    self.d_b
                ),
            });
        }
        let dev = self.rho.hermitian_deviation();
        if dev > STATE_TOL
            || self
                .rho
                .data()
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QstateError::InvalidState {
                invariant: "hermitian",
                detail: format!("max deviation {dev:.3e}"),
            });
        }
        let tr = self.rho.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(QstateError::InvalidState {
                invariant: "unit_trace",
                detail: format!("trace {tr}"),
            });
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), QstateError> {
        self.validate_cheap()?;
        let lmin = *hermitian_eigenvalues(&self.rho)?.last().unwrap();
        if lmin < -STATE_TOL {
            return Err(QstateError::InvalidState {
                invariant: "positive_semidefinite",
                detail: format!("minimum eigenvalue {lmin:.3e}"),
            });
        }
        Ok(())
    }

    /// Projector onto a pure state.
    pub fn pure(psi: &PureBipartiteState) -> Self {
        Self {
            rho: ComplexMatrix::outer(psi.amplitudes()),
            d_a: psi.d_a(),
            d_b: psi.d_b(),
        }
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        let n = d_a * d_b;
        Self {
            rho: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            d_a,
            d_b,
        }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn layout(&self) -> BipartitionLayout {
        BipartitionLayout::bipartite(self.d_a, self.d_b).expect("validated dims")
    }

    /// `ρ^{T_B}`.
    pub fn partial_transpose_b(&self) -> ComplexMatrix {
        partial_transpose(&self.rho, &self.layout(), Side::Right).expect("validated dims")
    }

    pub fn reduced_a(&self) -> ComplexMatrix {
        partial_trace(&self.rho, &self.layout(), &[0]).expect("validated dims")
    }

    pub fn reduced_b(&self) -> ComplexMatrix {
        partial_trace(&self.rho, &self.layout(), &[1]).expect("validated dims")
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_with(&self, psi: &PureBipartiteState) -> f64 {
        self.rho
            .expectation(psi.amplitudes())
            .expect("matching dims")
            .re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.rho).expect("validated state")
    }
}

/// Normalized vector on `C^{d_a} ⊗ C^{d_b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureBipartiteState {
    amplitudes: Vec<Complex64>,
    d_a: usize,
    d_b: usize,
}

impl PureBipartiteState {
    pub fn new(amplitudes: Vec<Complex64>, d_a: usize, d_b: usize) -> Result<Self, QstateError> {
        if d_a == 0 || d_b == 0 || amplitudes.len() != d_a * d_b {
            return Err(QstateError::Dimension(format!(
                "{} amplitudes for d_a={d_a} d_b={d_b}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QstateError::InvalidState {
                invariant: "unit_norm",
                detail: format!("norm {norm}"),
            });
        }
        Ok(Self {
            amplitudes,
            d_a,
            d_b,
        })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(
        mut amplitudes: Vec<Complex64>,
        d_a: usize,
        d_b: usize,
    ) -> Result<Self, QstateError> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QstateError::InvalidState {
                invariant: "unit_norm",
                detail: "zero vector".into(),
            });
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        Self::new(amplitudes, d_a, d_b)
    }

    /// Builds a state from real coefficients on basis pairs `|i j>`.
    pub fn from_terms(
        terms: &[(usize, usize, f64)],
        d_a: usize,
        d_b: usize,
    ) -> Result<Self, QstateError> {
        let mut amps = vec![Complex64::new(0.0, 0.0); d_a * d_b];
        for &(i, j, c) in terms {
            if i >= d_a || j >= d_b {
                return Err(QstateError::Dimension(format!(
                    "|{i}{j}> outside {d_a}x{d_b}"
                )));
            }
            amps[i * d_b + j] += c;
        }
        Self::normalized(amps, d_a, d_b)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Amplitudes as a `d_a x d_b` coefficient matrix.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.d_a, self.d_b, self.amplitudes.clone()).expect("validated dims")
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

/// Squared Schmidt coefficients in non-increasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    pub lambdas: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.lambdas.iter().filter(|&&l| l > tol).count()
    }

    /// Sum of the `k` largest coefficients.
    pub fn top_sum(&self, k: usize) -> f64 {
        self.lambdas.iter().take(k).sum()
    }
}

/// `ψ = Σ_j √λ_j |left_j> ⊗ |right_j>`, with the vectors stored as matrix
/// columns.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub spectrum: SchmidtSpectrum,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

impl SchmidtDecomposition {
    /// Rebuilds the amplitude vector.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let (da, db) = (self.left.rows(), self.right.rows());
        let mut out = vec![Complex64::new(0.0, 0.0); da * db];
        for (k, &l) in self.spectrum.lambdas.iter().enumerate() {
            let s = l.sqrt();
            for i in 0..da {
                for j in 0..db {
                    out[i * db + j] += self.left[(i, k)] * self.right[(j, k)] * s;
                }
            }
        }
        out
    }
}

pub fn schmidt_decompose(psi: &PureBipartiteState) -> SchmidtDecomposition {
    let dec = svd(&psi.coefficient_matrix());
    let lambdas: Vec<f64> = dec.singular_values.iter().map(|s| s * s).collect();
    // M = U Σ V†  gives  ψ = Σ σ_k u_k ⊗ conj(v_k)
    let right = ComplexMatrix::from_fn(dec.v.rows(), dec.v.cols(), |i, j| dec.v[(i, j)].conj());
    SchmidtDecomposition {
        spectrum: SchmidtSpectrum { lambdas },
        left: dec.u,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_each_invariant_by_name() {
        let bad_trace = ComplexMatrix::identity(4);
        let err = BipartiteState::new(bad_trace, 2, 2).unwrap_err();
        assert!(matches!(
            err,
            QstateError::InvalidState {
                invariant: "unit_trace",
                ..
            }
        ));
        let neg = ComplexMatrix::from_real_diag(&[1.5, -0.5, 0.0, 0.0]);
        let err = BipartiteState::new(neg, 2, 2).unwrap_err();
        assert!(matches!(
            err,
            QstateError::InvalidState {
                invariant: "positive_semidefinite",
                ..
            }
        ));
        let err =
            BipartiteState::new(ComplexMatrix::identity(3).scale(1.0 / 3.0), 2, 2).unwrap_err();
        assert!(matches!(
            err,
            QstateError::InvalidState {
                invariant: "dimension",
                ..
            }
        ));
        let mut m = ComplexMatrix::identity(4).scale(0.25);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        let err = BipartiteState::new(m, 2, 2).unwrap_err();
        assert!(matches!(
            err,
            QstateError::InvalidState {
                invariant: "hermitian",
                ..
            }
        ));
    }

    #[test]
    fn schmidt_of_standard_states() {
        let bell = PureBipartiteState::from_terms(&[(0, 0, 1.0), (1, 1, 1.0)], 2, 2).unwrap();
        let dec = schmidt_decompose(&bell);
        assert!((dec.spectrum.lambdas[0] - 0.5).abs() < 1e-12);
        assert!((dec.spectrum.lambdas[1] - 0.5).abs() < 1e-12);
        let prod = PureBipartiteState::from_terms(&[(0, 0, 1.0)], 3, 3).unwrap();
        let dec = schmidt_decompose(&prod);
        assert!((dec.spectrum.lambdas[0] - 1.0).abs() < 1e-12);
        assert!(dec.spectrum.lambdas[1..].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn reconstruction_round_trip() {
        let amps: Vec<Complex64> = (0..6)
            .map(|k| Complex64::new((k as f64).sin(), (2.0 * k as f64).cos()))
            .collect();
        let psi = PureBipartiteState::normalized(amps, 2, 3).unwrap();
        let back = schmidt_decompose(&psi).reconstruct();
        for (a, b) in back.iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
