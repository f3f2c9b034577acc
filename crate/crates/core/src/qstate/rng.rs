use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hermlin::ComplexMatrix;

/// Reproducible random stream. Sample `k` of an experiment seeded with `s`
/// uses `RngStream::new(s, k)`: a ChaCha8 generator keyed by `seed` with
/// stream id `stream_index`, so streams are independent and their contents
/// do not depend on how work is split across threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    pub fn generator(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        StreamRng { rng }
    }
}

/// Generator with portable uniform and normal draws.
#[derive(Clone, Debug)]
pub struct StreamRng {
    rng: ChaCha8Rng,
}

impl StreamRng {
    /// Uniform on `[0, 1)` from the top 53 bits of one 64-bit word.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by Box-Muller; every call consumes exactly two
    /// uniforms and keeps only the cosine branch.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Complex number with independent standard normal real and imaginary
    /// parts (real part drawn first).
    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.normal();
        let im = self.normal();
        Complex64::new(re, im)
    }

    /// `rows x cols` matrix of complex normals, filled row by row.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut StreamRng) -> ComplexMatrix {
    let g = rng.ginibre(n, n);
    let qr = g.to_nalgebra().qr();
    let q: DMatrix<Complex64> = qr.q();
    let r = qr.r();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q[(i, j)] * phase
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..5)
            .map({
                let mut g = RngStream::new(42, 3).generator();
                move |_| g.uniform()
            })
            .collect();
        let mut g = RngStream::new(42, 3).generator();
        let b: Vec<f64> = (0..5).map(|_| g.uniform()).collect();
        assert_eq!(a, b);
        let mut h = RngStream::new(42, 4).generator();
        assert_ne!(a[0], h.uniform());
    }

    #[test]
    fn normal_moments() {
        let mut g = RngStream::new(7, 0).generator();
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| g.normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut g = RngStream::new(1, 0).generator();
        for n in [1, 2, 5, 9] {
            let u = haar_unitary(n, &mut g);
            let dev = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(n)).max_abs();
            assert!(dev < 1e-10, "n={n} dev={dev}");
        }
    }
}
