use num_complex::Complex64;

use super::WitnessError;
use crate::hermlin::{svd, ComplexMatrix};
use crate::qstate::BipartiteState;

/// Singular values closer than this are treated as one degenerate cluster.
const CLUSTER_TOL: f64 = 1e-9;

fn coefficient_matrix(psi: &[Complex64], d_a: usize, d_b: usize) -> ComplexMatrix {
    ComplexMatrix::new(d_a, d_b, psi.to_vec()).expect("length d_a * d_b")
}

fn check(rho: &BipartiteState, psi: &[Complex64], dim: usize) -> Result<(), WitnessError> {
    if psi.len() != rho.dim() {
        return Err(WitnessError::InvalidArgument(format!(
            "vector of length {} for a {}x{} state",
            psi.len(),
            rho.d_a(),
            rho.d_b()
        )));
    }
    let max = rho.d_a().min(rho.d_b()) + 1;
    if dim < 2 || dim > max {
        return Err(WitnessError::InvalidArgument(format!(
            "witness dimension {dim} outside 2..={max}"
        )));
    }
    Ok(())
}

/// `<ψ|ρ|ψ> - Σ_{i<D} σ_i²` for an arbitrary (not necessarily unit) vector.
pub fn objective(rho: &BipartiteState, psi: &[Complex64], dim: usize) -> Result<f64, WitnessError> {
    check(rho, psi, dim)?;
    Ok(eval(rho, psi, dim))
}

pub(crate) fn eval(rho: &BipartiteState, psi: &[Complex64], dim: usize) -> f64 {
    let fid = rho.rho().expectation(psi).expect("matching length").re;
    let s = svd(&coefficient_matrix(psi, rho.d_a(), rho.d_b())).singular_values;
    fid - s.iter().take(dim - 1).map(|x| x * x).sum::<f64>()
}

/// Gradient in the complex representation `∂f/∂Re ψ + i ∂f/∂Im ψ`:
/// `2ρψ - 2 Σ_{i<D} w_i σ_i u_i v_i†`. Inside a degenerate cluster that
/// straddles the cut the weights are averaged over the cluster.
pub fn objective_gradient(
    rho: &BipartiteState,
    psi: &[Complex64],
    dim: usize,
) -> Result<Vec<Complex64>, WitnessError> {
    check(rho, psi, dim)?;
    Ok(gradient(rho, psi, dim))
}

pub(crate) fn gradient(rho: &BipartiteState, psi: &[Complex64], dim: usize) -> Vec<Complex64> {
    let (d_a, d_b) = (rho.d_a(), rho.d_b());
    let mut g = rho.rho().matvec(psi).expect("matching length");
    for z in g.iter_mut() {
        *z *= 2.0;
    }
    let dec = svd(&coefficient_matrix(psi, d_a, d_b));
    let s = &dec.singular_values;
    let weights = cut_weights(s, dim - 1);
    for (k, (&sk, &w)) in s.iter().zip(&weights).enumerate() {
        if w == 0.0 {
            continue;
        }
        let c = 2.0 * w * sk;
        for i in 0..d_a {
            for j in 0..d_b {
                g[i * d_b + j] -= dec.u[(i, k)] * dec.v[(j, k)].conj() * c;
            }
        }
    }
    g
}

/// 1 for the top `keep` values, 0 below, and the in-cluster fraction for a
/// cluster of (near-)equal values crossing position `keep`.
fn cut_weights(s: &[f64], keep: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..s.len()).map(|i| if i < keep { 1.0 } else { 0.0 }).collect();
    if keep == 0 || keep >= s.len() {
        return w;
    }
    let pivot = s[keep - 1];
    let members: Vec<usize> = (0..s.len()).filter(|&i| (s[i] - pivot).abs() <= CLUSTER_TOL).collect();
    let inside = members.iter().filter(|&&i| i < keep).count();
    if members.len() > inside {
        let frac = inside as f64 / members.len() as f64;
        for &i in &members {
            w[i] = frac;
        }
    }
    w
}

/// Largest deviation between the analytic gradient and central differences
/// with step `1e-5`, relative to the gradient's largest entry (or 1 if
/// smaller).
pub fn gradient_check(
    rho: &BipartiteState,
    psi: &crate::qstate::PureBipartiteState,
    dim: usize,
) -> Result<f64, WitnessError> {
    let v = psi.amplitudes().to_vec();
    check(rho, &v, dim)?;
    let s = svd(&psi.coefficient_matrix()).singular_values;
    if dim - 1 < s.len() {
        let gap = s[dim - 2].powi(2) - s[dim - 1].powi(2);
        if gap <= 1e-6 {
            return Err(WitnessError::DegenerateSpectrum { gap });
        }
    }
    let g = gradient(rho, &v, dim);
    let h = 1e-5;
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in 0..v.len() {
        for unit in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[k] += unit * h;
            minus[k] -= unit * h;
            let fd = (eval(rho, &plus, dim) - eval(rho, &minus, dim)) / (2.0 * h);
            let an = if unit.re == 1.0 { g[k].re } else { g[k].im };
            dev = dev.max((an - fd).abs());
            scale = scale.max(an.abs());
        }
    }
    Ok(dev / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{maximally_entangled, product_basis, sample_haar_pure, sample_hs, RngStream};

    #[test]
    fn random_gradient_matches_differences() {
        let mut g = RngStream::new(9, 0).generator();
        let rho = sample_hs(3, &mut g).unwrap();
        let psi = sample_haar_pure(3, 3, &mut g).unwrap();
        assert!(gradient_check(&rho, &psi, 2).unwrap() < 1e-5);
    }

    #[test]
    fn product_target_on_diagonal_state() {
        let diag: Vec<f64> = (1..=9).map(|k| k as f64 / 45.0).collect();
        let rho = BipartiteState::new(ComplexMatrix::from_real_diag(&diag), 3, 3).unwrap();
        let psi = product_basis(3, 3, 1, 2).unwrap();
        assert!(gradient_check(&rho, &psi, 2).unwrap() < 1e-5);
    }

    #[test]
    fn fidelity_gradient_is_linear_in_rho() {
        let mut g = RngStream::new(10, 0).generator();
        let rho = sample_hs(2, &mut g).unwrap();
        let psi = sample_haar_pure(2, 2, &mut g).unwrap();
        let v = psi.amplitudes();
        let one = rho.rho().matvec(v).unwrap();
        let doubled = rho.rho().scale(2.0).matvec(v).unwrap();
        for (a, b) in one.iter().zip(&doubled) {
            assert_eq!(*a * 2.0, *b);
        }
    }

    #[test]
    fn degenerate_cut_is_reported() {
        let rho = BipartiteState::maximally_mixed(3, 3);
        let psi = maximally_entangled(3);
        assert!(matches!(gradient_check(&rho, &psi, 2), Err(WitnessError::DegenerateSpectrum { .. })));
        assert!(objective(&rho, psi.amplitudes(), 5).is_err());
    }

    #[test]
    fn cluster_weights_average() {
        assert_eq!(cut_weights(&[0.9, 0.3, 0.3, 0.1], 2), vec![1.0, 0.5, 0.5, 0.0]);
        assert_eq!(cut_weights(&[0.9, 0.3, 0.2], 1), vec![1.0, 0.0, 0.0]);
    }
}
