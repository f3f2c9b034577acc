use num_complex::Complex64;

use super::{BipartiteState, PureBipartiteState, QstateError};
use crate::hermlin::{kron, permute_systems, ComplexMatrix};

/// `|Ψ_d> = Σ_i |ii> / √d`.
pub fn maximally_entangled(d: usize) -> PureBipartiteState {
    let terms: Vec<(usize, usize, f64)> = (0..d).map(|i| (i, i, 1.0)).collect();
    PureBipartiteState::from_terms(&terms, d, d).expect("valid dims")
}

/// `|i> ⊗ |j>`.
pub fn product_basis(
    d_a: usize,
    d_b: usize,
    i: usize,
    j: usize,
) -> Result<PureBipartiteState, QstateError> {
    PureBipartiteState::from_terms(&[(i, j, 1.0)], d_a, d_b)
}

/// `p · 1/(d_a d_b) + (1 - p) |ψ><ψ|`.
pub fn noisy_state(psi: &PureBipartiteState, p: f64) -> Result<BipartiteState, QstateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QstateError::ProbabilityOutOfRange(p));
    }
    let n = psi.d_a() * psi.d_b();
    let mut rho = psi.projector().scale(1.0 - p);
    for i in 0..n {
        rho[(i, i)] += Complex64::new(p / n as f64, 0.0);
    }
    BipartiteState::new_trusted(rho, psi.d_a(), psi.d_b())
}

/// Places `psi` on the leading `d_a x d_b` block of a larger space.
pub fn embed(
    psi: &PureBipartiteState,
    d_a: usize,
    d_b: usize,
) -> Result<PureBipartiteState, QstateError> {
    if d_a < psi.d_a() || d_b < psi.d_b() {
        return Err(QstateError::ShrinkingEmbedding {
            from: (psi.d_a(), psi.d_b()),
            to: (d_a, d_b),
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); d_a * d_b];
    for i in 0..psi.d_a() {
        for j in 0..psi.d_b() {
            amps[i * d_b + j] = psi.amplitudes()[i * psi.d_b() + j];
        }
    }
    PureBipartiteState::new(amps, d_a, d_b)
}

/// `ρ^{⊗n}` regrouped as `(A_1 … A_n | B_1 … B_n)`.
pub fn tensor_power_bipartite(
    rho: &BipartiteState,
    n: usize,
) -> Result<BipartiteState, QstateError> {
    if n == 0 {
        return Err(QstateError::Dimension("tensor power needs n >= 1".into()));
    }
    let mut big = rho.rho().clone();
    for _ in 1..n {
        big = kron(&big, rho.rho());
    }
    let dims: Vec<usize> = (0..n).flat_map(|_| [rho.d_a(), rho.d_b()]).collect();
    let perm: Vec<usize> = (0..n)
        .map(|k| 2 * k)
        .chain((0..n).map(|k| 2 * k + 1))
        .collect();
    let out = permute_systems(&big, &dims, &perm)?;
    BipartiteState::new_trusted(out, rho.d_a().pow(n as u32), rho.d_b().pow(n as u32))
}

/// Convex combination; weights must be non-negative and sum to one within
/// `1e-12`.
pub fn mix(components: &[(f64, &BipartiteState)]) -> Result<BipartiteState, QstateError> {
    let Some((_, first)) = components.first() else {
        return Err(QstateError::WeightViolation("empty mixture".into()));
    };
    let (d_a, d_b) = (first.d_a(), first.d_b());
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > 1e-12 {
        return Err(QstateError::WeightViolation(format!(
            "weights must be non-negative and sum to 1 (sum {total})"
        )));
    }
    let mut rho = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for (w, s) in components {
        if (s.d_a(), s.d_b()) != (d_a, d_b) {
            return Err(QstateError::Dimension(
                "mixture components differ in shape".into(),
            ));
        }
        rho = &rho + &s.rho().scale(*w);
    }
    BipartiteState::new_trusted(rho, d_a, d_b)
}
