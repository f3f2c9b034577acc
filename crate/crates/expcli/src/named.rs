//! Fixed states used by the experiments.

use schmidt_core::qstate::{maximally_entangled, mix, embed, BipartiteState, PureBipartiteState};

/// `(|Ψ_3><Ψ_3| + |χ><χ|) / 2` on `4 x 4`, with `|χ> = (|23> + |32>)/√2`.
pub fn schmidt_three_example() -> BipartiteState {
    let psi3 = embed(&maximally_entangled(3), 4, 4).expect("3 <= 4");
    let chi = PureBipartiteState::from_terms(&[(2, 3, 1.0), (3, 2, 1.0)], 4, 4).expect("valid terms");
    mix(&[(0.5, &BipartiteState::pure(&psi3)), (0.5, &BipartiteState::pure(&chi))]).expect("convex weights")
}

/// `|φ_1>` of the activation mixture (normalized from its printed digits).
pub fn activation_phi1() -> PureBipartiteState {
    PureBipartiteState::from_terms(&[(1, 1, 0.628), (2, 2, -0.778)], 3, 3).expect("valid terms")
}

/// `|φ_2>` of the activation mixture (normalized from its printed digits).
pub fn activation_phi2() -> PureBipartiteState {
    PureBipartiteState::from_terms(
        &[
            (0, 1, 0.807),
            (0, 2, -0.185),
            (1, 0, -0.102),
            (1, 1, -0.027),
            (1, 2, 0.011),
            (2, 0, 0.551),
            (2, 1, -0.024),
            (2, 2, -0.022),
        ],
        3,
        3,
    )
    .expect("valid terms")
}

/// `0.999 (0.50179 φ_1 + 0.49821 φ_2) + 0.001 · 1/9`.
pub fn activation_state() -> BipartiteState {
    let p1 = BipartiteState::pure(&activation_phi1());
    let p2 = BipartiteState::pure(&activation_phi2());
    let noise = BipartiteState::maximally_mixed(3, 3);
    mix(&[(0.999 * 0.50179, &p1), (0.999 * 0.49821, &p2), (0.001, &noise)]).expect("convex weights")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_are_normalized() {
        assert!((schmidt_three_example().rho().trace().re - 1.0).abs() < 1e-12);
        assert!((activation_state().rho().trace().re - 1.0).abs() < 1e-12);
        // the printed digits are unit norm to three decimals
        let raw: f64 = 0.628f64.powi(2) + 0.778f64.powi(2);
        assert!((raw - 1.0).abs() < 1e-3);
    }
}
