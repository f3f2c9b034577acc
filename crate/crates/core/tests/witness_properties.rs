use proptest::prelude::*;
use schmidt_core::criteria::{eval_fidelity_witness, FidelityWitness};
use schmidt_core::hermlin::kron;
use schmidt_core::qstate::{
    embed, haar_unitary, maximally_entangled, noisy_state, sample_haar_pure, sample_hs, BipartiteState,
    RngStream,
};
use schmidt_core::witness::{objective, search_witness};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn objective_is_local_unitary_invariant(d in 2usize..5, dim in 2usize..4, seed in any::<u64>()) {
        prop_assume!(dim <= d);
        let mut rng = RngStream::new(seed, 0).generator();
        let rho = sample_hs(d, &mut rng).unwrap();
        let psi = sample_haar_pure(d, d, &mut rng).unwrap();
        let u = kron(&haar_unitary(d, &mut rng), &haar_unitary(d, &mut rng));
        let rho2 = BipartiteState::new((&(&u * rho.rho()) * &u.adjoint()).hermitian_part(), d, d).unwrap();
        let psi2 = u.matvec(psi.amplitudes()).unwrap();
        let a = objective(&rho, psi.amplitudes(), dim).unwrap();
        let b = objective(&rho2, &psi2, dim).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn positive_violations_become_firing_witnesses() {
    for (i, p) in [0.0, 0.2, 0.4, 0.6].into_iter().enumerate() {
        let rho = noisy_state(&embed(&maximally_entangled(2), 3, 3).unwrap(), p).unwrap();
        let c = search_witness(&rho, 2, 6, RngStream::new(31, i as u64)).unwrap();
        if c.violation > 1e-7 {
            let w = FidelityWitness::minimal(c.psi.clone(), 2).unwrap();
            let v = eval_fidelity_witness(&w, &rho).unwrap();
            assert!(v < -1e-7 + 1e-9, "p={p}: {v}");
            assert!((v + c.violation).abs() < 1e-9);
        }
    }
}

#[test]
fn best_violation_grows_with_restarts() {
    let rho = sample_hs(3, &mut RngStream::new(32, 0).generator()).unwrap();
    let mut last = f64::NEG_INFINITY;
    for r in [1usize, 2, 4, 8, 16] {
        let v = search_witness(&rho, 2, r, RngStream::new(33, 0)).unwrap().violation;
        assert!(v >= last);
        last = v;
    }
}
