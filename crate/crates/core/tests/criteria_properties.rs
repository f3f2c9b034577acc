mod common;

use proptest::prelude::*;
use schmidt_core::criteria::{
    dps_margin, eval_fidelity_witness, ppt_check, reduction_check, schmidt_hierarchy_margin,
    schmidt_projector, unfaithful_margin, CriteriaOptions, FidelityWitness,
};
use schmidt_core::hermlin::hermitian_eigenvalues;
use schmidt_core::qstate::{mix, sample_bures, sample_haar_pure, sample_hs, RngStream};
use schmidt_core::sdpsolve::MARGIN_BAND;
use schmidt_core::witness::search_witness;

use common::low_rank_mixture;

fn opts() -> CriteriaOptions {
    CriteriaOptions::default()
}

#[test]
fn reduction_set_sits_inside_unfaithful_relaxation() {
    let mut checked = 0;
    for d in [2usize, 3, 4] {
        for i in 0..60 {
            let rho = sample_bures(d, &mut RngStream::new(21, i).generator()).unwrap();
            if reduction_check(&rho).inside() {
                checked += 1;
                let u = unfaithful_margin(&rho, 2, &opts()).unwrap();
                assert!(u.inside(), "d={d} sample {i}: margin {}", u.margin);
            }
        }
    }
    assert!(checked > 20);
}

#[test]
fn unfaithful_relaxation_is_nested_in_dimension() {
    // raising D keeps every certificate: pad M_A, M_B inside the room left
    // by tr(μ1 - M_A) = (d - D + 1)μ
    for (d, i) in (0..40u64).map(|i| (3 + (i % 2) as usize, i)) {
        let rho = sample_hs(d, &mut RngStream::new(22, i).generator()).unwrap();
        for dim in 2..d {
            let lo = unfaithful_margin(&rho, dim, &opts()).unwrap().margin;
            let hi = unfaithful_margin(&rho, dim + 1, &opts()).unwrap().margin;
            assert!(hi >= lo - MARGIN_BAND, "d={d} D={dim}: {lo} then {hi}");
        }
    }
}

#[test]
fn low_rank_mixtures_pass_the_first_level() {
    for i in 0..25 {
        let rho = low_rank_mixture(3, 3, 2, 18, 23, i);
        let v = schmidt_hierarchy_margin(&rho, 2, 1, &opts()).unwrap();
        assert!(v.inside(), "sample {i}: {}", v.margin);
        let rho = low_rank_mixture(2, 3, 1, 12, 24, i);
        assert!(ppt_check(&rho).inside());
    }
}

#[test]
fn level_two_implies_level_one() {
    for i in 0..12 {
        let rho = sample_hs(2, &mut RngStream::new(25, i).generator()).unwrap();
        let k1 = ppt_check(&rho);
        let k2 = dps_margin(&rho, 2, &opts()).unwrap();
        if k2.inside() {
            assert!(k1.inside(), "sample {i}");
        }
        // S^2 is smaller, so an exit at level one is an exit at level two
        if k1.outside() {
            assert!(k2.outside(), "sample {i}: {}", k2.margin);
        }
        let s2 = schmidt_hierarchy_margin(&rho, 1, 2, &opts()).unwrap();
        assert_eq!(s2.band, k2.band);
    }
}

#[test]
fn trivial_schmidt_level_matches_ppt() {
    for i in 0..30 {
        let rho = sample_hs(3, &mut RngStream::new(26, i).generator()).unwrap();
        let a = schmidt_hierarchy_margin(&rho, 1, 1, &opts()).unwrap();
        assert_eq!(a.band, ppt_check(&rho).band);
    }
}

#[test]
fn projector_norm_equals_dimension() {
    for dim in [2usize, 3, 4] {
        let p = schmidt_projector(2, 3, dim);
        let pp = &p * &p.adjoint();
        let top = hermitian_eigenvalues(&pp).unwrap()[0];
        assert!((top - dim as f64).abs() < 1e-12);
    }
}

#[test]
fn unfaithful_states_admit_no_witness() {
    let mut checked = 0;
    for d in [2usize, 3] {
        for i in 0..30 {
            let rho = sample_hs(d, &mut RngStream::new(27, i).generator()).unwrap();
            if unfaithful_margin(&rho, 2, &opts()).unwrap().inside() {
                checked += 1;
                let w = search_witness(&rho, 2, 8, RngStream::new(28, i)).unwrap();
                assert!(w.violation <= 1e-7, "d={d} sample {i}: {}", w.violation);
            }
        }
    }
    assert!(checked > 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fidelity_witness_is_affine(d in 2usize..5, dim in 2usize..4, t in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assume!(dim <= d + 1);
        let mut rng = RngStream::new(seed, 0).generator();
        let target = sample_haar_pure(d, d, &mut rng).unwrap();
        let w = FidelityWitness::minimal(target, dim).unwrap();
        let a = sample_hs(d, &mut rng).unwrap();
        let b = sample_bures(d, &mut rng).unwrap();
        let m = mix(&[(t, &a), (1.0 - t, &b)]).unwrap();
        let lhs = eval_fidelity_witness(&w, &m).unwrap();
        let rhs = t * eval_fidelity_witness(&w, &a).unwrap() + (1.0 - t) * eval_fidelity_witness(&w, &b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}
