use proptest::prelude::*;
use schmidt_core::hermlin::{
    hermitian_eigenvalues, kron, min_eigenvalue, partial_trace, partial_transpose, real_embed,
    sym_isometry, BipartitionLayout, Complex64, ComplexMatrix, Side,
};
use schmidt_core::qstate::RngStream;

fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let g = RngStream::new(seed, 0).generator().ginibre(n, n);
    (&g + &g.adjoint()).scale(0.5)
}

fn psd(n: usize, seed: u64) -> ComplexMatrix {
    let g = RngStream::new(seed, 1).generator().ginibre(n, n);
    &g * &g.adjoint()
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_transpose_is_linear_involution(da in 1usize..5, db in 1usize..5, seed in any::<u64>(), s in -2.0f64..2.0) {
        let n = da * db;
        let layout = BipartitionLayout::bipartite(da, db).unwrap();
        let a = hermitian(n, seed);
        let b = hermitian(n, seed ^ 0x5555);
        let ta = partial_transpose(&a, &layout, Side::Right).unwrap();
        let back = partial_transpose(&ta, &layout, Side::Right).unwrap();
        prop_assert!(max_diff(&back, &a) < 1e-14);
        prop_assert!((ta.trace() - a.trace()).norm() < 1e-12);
        prop_assert!(ta.is_hermitian(1e-14));
        let combo = &a + &b.scale(s);
        let lhs = partial_transpose(&combo, &layout, Side::Right).unwrap();
        let rhs = &ta + &partial_transpose(&b, &layout, Side::Right).unwrap().scale(s);
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(da in 1usize..5, db in 1usize..5, seed in any::<u64>()) {
        let layout = BipartitionLayout::bipartite(da, db).unwrap();
        let p = psd(da * db, seed);
        for keep in [0usize, 1] {
            let r = partial_trace(&p, &layout, &[keep]).unwrap();
            prop_assert!((r.trace() - p.trace()).norm() < 1e-10 * (1.0 + p.trace().norm()));
            prop_assert!(min_eigenvalue(&r).unwrap() > -1e-10);
        }
    }

    #[test]
    fn kron_spectrum_is_product_of_spectra(na in 1usize..6, nb in 1usize..6, seed in any::<u64>()) {
        let a = hermitian(na, seed);
        let b = hermitian(nb, seed.wrapping_add(7));
        let ea = hermitian_eigenvalues(&a).unwrap();
        let eb = hermitian_eigenvalues(&b).unwrap();
        let mut expect: Vec<f64> = ea.iter().flat_map(|x| eb.iter().map(move |y| x * y)).collect();
        expect.sort_by(|x, y| y.total_cmp(x));
        let got = hermitian_eigenvalues(&kron(&a, &b)).unwrap();
        for (g, e) in got.iter().zip(&expect) {
            prop_assert!((g - e).abs() < 1e-10 * (1.0 + e.abs()));
        }
    }

    #[test]
    fn real_embedding_preserves_positivity(n in 1usize..7, seed in any::<u64>(), shift in -1.0f64..1.0) {
        let mut h = psd(n, seed).scale(1.0 / n as f64);
        let lmin = min_eigenvalue(&h).unwrap();
        // move the smallest eigenvalue to `shift`
        for i in 0..n {
            h[(i, i)] += Complex64::new(shift - lmin, 0.0);
        }
        let e = real_embed(&h).unwrap();
        let emin = e.symmetric_eigen().eigenvalues.min();
        prop_assert!((emin - shift).abs() < 1e-9);
        prop_assert_eq!(emin >= -1e-12, min_eigenvalue(&h).unwrap() >= -1e-12);
    }
}

#[test]
fn symmetric_isometry_has_orthonormal_columns() {
    for (d, k) in [(2, 1), (2, 3), (3, 2), (3, 3), (4, 2), (2, 5)] {
        let v = sym_isometry(d, k);
        let g = &v.adjoint() * &v;
        assert!(max_diff(&g, &ComplexMatrix::identity(v.cols())) < 1e-12, "d={d} k={k}");
    }
}
