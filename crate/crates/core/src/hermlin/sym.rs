use num_complex::Complex64;

use super::ops::compose;
use super::ComplexMatrix;

/// One column of the symmetric-subspace isometry: `(row, amplitude)` pairs.
pub type SparseColumn = Vec<(usize, f64)>;

/// Orthonormal basis of the symmetric subspace of `(C^d)^{⊗k}`, one sparse
/// column per multiset `i_1 <= ... <= i_k`, in lexicographic order.
pub fn symmetric_basis(d: usize, k: usize) -> Vec<SparseColumn> {
    let dims = vec![d; k];
    let mut cols = Vec::new();
    let mut multiset = vec![0usize; k];
    if d == 0 {
        return cols;
    }
    loop {
        let mut perms = distinct_permutations(&multiset);
        perms.sort_unstable();
        let norm = 1.0 / (perms.len() as f64).sqrt();
        cols.push(perms.iter().map(|p| (compose(p, &dims), norm)).collect());
        // next non-decreasing tuple
        let mut pos = k;
        while pos > 0 && multiset[pos - 1] == d - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let next = multiset[pos - 1] + 1;
        for slot in multiset.iter_mut().skip(pos - 1) {
            *slot = next;
        }
    }
    cols
}

fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    if sorted.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut prev = None;
    for (i, &x) in sorted.iter().enumerate() {
        if prev == Some(x) {
            continue;
        }
        prev = Some(x);
        let mut rest = sorted.to_vec();
        rest.remove(i);
        for mut tail in distinct_permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Dimension `C(d + k - 1, k)` of the symmetric subspace.
pub fn symmetric_dim(d: usize, k: usize) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k as u128 {
        num *= d as u128 + i;
        den *= i + 1;
    }
    (num / den) as usize
}

/// Isometry from the symmetric subspace into `(C^d)^{⊗k}`.
pub fn sym_isometry(d: usize, k: usize) -> ComplexMatrix {
    let basis = symmetric_basis(d, k);
    let rows = d.pow(k as u32);
    let mut v = ComplexMatrix::zeros(rows, basis.len());
    for (c, col) in basis.iter().enumerate() {
        for &(r, a) in col {
            v[(r, c)] = Complex64::new(a, 0.0);
        }
    }
    v
}
