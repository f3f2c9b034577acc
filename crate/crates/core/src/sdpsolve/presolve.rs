use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{BlockSparse, SdpError};

/// Gram matrix `<A_i, A_j>` of the constraint matrices, plus `G^T G` for the
/// dual-equality columns so that dependence is judged on the combined rows.
pub(crate) fn constraint_gram(cons: &[&BlockSparse], g: &DMatrix<f64>) -> DMatrix<f64> {
    let m = cons.len();
    let mut by_key: HashMap<(usize, usize, usize), Vec<(usize, f64)>> = HashMap::new();
    for (i, a) in cons.iter().enumerate() {
        for e in a.entries() {
            let w = if e.row == e.col { 1.0 } else { 2.0_f64.sqrt() };
            by_key
                .entry((e.block, e.row, e.col))
                .or_default()
                .push((i, w * e.value));
        }
    }
    let mut gram = DMatrix::zeros(m, m);
    for list in by_key.values() {
        for (p, &(i, vi)) in list.iter().enumerate() {
            for &(j, vj) in &list[p..] {
                gram[(i, j)] += vi * vj;
                if i != j {
                    gram[(j, i)] += vi * vj;
                }
            }
        }
    }
    if g.nrows() > 0 {
        gram += g.transpose() * g;
    }
    gram
}

/// Greedy pivoted Cholesky; returns the selected (independent) indices in
/// ascending order. A pivot is rejected once the largest remaining diagonal
/// falls below `rel_tol` times the largest initial diagonal.
pub(crate) fn independent_set(gram: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let n = gram.nrows();
    let mut d: Vec<f64> = (0..n).map(|i| gram[(i, i)]).collect();
    let max0 = d.iter().copied().fold(0.0, f64::max);
    if max0 <= 0.0 {
        return Vec::new();
    }
    let mut active = vec![true; n];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut selected = Vec::new();
    loop {
        let pick = (0..n)
            .filter(|&i| active[i])
            .max_by(|&a, &b| d[a].total_cmp(&d[b]).then(b.cmp(&a)));
        let Some(p) = pick else { break };
        if d[p] <= rel_tol * max0 {
            break;
        }
        let piv = d[p].sqrt();
        let mut col: Vec<f64> = (0..n).map(|i| gram[(i, p)]).collect();
        for l in &cols {
            let lp = l[p];
            if lp != 0.0 {
                for (c, &li) in col.iter_mut().zip(l) {
                    *c -= lp * li;
                }
            }
        }
        for c in col.iter_mut() {
            *c /= piv;
        }
        for i in 0..n {
            if active[i] {
                d[i] -= col[i] * col[i];
            }
        }
        active[p] = false;
        selected.push(p);
        cols.push(col);
    }
    selected.sort_unstable();
    selected
}

/// Checks that every dropped row's right-hand side agrees with the
/// combination of kept rows reproducing it.
pub(crate) fn check_consistency(
    gram: &DMatrix<f64>,
    kept: &[usize],
    rhs: &[f64],
    what: &str,
) -> Result<(), SdpError> {
    let n = gram.nrows();
    let dropped: Vec<usize> = (0..n).filter(|i| kept.binary_search(i).is_err()).collect();
    if dropped.is_empty() {
        return Ok(());
    }
    let k = kept.len();
    if k == 0 {
        // every row is zero; each rhs must vanish
        if let Some(&i) = dropped.iter().find(|&&i| rhs[i].abs() > 1e-9) {
            return Err(SdpError::IllPosed(format!(
                "{what} {i} has zero coefficients but rhs {}",
                rhs[i]
            )));
        }
        return Ok(());
    }
    let gkk = DMatrix::from_fn(k, k, |a, b| gram[(kept[a], kept[b])]);
    let chol = gkk
        .cholesky()
        .ok_or_else(|| SdpError::NumericalFailure("presolve Gram not positive".into()))?;
    let scale = 1.0 + rhs.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    for &i in &dropped {
        let g = DMatrix::from_fn(k, 1, |a, _| gram[(kept[a], i)]);
        let c = chol.solve(&g);
        let implied: f64 = (0..k).map(|a| c[(a, 0)] * rhs[kept[a]]).sum();
        if (implied - rhs[i]).abs() > 1e-6 * scale {
            return Err(SdpError::IllPosed(format!(
                "{what} {i} is a combination of others but its rhs {} differs from the implied {implied}",
                rhs[i]
            )));
        }
    }
    Ok(())
}
