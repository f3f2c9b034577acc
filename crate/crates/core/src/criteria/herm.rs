//! Hermitian matrix variables inside an [`LmiBuilder`] and helpers to push
//! their images under linear maps into blocks and equality constraints.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::hermlin::ComplexMatrix;
use crate::sdpsolve::{BlockId, LmiBuilder, VarId};

/// Real coordinate of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum HermCoord {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

/// Sparse full-matrix entries `(row, col, value)`.
pub(crate) type Entries = Vec<(usize, usize, Complex64)>;

/// An `n x n` Hermitian variable: `n` diagonal plus `n(n-1)` off-diagonal
/// real coordinates.
#[derive(Clone, Debug)]
pub(crate) struct HermVar {
    pub n: usize,
    pub vars: Vec<(VarId, HermCoord)>,
}

impl HermVar {
    pub fn new(lmi: &mut LmiBuilder, n: usize) -> Self {
        let mut vars = Vec::with_capacity(n * n);
        for p in 0..n {
            vars.push((lmi.add_var(), HermCoord::Diag(p)));
            for q in p + 1..n {
                vars.push((lmi.add_var(), HermCoord::Re(p, q)));
                vars.push((lmi.add_var(), HermCoord::Im(p, q)));
            }
        }
        Self { n, vars }
    }

    /// Reassembles the matrix from solved variable values.
    pub fn value(&self, y: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for &(v, c) in &self.vars {
            let x = y[v.0];
            match c {
                HermCoord::Diag(p) => m[(p, p)] += x,
                HermCoord::Re(p, q) => {
                    m[(p, q)] += x;
                    m[(q, p)] += x;
                }
                HermCoord::Im(p, q) => {
                    m[(p, q)] += Complex64::new(0.0, x);
                    m[(q, p)] -= Complex64::new(0.0, x);
                }
            }
        }
        m
    }

    /// Diagonal coordinates (for trace constraints).
    pub fn trace_coeffs(&self) -> Vec<(VarId, f64)> {
        self.vars
            .iter()
            .filter(|(_, c)| matches!(c, HermCoord::Diag(_)))
            .map(|&(v, _)| (v, 1.0))
            .collect()
    }
}

/// Image of a coordinate direction under a linear map given on matrix units
/// `E_pq`, merged and with zeros dropped.
pub(crate) fn coord_image(coord: HermCoord, unit: &mut impl FnMut(usize, usize) -> Entries) -> Entries {
    let i = Complex64::new(0.0, 1.0);
    let mut out: Entries = match coord {
        HermCoord::Diag(p) => unit(p, p),
        HermCoord::Re(p, q) => {
            let mut e = unit(p, q);
            e.extend(unit(q, p));
            e
        }
        HermCoord::Im(p, q) => {
            let mut e: Entries = unit(p, q).into_iter().map(|(r, c, z)| (r, c, z * i)).collect();
            e.extend(unit(q, p).into_iter().map(|(r, c, z)| (r, c, -z * i)));
            e
        }
    };
    merge(&mut out);
    out
}

pub(crate) fn merge(e: &mut Entries) {
    e.sort_by_key(|&(r, c, _)| (r, c));
    let mut out: Entries = Vec::with_capacity(e.len());
    for &(r, c, z) in e.iter() {
        match out.last_mut() {
            Some(last) if (last.0, last.1) == (r, c) => last.2 += z,
            _ => out.push((r, c, z)),
        }
    }
    out.retain(|&(_, _, z)| z.norm() > 1e-15);
    *e = out;
}

/// Adds `scale * image` (a Hermitian matrix given by all its entries) as the
/// coefficient of `var` in `block`.
pub(crate) fn add_image(lmi: &mut LmiBuilder, var: VarId, block: BlockId, image: &Entries, scale: f64) {
    for &(r, c, z) in image {
        if r < c {
            lmi.add_term(var, block, r, c, z * scale);
        } else if r == c {
            lmi.add_term(var, block, r, r, Complex64::new(z.re * scale, 0.0));
        }
    }
}

/// Adds every coordinate of `x` mapped by `unit` into `block`.
pub(crate) fn add_mapped_var(
    lmi: &mut LmiBuilder,
    x: &HermVar,
    block: BlockId,
    scale: f64,
    unit: &mut impl FnMut(usize, usize) -> Entries,
) {
    for &(v, c) in &x.vars {
        let img = coord_image(c, unit);
        add_image(lmi, v, block, &img, scale);
    }
}

/// Collects the linear equations `L(X) = target` entrywise on the upper
/// triangle: real part of every entry, imaginary part off the diagonal.
#[derive(Default)]
pub(crate) struct HermEqualities {
    rows: BTreeMap<(usize, usize), Vec<(VarId, Complex64)>>,
}

impl HermEqualities {
    pub fn add_image(&mut self, var: VarId, image: &Entries, scale: f64) {
        for &(r, c, z) in image {
            if r <= c {
                self.rows.entry((r, c)).or_default().push((var, z * scale));
            }
        }
    }

    /// Emits the equalities against `target`, which must be Hermitian.
    pub fn emit(self, lmi: &mut LmiBuilder, target: &ComplexMatrix) {
        let n = target.rows();
        for r in 0..n {
            for c in r..n {
                let coeffs = self.rows.get(&(r, c));
                let t = target[(r, c)];
                let re: Vec<(VarId, f64)> = coeffs
                    .map(|v| v.iter().filter(|(_, z)| z.re != 0.0).map(|&(var, z)| (var, z.re)).collect())
                    .unwrap_or_default();
                if !re.is_empty() || t.re.abs() > 1e-15 {
                    lmi.add_equality(&re, t.re);
                }
                if r < c {
                    let im: Vec<(VarId, f64)> = coeffs
                        .map(|v| v.iter().filter(|(_, z)| z.im != 0.0).map(|&(var, z)| (var, z.im)).collect())
                        .unwrap_or_default();
                    if !im.is_empty() || t.im.abs() > 1e-15 {
                        lmi.add_equality(&im, t.im);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_round_trips_coordinates() {
        let mut lmi = LmiBuilder::new();
        let x = HermVar::new(&mut lmi, 3);
        assert_eq!(x.vars.len(), 9);
        let y: Vec<f64> = (0..9).map(|k| k as f64 + 1.0).collect();
        let m = x.value(&y);
        assert!(m.hermitian_deviation() == 0.0);
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(0, 1)], Complex64::new(2.0, 3.0));
        assert_eq!(m[(1, 0)], Complex64::new(2.0, -3.0));
    }

    #[test]
    fn identity_map_image_is_hermitian_unit() {
        let mut id = |p: usize, q: usize| vec![(p, q, Complex64::new(1.0, 0.0))];
        let img = coord_image(HermCoord::Im(0, 2), &mut id);
        assert_eq!(img, vec![(0, 2, Complex64::new(0.0, 1.0)), (2, 0, Complex64::new(0.0, -1.0))]);
    }
}
