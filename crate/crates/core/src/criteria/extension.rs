//! Symmetric extensions `E` on `X ⊗ Sym^k(Y)` with the partial-transpose
//! cuts and the reduced marginal used by the DPS-type criteria.

use num_complex::Complex64;

use super::herm::{add_mapped_var, Entries, HermVar};
use crate::hermlin::{digits, partial_transpose_index, symmetric_basis, symmetric_dim, SparseColumn};
use crate::sdpsolve::{BlockId, LmiBuilder};

pub(crate) struct SymExtension {
    pub dx: usize,
    pub dy: usize,
    pub k: usize,
    basis: Vec<SparseColumn>,
    pub var: HermVar,
}

impl SymExtension {
    pub fn new(lmi: &mut LmiBuilder, dx: usize, dy: usize, k: usize) -> Self {
        let basis = symmetric_basis(dy, k);
        let var = HermVar::new(lmi, dx * basis.len());
        Self { dx, dy, k, basis, var }
    }

    /// Number of real variables an extension of this shape needs.
    pub fn var_count(dx: usize, dy: usize, k: usize) -> usize {
        (dx * symmetric_dim(dy, k)).pow(2)
    }

    pub fn sym_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn lifted_dim(&self) -> usize {
        self.dx * self.dy.pow(self.k as u32)
    }

    fn lifted_dims(&self) -> Vec<usize> {
        std::iter::once(self.dx)
            .chain(std::iter::repeat(self.dy).take(self.k))
            .collect()
    }

    /// `(1 ⊗ V) E_pq (1 ⊗ V)†` on `X ⊗ Y^{⊗k}`.
    pub fn lift_unit(&self, p: usize, q: usize) -> Entries {
        let s = self.sym_dim();
        let stride = self.dy.pow(self.k as u32);
        let (x, a) = (p / s, p % s);
        let (x2, b) = (q / s, q % s);
        let mut out = Vec::with_capacity(self.basis[a].len() * self.basis[b].len());
        for &(r, vr) in &self.basis[a] {
            for &(c, vc) in &self.basis[b] {
                out.push((x * stride + r, x2 * stride + c, Complex64::new(vr * vc, 0.0)));
            }
        }
        out
    }

    /// Lifted unit with the last `j` copies of `Y` transposed.
    pub fn cut_unit(&self, p: usize, q: usize, j: usize) -> Entries {
        let dims = self.lifted_dims();
        let mask: Vec<bool> = (0..dims.len()).map(|t| t > self.k - j).collect();
        let mut scratch = vec![0; 2 * dims.len()];
        self.lift_unit(p, q)
            .into_iter()
            .map(|(r, c, z)| {
                let (r2, c2) = partial_transpose_index(r, c, &dims, &mask, &mut scratch);
                (r2, c2, z)
            })
            .collect()
    }

    /// Trace over the first `k - 1` copies of `Y`, landing on `X ⊗ Y`.
    pub fn marginal_unit(&self, p: usize, q: usize) -> Entries {
        let dims = self.lifted_dims();
        let n = dims.len();
        let mut rd = vec![0; n];
        let mut cd = vec![0; n];
        let mut out = Vec::new();
        for (r, c, z) in self.lift_unit(p, q) {
            digits(r, &dims, &mut rd);
            digits(c, &dims, &mut cd);
            if (1..n - 1).all(|t| rd[t] == cd[t]) {
                out.push((rd[0] * self.dy + rd[n - 1], cd[0] * self.dy + cd[n - 1], z));
            }
        }
        out
    }

    /// `E ⪰ 0` (or `E ⪰ t·1` when `slack`).
    pub fn add_e_block(&self, lmi: &mut LmiBuilder, slack: bool) -> BlockId {
        let block = lmi.add_hermitian_block(self.var.n, slack);
        add_mapped_var(lmi, &self.var, block, 1.0, &mut |p, q| {
            vec![(p, q, Complex64::new(1.0, 0.0))]
        });
        block
    }

    /// One slack block per cut `j = 1..=k` (last `j` copies transposed).
    /// Each cut is compressed to `X ⊗ Sym^{k-j}(Y) ⊗ Sym^j(Y)`, which holds
    /// its support; on the full space the shift could never be positive.
    pub fn add_cut_blocks(&self, lmi: &mut LmiBuilder) -> Vec<BlockId> {
        (1..=self.k)
            .map(|j| {
                let (size, table) = self.cut_compression(j);
                let block = lmi.add_hermitian_block(size, true);
                add_mapped_var(lmi, &self.var, block, 1.0, &mut |p, q| {
                    self.cut_unit(p, q, j)
                        .into_iter()
                        .map(|(r, c, z)| {
                            let (u, a) = table[r];
                            let (v, b) = table[c];
                            (u, v, z * (a * b))
                        })
                        .collect()
                });
                block
            })
            .collect()
    }

    /// Size of the compressed cut `j` and, for each lifted index, its
    /// compressed index and amplitude.
    pub fn cut_compression(&self, j: usize) -> (usize, Vec<(usize, f64)>) {
        let head = sym_lookup(self.dy, self.k - j);
        let tail = sym_lookup(self.dy, j);
        let (s1, s2) = (symmetric_dim(self.dy, self.k - j), symmetric_dim(self.dy, j));
        let tail_len = self.dy.pow(j as u32);
        let stride = self.dy.pow(self.k as u32);
        let table = (0..self.lifted_dim())
            .map(|r| {
                let (x, rest) = (r / stride, r % stride);
                let (h, t) = (head[rest / tail_len], tail[rest % tail_len]);
                ((x * s1 + h.0) * s2 + t.0, h.1 * t.1)
            })
            .collect();
        (self.dx * s1 * s2, table)
    }
}

/// Symmetric-basis column and amplitude of each product basis vector.
fn sym_lookup(d: usize, m: usize) -> Vec<(usize, f64)> {
    if m == 0 {
        return vec![(0, 1.0)];
    }
    let mut out = vec![(0, 0.0); d.pow(m as u32)];
    for (s, col) in symmetric_basis(d, m).iter().enumerate() {
        for &(r, a) in col {
            out[r] = (s, a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_of_lifted_unit_keeps_trace() {
        let mut lmi = LmiBuilder::new();
        let ext = SymExtension::new(&mut lmi, 2, 3, 2);
        assert_eq!(ext.sym_dim(), 6);
        for p in 0..ext.var.n {
            let tr: f64 = ext
                .marginal_unit(p, p)
                .iter()
                .filter(|(r, c, _)| r == c)
                .map(|(_, _, z)| z.re)
                .sum();
            assert!((tr - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn level_one_is_identity_map() {
        let mut lmi = LmiBuilder::new();
        let ext = SymExtension::new(&mut lmi, 2, 2, 1);
        assert_eq!(ext.marginal_unit(1, 2), vec![(1, 2, Complex64::new(1.0, 0.0))]);
        // transposing Y: |0,1><1,0| -> |0,0><1,1|
        assert_eq!(ext.cut_unit(1, 2, 1), vec![(0, 3, Complex64::new(1.0, 0.0))]);
    }
}
