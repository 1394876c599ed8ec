//! Dense order-k real tensors with extent `n` per mode.
//!
//! Entries are stored row-major with the first index slowest, so the
//! mode-0 slice `A[i, ..]` is the contiguous block `i·n^{k-1} .. (i+1)·n^{k-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    order: usize,
    n: usize,
    entries: Vec<f64>,
}

impl Tensor {
    pub fn new(order: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        let expected = checked_len(order, n)?;
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Tensor { order, n, entries })
    }

    pub fn zeros(order: usize, n: usize) -> Self {
        let len = checked_len(order, n).expect("tensor size overflow");
        Tensor {
            order,
            n,
            entries: vec![0.0; len],
        }
    }

    pub fn filled(order: usize, n: usize, value: f64) -> Self {
        let mut t = Self::zeros(order, n);
        t.entries.iter_mut().for_each(|e| *e = value);
        t
    }

    pub fn from_fn(order: usize, n: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(order, n);
        let mut idx = vec![0usize; order];
        for offset in 0..t.entries.len() {
            t.unravel_into(offset, &mut idx);
            t.entries[offset] = f(&idx);
        }
        t
    }

    /// `Σ_i e_i ⊗ … ⊗ e_i`.
    pub fn diagonal(order: usize, n: usize) -> Self {
        Self::from_fn(order, n, |idx| if idx.iter().all(|&i| i == idx[0]) { 1.0 } else { 0.0 })
    }

    pub fn basis(order: usize, n: usize, index: &[usize]) -> Self {
        let mut t = Self::zeros(order, n);
        let off = t.offset(index);
        t.entries[off] = 1.0;
        t
    }

    /// `u₁ ⊗ … ⊗ u_k`; all factors must share a length.
    pub fn rank_one(factors: &[Vec<f64>]) -> Result<Self> {
        let order = factors.len();
        let n = factors.first().map_or(1, |f| f.len());
        if let Some(bad) = factors.iter().find(|f| f.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(order, n, |idx| {
            idx.iter().zip(factors).map(|(&i, f)| f[i]).product()
        }))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.order);
        index.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn unravel_into(&self, mut offset: usize, index: &mut [usize]) {
        for slot in index.iter_mut().rev() {
            *slot = offset % self.n;
            offset /= self.n;
        }
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.entries[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let off = self.offset(index);
        self.entries[off] = value;
    }

    /// Stride of `mode` in the flat layout.
    pub fn stride(&self, mode: usize) -> usize {
        self.n.pow((self.order - 1 - mode) as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        crate::lp::l2_norm(&self.entries)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &Tensor) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor {
            order: self.order,
            n: self.n,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor {
            order: self.order,
            n: self.n,
            entries: self.entries.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        Tensor {
            order: self.order,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_scaled_rank_one(&mut self, coeff: f64, factors: &[Vec<f64>]) {
        let mut idx = vec![0usize; self.order];
        for offset in 0..self.entries.len() {
            self.unravel_into(offset, &mut idx);
            let prod: f64 = idx.iter().zip(factors).map(|(&i, f)| f[i]).product();
            self.entries[offset] += coeff * prod;
        }
    }

    /// Contracts `mode` against `x`, giving an order `k-1` tensor.
    pub fn contract(&self, mode: usize, x: &[f64]) -> Result<Tensor> {
        if mode >= self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: mode,
            });
        }
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let stride = self.stride(mode);
        let block = stride * self.n;
        let outer = self.entries.len() / block;
        let mut out = vec![0.0; outer * stride];
        for o in 0..outer {
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0.0 {
                    continue;
                }
                let src = &self.entries[o * block + i * stride..o * block + (i + 1) * stride];
                let dst = &mut out[o * stride..(o + 1) * stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += xi * s;
                }
            }
        }
        Ok(Tensor {
            order: self.order - 1,
            n: self.n,
            entries: out,
        })
    }

    /// Contracts every mode except `mode` with the given vectors; returns the
    /// length-`n` vector `g` with `⟨A, x₁⊗…⊗x_k⟩ = ⟨g, x_mode⟩`.
    pub fn contract_all_but(&self, mode: usize, vectors: &[Vec<f64>]) -> Vec<f64> {
        debug_assert_eq!(vectors.len(), self.order);
        let mut g = vec![0.0; self.n];
        let mut idx = vec![0usize; self.order];
        for (offset, &a) in self.entries.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            self.unravel_into(offset, &mut idx);
            let mut w = a;
            for (m, &i) in idx.iter().enumerate() {
                if m != mode {
                    w *= vectors[m][i];
                }
            }
            g[idx[mode]] += w;
        }
        g
    }

    /// `⟨A, x₁ ⊗ … ⊗ x_k⟩`.
    pub fn multilinear(&self, vectors: &[Vec<f64>]) -> f64 {
        let g = self.contract_all_but(self.order - 1, vectors);
        g.iter().zip(&vectors[self.order - 1]).map(|(a, b)| a * b).sum()
    }

    /// Tensor whose mode `m` is mode `perm[m]` of `self`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Tensor> {
        let mut seen = vec![false; self.order];
        if perm.len() != self.order
            || perm
                .iter()
                .any(|&p| p >= self.order || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidSpec(format!("{perm:?} is not a permutation")));
        }
        let mut src = vec![0usize; self.order];
        Ok(Tensor::from_fn(self.order, self.n, |idx| {
            for (m, &p) in perm.iter().enumerate() {
                src[p] = idx[m];
            }
            self.get(&src)
        }))
    }

    /// Matrix unfolding along `mode`: row `i` holds all entries with index `i`
    /// in `mode`, columns ordered by the remaining indices (row-major).
    pub fn unfold(&self, mode: usize) -> nalgebra::DMatrix<f64> {
        let cols = self.entries.len() / self.n;
        let mut m = nalgebra::DMatrix::zeros(self.n, cols);
        let mut idx = vec![0usize; self.order];
        let mut col_count = vec![0usize; self.n];
        for (offset, &a) in self.entries.iter().enumerate() {
            self.unravel_into(offset, &mut idx);
            let row = idx[mode];
            m[(row, col_count[row])] = a;
            col_count[row] += 1;
        }
        m
    }
}

fn checked_len(order: usize, n: usize) -> Result<usize> {
    n.checked_pow(order as u32)
        .filter(|&len| len <= (1 << 28))
        .ok_or_else(|| Error::ResourceGuard(format!("tensor of order {order} and n {n} is too large")))
}
