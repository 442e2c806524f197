use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{CMatrix, C64};
use crate::dd::{two_prod, Dd};

/// Compressed sparse row complex matrix.
///
/// Column indices within a row are strictly increasing and explicit zeros are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet index out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                row_of.push(i);
                last = Some((i, j));
            }
        }
        // drop entries that cancelled exactly
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((j, v), i) in indices.into_iter().zip(values).zip(row_of) {
            if !v.is_zero() {
                keep_idx.push(j);
                keep_val.push(v);
                indptr[i + 1] += 1;
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            rows,
            cols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let mut trip = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if !v.is_zero() {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), trip)
    }

    /// Sparse Kronecker product of two dense factors, `a ⊗ b`.
    pub fn kron_dense(a: &CMatrix, b: &CMatrix) -> Self {
        let mut trip = Vec::new();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let x = a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                for k in 0..b.rows() {
                    for l in 0..b.cols() {
                        let y = b[(k, l)];
                        if !y.is_zero() {
                            trip.push((i * b.rows() + k, j * b.cols() + l, x * y));
                        }
                    }
                }
            }
        }
        Self::from_triplets(a.rows() * b.rows(), a.cols() * b.cols(), trip)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over the stored entries of row `i` as `(col, value)`.
    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row_iter(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let range = self.indptr[i]..self.indptr[i + 1];
        match self.indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => C64::zero(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row_iter(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `b - A·x` with every product and sum carried in double-double.
    pub fn residual_compensated(&self, x: &[C64], b: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut re = Dd::new(b[i].re);
                let mut im = Dd::new(b[i].im);
                for (j, v) in self.row_iter(i) {
                    let (p1, e1) = two_prod(v.re, x[j].re);
                    let (p2, e2) = two_prod(v.im, x[j].im);
                    let (p3, e3) = two_prod(v.re, x[j].im);
                    let (p4, e4) = two_prod(v.im, x[j].re);
                    re = re - Dd { hi: p1, lo: e1 } + Dd { hi: p2, lo: e2 };
                    im = im - Dd { hi: p3, lo: e3 } - Dd { hi: p4, lo: e4 };
                }
                C64::new(re.to_f64(), im.to_f64())
            })
            .collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        let values = self.values.iter().map(|v| v * s).collect();
        let mut out = CsrMatrix { values, ..self.clone() };
        out.prune();
        out
    }

    /// `self + s·other`
    pub fn add_scaled(&self, other: &CsrMatrix, s: C64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut trip: Vec<_> = self.triplets().collect();
        trip.extend(other.triplets().map(|(i, j, v)| (i, j, v * s)));
        Self::from_triplets(self.rows, self.cols, trip)
    }

    /// Sparse matrix product `self · other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        let mut acc = vec![C64::zero(); other.cols];
        let mut marker = vec![usize::MAX; other.cols];
        let mut touched = Vec::new();
        for i in 0..self.rows {
            touched.clear();
            for (k, a) in self.row_iter(i) {
                for (j, b) in other.row_iter(k) {
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = C64::zero();
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if !acc[j].is_zero() {
                    indices.push(j);
                    values.push(acc[j]);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: self.rows,
            cols: other.cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        self.add_scaled(other, C64::new(-1.0, 0.0)).max_abs()
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| !v.is_zero()) {
            return;
        }
        let trip: Vec<_> = self.triplets().collect();
        *self = Self::from_triplets(self.rows, self.cols, trip);
    }
}
