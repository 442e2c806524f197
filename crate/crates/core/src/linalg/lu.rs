use alloc::vec::Vec;

use num_traits::Zero;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// LU factorization with partial (row) pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(a: CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(alloc::format!(
                "LU of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.into_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..];
            for row in tail.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                if f.is_zero() {
                    continue;
                }
                row[k] = f;
                for j in k + 1..n {
                    row[j] -= f * row_k[j];
                }
            }
        }
        Ok(DenseLu { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Magnitudes of the diagonal of `U`.
    pub fn pivot_magnitudes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.lu[i * self.n + i].norm()).collect()
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: C64 = row.iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }
}

/// Pivot magnitudes of Gaussian elimination with complete pivoting.
///
/// The sequence is non-increasing in practice and the number of trailing
/// pivots below a relative threshold estimates the dimension of the null
/// space.
pub fn complete_pivot_magnitudes(a: &CMatrix) -> Vec<f64> {
    assert!(a.is_square(), "complete pivoting needs a square matrix");
    let n = a.rows();
    let mut m = a.as_slice().to_vec();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let mut best = (k, k, -1.0f64);
        for i in k..n {
            for j in k..n {
                let v = m[i * n + j].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (p, q, mag) = best;
        pivots.push(mag);
        if mag == 0.0 {
            pivots.extend(core::iter::repeat_n(0.0, n - k - 1));
            break;
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
        }
        if q != k {
            for i in 0..n {
                m.swap(i * n + k, i * n + q);
            }
        }
        let pivot = m[k * n + k];
        let (head, tail) = m.split_at_mut((k + 1) * n);
        let row_k = &head[k * n..];
        for row in tail.chunks_exact_mut(n) {
            let f = row[k] / pivot;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                row[j] -= f * row_k[j];
            }
            row[k] = C64::zero();
        }
    }
    pivots
}
