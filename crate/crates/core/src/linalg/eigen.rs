use alloc::vec;
use alloc::vec::Vec;

use super::CMatrix;

/// Eigenvalues of a hermitian matrix in ascending order.
///
/// The `n×n` complex problem is embedded in the `2n×2n` real symmetric matrix
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `A` with every value
/// doubled; cyclic Jacobi rotations diagonalize it. Only the hermitian part of
/// the input is used.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    assert!(a.is_square(), "eigenvalues need a square matrix");
    let n = a.rows();
    if n == 0 {
        return Vec::new();
    }
    let h = a.hermitian_part();
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[(i + n) * m + j] = z.im;
            s[i * m + (j + n)] = -z.im;
        }
    }
    let mut ev = jacobi_eigenvalues(&mut s, m);
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    ev.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Spectral norm `‖A‖₂ = sqrt(λ_max(A†A))`.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    let gram = &a.adjoint() * a;
    hermitian_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

fn jacobi_eigenvalues(s: &mut [f64], m: usize) -> Vec<f64> {
    let scale = s.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return vec![0.0; m];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i * m + j] * s[i * m + j])
            .sum();
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| s[i * m + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn pauli_y_spectrum() {
        let sy = CMatrix::from_row_major(
            2,
            2,
            alloc::vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
        );
        let ev = hermitian_eigenvalues(&sy);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_sorted() {
        let d = CMatrix::from_real_diagonal(&[3.0, -1.0, 0.5, 0.5]);
        assert_eq!(hermitian_eigenvalues(&d), alloc::vec![-1.0, 0.5, 0.5, 3.0]);
    }

    #[test]
    fn spectral_norm_of_ladder() {
        // a on cutoff 3 has singular values sqrt(1), sqrt(2), sqrt(3), 0
        let a = CMatrix::from_fn(4, 4, |i, j| {
            if j == i + 1 {
                c64((j as f64).sqrt(), 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        assert!((spectral_norm(&a) - 3f64.sqrt()).abs() < 1e-13);
    }
}
