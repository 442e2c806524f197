use super::{CMatrix, C64};

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    let norm = a.norm_one();
    let mut squarings = 0u32;
    let mut scale = 1.0f64;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scale_real(scale);
    // ‖x‖ ≤ 1/4: the remainder after 18 terms is below 4^-19/19! ≈ 1e-28
    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=18 {
        term = (&term * &x).scale(C64::new(1.0 / k as f64, 0.0));
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn rotation_generator() {
        let t = 2.7;
        let g = CMatrix::from_row_major(
            2,
            2,
            alloc::vec![c64(0.0, 0.0), c64(-t, 0.0), c64(t, 0.0), c64(0.0, 0.0)],
        );
        let r = expm(&g);
        assert!((r[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((r[(1, 0)].re - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn diagonal_decay() {
        let d = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c64(-(i as f64 + 1.0), 3.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let e = expm(&d);
        let expect = C64::new(-2.0, 3.0).exp();
        assert!((e[(1, 1)] - expect).norm() < 1e-15);
    }
}
