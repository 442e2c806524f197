//! Small dense and sparse complex linear algebra.

mod dense;
mod eigen;
mod expm;
mod lu;
mod sparse;

pub use dense::CMatrix;
pub use eigen::{hermitian_eigenvalues, spectral_norm};
pub use expm::expm;
pub use lu::{complete_pivot_magnitudes, DenseLu};
pub use sparse::CsrMatrix;

pub type C64 = num_complex::Complex64;

#[inline]
pub(crate) const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Neumaier-compensated sum of a sequence of reals.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
