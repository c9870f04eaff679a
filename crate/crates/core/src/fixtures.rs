//! Worked-example operators used by the harness and tests.

use crate::linalg::ComplexMatrix;

/// The 3×3 upper shift `e₂ ↦ e₁, e₃ ↦ e₂`.
pub fn shift3() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0., 1., 0.], &[0., 0., 1.], &[0., 0., 0.]])
}

/// `(x₁, x₂, …) ↦ (x₂, x₃, 0, …)` truncated to the first `dim` coordinates.
pub fn truncated_shift(dim: usize) -> ComplexMatrix {
    assert!(dim >= 3, "truncation must keep the first three coordinates");
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(0, 1)] = 1.0.into();
    m[(1, 2)] = 1.0.into();
    m
}

pub fn restriction_example() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1., 1., 0., 0.],
        &[0., 2., 0., 0.],
        &[0., 0., 0., 1.],
        &[0., 0., 0., 0.],
    ])
}

/// Compression of [`restriction_example`] to `span{e₁, e₂}`.
pub fn restriction_block() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1., 1.], &[0., 2.]])
}

pub fn decomposition_example() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[2., 1., 0., 0.],
        &[0., 1., 0., 0.],
        &[0., 0., 0., 1.],
        &[0., 0., 0., 0.],
    ])
}
