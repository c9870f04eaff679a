//! Dense complex linear algebra for small operators.
//!
//! Everything in the crate represents an operator as a [`ComplexMatrix`]. The
//! decompositions live in submodules: cyclic Jacobi for Hermitian matrices,
//! one-sided Jacobi for the SVD, and Hessenberg reduction plus shifted QR for
//! general spectra.

mod eigen;
mod matrix;
mod schur;
mod svd;

pub use eigen::{hermitian_eigen, is_psd, HermitianEigen, PsdVerdict};
pub use matrix::{inner, vec_norm, ComplexMatrix, C64};
pub use schur::{distinct_values, hausdorff_distance, spectrum};
pub use svd::{operator_norm, pinv, singular_values, svd, svd_rank_spaces, svd_rank_spaces_scaled, RankSpaces, Svd, SubspaceBasis};

use thiserror::Error;

/// Default relative tolerance for PSD verdicts.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {op} of {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {bound:e}")]
    NotHermitian { asymmetry: f64, bound: f64 },
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("ragged input: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("{algorithm} did not converge after {iterations} iterations")]
    NoConvergence {
        algorithm: &'static str,
        iterations: usize,
    },
}

impl LinalgError {
    /// True for failures of an iterative method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, LinalgError::NoConvergence { .. })
    }
}

/// `m^p` with `m^0 = I`.
pub fn matpow(m: &ComplexMatrix, p: u32) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "matpow",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mut result = ComplexMatrix::identity(m.rows());
    let mut base = m.clone();
    let mut e = p;
    // square-and-multiply; powers commute so the order is irrelevant
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    Ok(result)
}

/// Kronecker product, `(a ⊗ b)[(i,k),(j,l)] = a[i,j] b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift3() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0., 1., 0.], &[0., 0., 1.], &[0., 0., 0.]])
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::from_rows(&[vec![C64::new(2.0, 1.0)]]).unwrap();
        assert_eq!(m.adjoint()[(0, 0)], C64::new(2.0, -1.0));
        let id = ComplexMatrix::identity(3);
        assert_eq!(id.adjoint(), id);
        let lower = ComplexMatrix::from_real_rows(&[&[0., 0., 0.], &[1., 0., 0.], &[0., 1., 0.]]);
        assert_eq!(shift3().adjoint(), lower);
    }

    #[test]
    fn matmul_checks_dimensions() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            a.matmul(&b),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        let m = ComplexMatrix::from_real_rows(&[&[1., 2.], &[3., 4.]]);
        assert_eq!(ComplexMatrix::identity(2).matmul(&m).unwrap(), m);
        let j = ComplexMatrix::from_real_rows(&[&[0., 1.], &[0., 0.]]);
        assert_eq!(&j * &j, ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn matmul_prop26_square_block() {
        let t = ComplexMatrix::from_real_rows(&[
            &[1., 1., 0., 0.],
            &[0., 2., 0., 0.],
            &[0., 0., 0., 1.],
            &[0., 0., 0., 0.],
        ]);
        let t2 = &t * &t;
        assert_eq!(t2[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(t2[(0, 1)], C64::new(3.0, 0.0));
        assert_eq!(t2[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(t2[(1, 1)], C64::new(4.0, 0.0));
    }

    #[test]
    fn matpow_cases() {
        let m = ComplexMatrix::from_real_rows(&[&[1., 2.], &[3., 4.]]);
        assert_eq!(matpow(&m, 0).unwrap(), ComplexMatrix::identity(2));
        assert_eq!(matpow(&shift3(), 3).unwrap(), ComplexMatrix::zeros(3, 3));
        let t = ComplexMatrix::from_real_rows(&[
            &[2., 1., 0., 0.],
            &[0., 1., 0., 0.],
            &[0., 0., 0., 1.],
            &[0., 0., 0., 0.],
        ]);
        let expected = ComplexMatrix::from_real_rows(&[
            &[4., 3., 0., 0.],
            &[0., 1., 0., 0.],
            &[0., 0., 0., 0.],
            &[0., 0., 0., 0.],
        ]);
        assert_eq!(matpow(&t, 2).unwrap(), expected);
        assert!(matches!(
            matpow(&ComplexMatrix::zeros(2, 3), 2),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn kron_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let a = ComplexMatrix::from_real_rows(&[&[1., 2.], &[3., 4.]]);
        assert_eq!(kron(&a, &ComplexMatrix::zeros(3, 2)), ComplexMatrix::zeros(6, 4));
        let j = ComplexMatrix::from_real_rows(&[&[0., 1.], &[0., 0.]]);
        let jj = kron(&j, &j);
        assert_eq!(&jj * &jj, ComplexMatrix::zeros(4, 4));
        // index convention
        let b = ComplexMatrix::from_real_rows(&[&[5., 6.], &[7., 8.]]);
        let ab = kron(&a, &b);
        assert_eq!(ab[(1, 2)], C64::new(2.0 * 7.0, 0.0));
        assert_eq!(ab[(3, 0)], C64::new(21.0, 0.0));
    }
}
