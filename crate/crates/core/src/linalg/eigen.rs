use super::{ComplexMatrix, LinalgError, C64};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `H = V diag(λ) V*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Largest absolute eigenvalue, i.e. the spectral norm of `H`.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// `V f(Λ) V*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * vals[k] * v[(j, k)].conj()).sum()
        })
    }
}

/// Cyclic Jacobi on a complex Hermitian matrix.
///
/// `H` must be Hermitian within `tol · max(1, ‖H‖_F)`; the Hermitian part is
/// diagonalised.
pub fn hermitian_eigen(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            op: "hermitian_eigen",
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let asymmetry = (h - &h.adjoint()).frobenius_norm();
    let bound = tol * h.frobenius_norm().max(1.0);
    if asymmetry > bound {
        return Err(LinalgError::NotHermitian { asymmetry, bound });
    }

    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off_norm(&a) > 1e-3 * f64::EPSILON * scale && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    // rounding can stall the last few ulps; accept anything at working precision
    if off_norm(&a) > 1e-13 * scale {
        return Err(LinalgError::NoConvergence {
            algorithm: "hermitian jacobi",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let r = h.norm();
    if r == 0.0 || r < f64::MIN_POSITIVE {
        return;
    }
    let phase = h / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    let n = a.rows();

    // columns: A <- A G, with G = [[c, s], [-s e, c e]] in the (p, q) plane
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e * s;
        a[(k, q)] = akp * s + akq * e * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * e * s;
        v[(k, q)] = vkp * s + vkq * e * c;
    }
    // rows: A <- G* A
    let ec = e.conj();
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * ec * s;
        a[(q, k)] = apk * s + aqk * ec * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Outcome of a PSD test.
#[derive(Clone, Debug)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Spectral norm of the tested matrix.
    pub norm: f64,
    /// Unit eigenvector of the minimal eigenvalue when the test fails.
    pub witness: Option<Vec<C64>>,
}

/// `H ⪰ 0` iff `λ_min(H) ≥ −tol · max(1, ‖H‖)`.
pub fn is_psd(h: &ComplexMatrix, tol: f64) -> Result<PsdVerdict, LinalgError> {
    let eig = hermitian_eigen(h, tol.max(1e-10))?;
    let norm = eig.spectral_norm();
    let min_eigenvalue = eig.min_eigenvalue();
    let psd = min_eigenvalue >= -tol * norm.max(1.0);
    Ok(PsdVerdict {
        psd,
        min_eigenvalue,
        norm,
        witness: (!psd).then(|| eig.eigenvector(0)),
    })
}
