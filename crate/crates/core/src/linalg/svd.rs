use super::{inner, vec_norm, ComplexMatrix, LinalgError, C64};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M V = U Σ`.
///
/// `v` is a full `n × n` unitary; `left[i]` is the unit left vector for
/// `singular_values[i]` (zero vector when that value is exactly zero).
/// Singular values are sorted in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol · σ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        self.rank_scaled(tol, 0.0)
    }

    /// Rank at threshold `tol · max(σ_max, scale)`; a nonzero `scale` keeps
    /// rounding noise in a nearly vanishing matrix from counting as rank.
    pub fn rank_scaled(&self, tol: f64, scale: f64) -> usize {
        let threshold = tol * self.max_singular_value().max(scale);
        self.singular_values.iter().filter(|&&s| s > threshold).count()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &ComplexMatrix) -> Result<Svd, LinalgError> {
    let n = m.cols();
    let mut w = m.columns();
    let mut v = ComplexMatrix::identity(n).columns();
    // Pairs of columns already at rounding level would otherwise keep
    // rotating noise into noise.
    let floor = f64::EPSILON * f64::EPSILON * m.frobenius_norm().powi(2);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = inner(&w[i], &w[i]).re;
                let beta = inner(&w[j], &w[j]).re;
                let gamma = inner(&w[i], &w[j]);
                let g = gamma.norm();
                if g <= floor || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = gamma.conj() / g;
                rotate_pair(&mut w, i, j, c, s, e);
                rotate_pair(&mut v, i, j, c, s, e);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            algorithm: "one-sided jacobi svd",
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = w.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let singular_values = order.iter().map(|&i| norms[i]).collect();
    let left = order
        .iter()
        .map(|&i| {
            let s = norms[i];
            if s > 0.0 {
                w[i].iter().map(|z| z / s).collect()
            } else {
                vec![C64::new(0.0, 0.0); m.rows()]
            }
        })
        .collect();
    let v_sorted: Vec<Vec<C64>> = order.iter().map(|&i| v[i].clone()).collect();
    Ok(Svd {
        singular_values,
        left,
        v: ComplexMatrix::from_columns(&v_sorted),
    })
}

// x_i <- c x_i - s e x_j,  x_j <- s x_i + c e x_j
fn rotate_pair(cols: &mut [Vec<C64>], i: usize, j: usize, c: f64, s: f64, e: C64) {
    let (lo, hi) = cols.split_at_mut(j);
    let (xi, xj) = (&mut lo[i], &mut hi[0]);
    for (a, b) in xi.iter_mut().zip(xj.iter_mut()) {
        let (ai, bj) = (*a, *b);
        *a = ai * c - bj * e * s;
        *b = ai * s + bj * e * c;
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    Ok(svd(m)?.singular_values)
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    // Jacobi on at most ~256 columns converges well inside the sweep budget;
    // fall back to the Frobenius bound only if it somehow does not.
    svd(m)
        .map(|s| s.max_singular_value())
        .unwrap_or_else(|_| m.frobenius_norm())
}

/// Orthonormal basis of a subspace of `C^ambient_dim`; `None` for `{0}`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub basis: Option<ComplexMatrix>,
}

impl SubspaceBasis {
    pub fn new(ambient_dim: usize, vectors: &[Vec<C64>]) -> Self {
        Self {
            ambient_dim,
            basis: (!vectors.is_empty()).then(|| ComplexMatrix::from_columns(vectors)),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: None,
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Some(ComplexMatrix::identity(ambient_dim)),
        }
    }

    /// Orthonormalises the given spanning vectors (modified Gram-Schmidt with
    /// reorthogonalisation), dropping dependent ones.
    pub fn span(ambient_dim: usize, vectors: &[Vec<C64>], tol: f64) -> Self {
        let mut out: Vec<Vec<C64>> = Vec::new();
        for v in vectors {
            let mut x = v.clone();
            let original = vec_norm(&x);
            for _ in 0..2 {
                for q in &out {
                    let p = inner(q, &x);
                    for (xi, qi) in x.iter_mut().zip(q) {
                        *xi -= p * qi;
                    }
                }
            }
            let nrm = vec_norm(&x);
            if original > 0.0 && nrm > tol * original.max(1.0) {
                out.push(x.iter().map(|z| z / nrm).collect());
            }
        }
        Self::new(ambient_dim, &out)
    }

    pub fn dim(&self) -> usize {
        self.basis.as_ref().map_or(0, ComplexMatrix::cols)
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        self.basis.as_ref().map_or_else(Vec::new, ComplexMatrix::columns)
    }

    /// Orthogonal projector `B B*`.
    pub fn projector(&self) -> ComplexMatrix {
        match &self.basis {
            Some(b) => b * &b.adjoint(),
            None => ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim),
        }
    }

    /// `‖B*B − I‖_F`, zero for the trivial subspace.
    pub fn orthonormality_defect(&self) -> f64 {
        match &self.basis {
            Some(b) => (&(&b.adjoint() * b) - &ComplexMatrix::identity(b.cols())).frobenius_norm(),
            None => 0.0,
        }
    }
}

/// Range, kernel and cokernel (`ker M*`) of a matrix at a relative rank threshold.
#[derive(Clone, Debug)]
pub struct RankSpaces {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub range: SubspaceBasis,
    pub kernel: SubspaceBasis,
    pub cokernel: SubspaceBasis,
}

/// Numerical rank spaces: singular values `≤ tol · σ_max` count as zero.
///
/// The range and cokernel come from the right factor of `M*` so together they
/// form one unitary basis of the codomain.
pub fn svd_rank_spaces(m: &ComplexMatrix, tol: f64) -> Result<RankSpaces, LinalgError> {
    svd_rank_spaces_scaled(m, tol, 0.0)
}

/// [`svd_rank_spaces`] with the rank taken by [`Svd::rank_scaled`].
pub fn svd_rank_spaces_scaled(m: &ComplexMatrix, tol: f64, scale: f64) -> Result<RankSpaces, LinalgError> {
    let forward = svd(m)?;
    let backward = svd(&m.adjoint())?;
    let rank = forward.rank_scaled(tol, scale);
    let right = forward.v.columns();
    let left = backward.v.columns();
    Ok(RankSpaces {
        rank,
        singular_values: forward.singular_values,
        range: SubspaceBasis::new(m.rows(), &left[..rank]),
        kernel: SubspaceBasis::new(m.cols(), &right[rank..]),
        cokernel: SubspaceBasis::new(m.rows(), &left[rank..]),
    })
}

/// Moore-Penrose pseudo-inverse, dropping singular values `≤ tol · σ_max`.
pub fn pinv(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, LinalgError> {
    let d = svd(m)?;
    let rank = d.rank(tol);
    let mut out = ComplexMatrix::zeros(m.cols(), m.rows());
    for k in 0..rank {
        let s = d.singular_values[k];
        let u = &d.left[k];
        for i in 0..m.cols() {
            let vi = d.v[(i, k)] / s;
            for j in 0..m.rows() {
                out[(i, j)] += vi * u[j].conj();
            }
        }
    }
    Ok(out)
}
