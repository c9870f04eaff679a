//! Membership in the k-quasi n-power posinormal hierarchy.
//!
//! `T` is a member at `(k, n, λ)` when the gap matrix
//! `T*ᵏ (λ² T*T − Tⁿ T*ⁿ) Tᵏ` is positive semidefinite. Setting `k = 0`
//! gives the n-power posinormal class, and `k = 0, n = 1` the posinormal one.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, matpow, operator_norm, svd, vec_norm, ComplexMatrix, C64};
use crate::par;
use crate::random;

/// Agreement required between the two algebraic forms of the gap matrix.
pub const GAP_FORM_TOL: f64 = 1e-10;

/// Upper and lower factors of the min-λ bracketing certificate.
pub const CERT_UPPER: f64 = 1.0 + 1e-8;
pub const CERT_LOWER: f64 = 1.0 - 1e-6;

/// Default number of random probe vectors in [`check_norm_inequality`].
pub const DEFAULT_TRIALS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassQuery {
    pub k: u32,
    pub n: u32,
    pub lambda: f64,
}

impl ClassQuery {
    pub fn new(k: u32, n: u32, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQuery("n must be at least 1".into()));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidQuery(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { k, n, lambda })
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.k, self.n, lambda)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub holds: bool,
    pub gap_min_eigenvalue: f64,
    /// Unit vector `x` with `⟨gap x, x⟩ = gap_min_eigenvalue`, present iff `!holds`.
    #[serde(serialize_with = "crate::io::serialize_opt_vector")]
    pub witness: Option<Vec<C64>>,
    pub gap_norm: f64,
}

fn require_square(t: &ComplexMatrix, op: &'static str) -> Result<()> {
    if t.is_square() {
        Ok(())
    } else {
        Err(linalg::LinalgError::NotSquare {
            op,
            rows: t.rows(),
            cols: t.cols(),
        }
        .into())
    }
}

/// `(T^{k+1}, T*ⁿ Tᵏ)`: the gap is `λ² X*X − Y*Y`.
pub fn gram_factors(t: &ComplexMatrix, k: u32, n: u32) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_square(t, "gram_factors")?;
    let tk = matpow(t, k)?;
    let x = t * &tk;
    let y = &matpow(&t.adjoint(), n)? * &tk;
    Ok((x, y))
}

/// The gap matrix `T*ᵏ (λ² T*T − Tⁿ T*ⁿ) Tᵏ`.
///
/// Both the sandwiched form and the Gram form `λ²(T^{k+1})*(T^{k+1}) −
/// (T*ⁿTᵏ)*(T*ⁿTᵏ)` are evaluated; a relative disagreement above
/// [`GAP_FORM_TOL`] is a numerical failure. The Hermitian part of the Gram
/// form is returned.
pub fn gap_matrix(t: &ComplexMatrix, q: &ClassQuery) -> Result<ComplexMatrix> {
    require_square(t, "gap_matrix")?;
    let lam2 = q.lambda * q.lambda;
    let ts = t.adjoint();
    let tk = matpow(t, q.k)?;
    let tn = matpow(t, q.n)?;
    let tsn = tn.adjoint();
    let middle = &(&ts * t).scale_real(lam2) - &(&tn * &tsn);
    let sandwiched = &(&tk.adjoint() * &middle) * &tk;

    let x = t * &tk;
    let y = &tsn * &tk;
    let gram = &(&x.adjoint() * &x).scale_real(lam2) - &(&y.adjoint() * &y);

    // rounding in the sandwiched form scales with the factors, not the result
    let tk_norm = tk.frobenius_norm();
    let scale = (tk_norm * tk_norm * (lam2 * t.frobenius_norm().powi(2) + tn.frobenius_norm().powi(2))).max(1.0);
    let deviation = (&sandwiched - &gram).frobenius_norm() / scale;
    if deviation > GAP_FORM_TOL {
        return Err(Error::InconsistentGap { deviation });
    }
    Ok(gram.hermitian_part())
}

/// Membership verdict.
///
/// The gap is accepted when its least eigenvalue is at least
/// `−tol · max(1, ‖(T*ⁿTᵏ)*(T*ⁿTᵏ)‖, 1e-4 · ‖gap‖)`. A negative direction can
/// only come from the subtracted term, so its size sets the scale; scaling by
/// `‖gap‖` alone would let `λ² T*T` swamp a fixed obstruction as λ grows. The
/// last term covers rounding in the eigensolver.
pub fn is_member(t: &ComplexMatrix, q: &ClassQuery, tol: f64) -> Result<ClassReport> {
    let gap = gap_matrix(t, q)?;
    let (_, y) = gram_factors(t, q.k, q.n)?;
    let sub = operator_norm(&y).powi(2);
    let eig = hermitian_eigen(&gap, tol.max(1e-10))?;
    let gap_norm = eig.spectral_norm();
    let min = eig.min_eigenvalue();
    let holds = min >= -tol * sub.max(1.0).max(1e-4 * gap_norm);
    Ok(ClassReport {
        holds,
        gap_min_eigenvalue: min,
        witness: (!holds).then(|| eig.eigenvector(0)),
        gap_norm,
    })
}

/// `λ² T*T − TT* ⪰ 0`.
pub fn is_posinormal(t: &ComplexMatrix, lambda: f64, tol: f64) -> Result<ClassReport> {
    is_member(t, &ClassQuery::new(0, 1, lambda)?, tol)
}

/// `λ² T*T − Tⁿ T*ⁿ ⪰ 0`, i.e. the `k = 0` member test.
pub fn is_n_power_posinormal(t: &ComplexMatrix, n: u32, lambda: f64, tol: f64) -> Result<ClassReport> {
    is_member(t, &ClassQuery::new(0, n, lambda)?, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaResult {
    pub feasible: bool,
    pub lambda_min: Option<f64>,
    /// Unit `x` with `T^{k+1}x ≈ 0` but `T*ⁿTᵏx ≉ 0`; present iff infeasible.
    #[serde(serialize_with = "crate::io::serialize_opt_vector")]
    pub kernel_obstruction: Option<Vec<C64>>,
}

/// Smallest λ for which `T` is a member at `(k, n, λ)`.
///
/// With `X = T^{k+1}` and `Y = T*ⁿTᵏ` the question is the pencil
/// `λ² X*X ⪰ Y*Y`. It is feasible iff the numerical kernel of `X` is
/// annihilated by `Y`; then `λ_min = ‖Y V_r Σ_r⁻¹‖` where `V_r, Σ_r` are the
/// dominant right singular pairs of `X`. That norm is the square root of the
/// largest eigenvalue of the pencil compressed to the range of `X*X`.
///
/// Singular values of `X` at or below `tol · σ_max` count as zero. A kernel
/// vector is an obstruction when `‖Yx‖ > √tol · ‖Y‖`, which sits between the
/// rounding floor and any genuine violation.
pub fn min_lambda(t: &ComplexMatrix, k: u32, n: u32, tol: f64) -> Result<LambdaResult> {
    if n == 0 {
        return Err(Error::InvalidQuery("n must be at least 1".into()));
    }
    let (x, y) = gram_factors(t, k, n)?;
    let dim = t.rows();
    let xs = svd(&x)?;
    // Powers of a nilpotent part come out as rounding noise; measure them
    // against the matching power of ‖T‖ rather than against themselves.
    let t_norm = operator_norm(t);
    let rank = xs.rank_scaled(tol, t_norm.powi(k as i32 + 1));
    let y_norm = operator_norm(&y);
    let y_norm = if y_norm <= tol * t_norm.powi((k + n) as i32) { 0.0 } else { y_norm };

    if rank < dim && y_norm > 0.0 {
        let kernel = xs.v.select(&(0..dim).collect::<Vec<_>>(), &(rank..dim).collect::<Vec<_>>());
        let yk = &y * &kernel;
        let ys = svd(&yk)?;
        if ys.max_singular_value() > tol.sqrt() * y_norm {
            let direction = kernel.matvec(&ys.v.column(0));
            let nrm = vec_norm(&direction);
            return Ok(LambdaResult {
                feasible: false,
                lambda_min: None,
                kernel_obstruction: Some(direction.into_iter().map(|z| z / nrm).collect()),
            });
        }
    }
    if rank == 0 || y_norm == 0.0 {
        return Ok(LambdaResult {
            feasible: true,
            lambda_min: Some(0.0),
            kernel_obstruction: None,
        });
    }
    let cols: Vec<usize> = (0..rank).collect();
    let mut compressed = xs.v.select(&(0..dim).collect::<Vec<_>>(), &cols);
    for j in 0..rank {
        let inv = 1.0 / xs.singular_values[j];
        for i in 0..dim {
            compressed[(i, j)] *= inv;
        }
    }
    let lambda = operator_norm(&(&y * &compressed));
    Ok(LambdaResult {
        feasible: true,
        lambda_min: Some(lambda),
        kernel_obstruction: None,
    })
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Certificate {
    /// Membership at `λ_min · (1 + 1e-8)`.
    pub upper_holds: bool,
    /// Non-membership at `λ_min · (1 − 1e-6)`.
    pub lower_fails: bool,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.upper_holds && self.lower_fails
    }
}

/// Bracketing check for a feasible result with `λ_min > 0`; `None` otherwise.
pub fn certify_min_lambda(
    t: &ComplexMatrix,
    k: u32,
    n: u32,
    result: &LambdaResult,
    tol: f64,
) -> Result<Option<Certificate>> {
    let lam = match result.lambda_min {
        Some(l) if result.feasible && l > 0.0 => l,
        _ => return Ok(None),
    };
    let upper = is_member(t, &ClassQuery::new(k, n, lam * CERT_UPPER)?, tol)?;
    let lower = is_member(t, &ClassQuery::new(k, n, lam * CERT_LOWER)?, tol)?;
    Ok(Some(Certificate {
        upper_holds: upper.holds,
        lower_fails: !lower.holds,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct NormInequalityReport {
    pub holds: bool,
    pub gap_psd: bool,
    pub vectors_hold: bool,
    pub trials: usize,
    /// Largest `‖T*ⁿTᵐx‖ − λ‖T^{m+1}x‖` over the probes.
    pub max_excess: f64,
}

/// Both forms of `‖T*ⁿTᵐx‖ ≤ λ‖T^{m+1}x‖` for `m ≥ k`: the PSD test of the
/// m-gap and `trials` random unit probes drawn from `rng`.
pub fn check_norm_inequality<R: Rng + ?Sized>(
    t: &ComplexMatrix,
    q: &ClassQuery,
    m: u32,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<NormInequalityReport> {
    if m < q.k {
        return Err(Error::InvalidQuery(format!("m = {m} must be at least k = {}", q.k)));
    }
    if trials == 0 {
        return Err(Error::InvalidQuery("trials must be at least 1".into()));
    }
    let gap = is_member(t, &ClassQuery::new(m, q.n, q.lambda)?, tol)?;
    let (x, y) = gram_factors(t, m, q.n)?;
    let mut max_excess = f64::NEG_INFINITY;
    let mut vectors_hold = true;
    for _ in 0..trials {
        let v = random::unit_vector(rng, t.rows());
        let lhs = vec_norm(&y.matvec(&v));
        let rhs = q.lambda * vec_norm(&x.matvec(&v));
        let excess = lhs - rhs;
        max_excess = max_excess.max(excess);
        if excess > tol * lhs.max(1.0) {
            vectors_hold = false;
        }
    }
    Ok(NormInequalityReport {
        holds: gap.holds && vectors_hold,
        gap_psd: gap.holds,
        vectors_hold,
        trials,
        max_excess,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBoundReport {
    pub m: u32,
    /// `‖T*ⁿTᵐ‖`
    pub lhs: f64,
    /// `λ‖T^{m+1}‖`, the asserted bound.
    pub rhs: f64,
    /// `λ²‖T^{m+1}‖`, evaluated for reference only.
    pub rhs_squared_lambda: f64,
    pub holds: bool,
    pub squared_variant_holds: bool,
}

/// Operator-norm form of the norm inequality for a member at `q` and `m ≥ k`.
pub fn operator_norm_corollary_check(
    t: &ComplexMatrix,
    q: &ClassQuery,
    m: u32,
    tol: f64,
) -> Result<NormBoundReport> {
    if m < q.k {
        return Err(Error::InvalidQuery(format!("m = {m} must be at least k = {}", q.k)));
    }
    let member = is_member(t, q, tol)?;
    if !member.holds {
        return Err(Error::NotMember {
            min_eigenvalue: member.gap_min_eigenvalue,
        });
    }
    let (x, y) = gram_factors(t, m, q.n)?;
    let lhs = operator_norm(&y);
    let xn = operator_norm(&x);
    let rhs = q.lambda * xn;
    let rhs_squared_lambda = q.lambda * q.lambda * xn;
    let slack = 1e-9 * lhs.max(1.0);
    Ok(NormBoundReport {
        m,
        lhs,
        rhs,
        rhs_squared_lambda,
        holds: lhs <= rhs + slack,
        squared_variant_holds: lhs <= rhs_squared_lambda + slack,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollapseVerdict {
    Holds,
    Violated,
    /// `k < n`: the collapse argument does not apply; only measured.
    ReportOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub k: u32,
    pub n: u32,
    /// `‖Tᵏ‖`
    pub power_norm: f64,
    pub bound: f64,
    pub verdict: CollapseVerdict,
}

/// For a member with `T^{k+1} = 0` and `k ≥ n`, checks that already `Tᵏ = 0`.
pub fn nilpotency_collapse_check(t: &ComplexMatrix, k: u32, n: u32, tol: f64) -> Result<CollapseReport> {
    require_square(t, "nilpotency_collapse_check")?;
    let t_norm = operator_norm(t);
    let next = operator_norm(&matpow(t, k + 1)?);
    let allowed = tol * t_norm.max(1.0).powi(k as i32 + 1);
    if next > allowed {
        return Err(Error::Precondition {
            check: "T^(k+1) = 0",
            measured: next,
            bound: allowed,
        });
    }
    if !min_lambda(t, k, n, tol)?.feasible {
        return Err(Error::Infeasible);
    }
    let power_norm = operator_norm(&matpow(t, k)?);
    let bound = tol * t_norm.powi(k as i32);
    let verdict = if k < n {
        CollapseVerdict::ReportOnly
    } else if power_norm <= bound {
        CollapseVerdict::Holds
    } else {
        CollapseVerdict::Violated
    };
    Ok(CollapseReport {
        k,
        n,
        power_norm,
        bound,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GridEntry {
    pub k: u32,
    pub n: u32,
    pub result: LambdaResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaGrid {
    pub k_max: u32,
    pub n_max: u32,
    /// Row-major in `k`, then `n`.
    pub entries: Vec<GridEntry>,
}

impl LambdaGrid {
    pub fn get(&self, k: u32, n: u32) -> Option<&LambdaResult> {
        if k > self.k_max || n == 0 || n > self.n_max {
            return None;
        }
        let idx = (k * self.n_max + (n - 1)) as usize;
        Some(&self.entries[idx].result)
    }

    /// `(k, n)` cells where feasibility or `λ_min` fails to be monotone in `k`.
    pub fn monotonicity_violations(&self) -> Vec<(u32, u32)> {
        let mut bad = Vec::new();
        for k in 0..self.k_max {
            for n in 1..=self.n_max {
                let (here, next) = (self.get(k, n).unwrap(), self.get(k + 1, n).unwrap());
                if !here.feasible {
                    continue;
                }
                let ok = match (here.lambda_min, next.lambda_min) {
                    (Some(a), Some(b)) if next.feasible => b <= a + 1e-8 * a.max(1.0),
                    _ => false,
                };
                if !ok {
                    bad.push((k, n));
                }
            }
        }
        bad
    }
}

/// `min_lambda` over `0 ≤ k ≤ k_max`, `1 ≤ n ≤ n_max`, cells evaluated in parallel.
pub fn classify_grid(t: &ComplexMatrix, k_max: u32, n_max: u32, tol: f64) -> Result<LambdaGrid> {
    classify_grid_with(par::ExecMode::Parallel, t, k_max, n_max, tol)
}

pub fn classify_grid_with(
    mode: par::ExecMode,
    t: &ComplexMatrix,
    k_max: u32,
    n_max: u32,
    tol: f64,
) -> Result<LambdaGrid> {
    require_square(t, "classify_grid")?;
    if n_max == 0 {
        return Err(Error::InvalidQuery("n_max must be at least 1".into()));
    }
    let cells: Vec<(u32, u32)> = (0..=k_max)
        .flat_map(|k| (1..=n_max).map(move |n| (k, n)))
        .collect();
    let results = par::map_with(mode, &cells, |&(k, n)| min_lambda(t, k, n, tol));
    let entries = cells
        .into_iter()
        .zip(results)
        .map(|((k, n), r)| r.map(|result| GridEntry { k, n, result }))
        .collect::<Result<Vec<_>>>()?;
    Ok(LambdaGrid { k_max, n_max, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::DEFAULT_PSD_TOL as TOL;

    fn q(k: u32, n: u32, lambda: f64) -> ClassQuery {
        ClassQuery::new(k, n, lambda).unwrap()
    }

    #[test]
    fn query_validation() {
        assert!(ClassQuery::new(0, 0, 1.0).is_err());
        assert!(ClassQuery::new(0, 1, 0.0).is_err());
        assert!(ClassQuery::new(0, 1, f64::NAN).is_err());
    }

    #[test]
    fn gap_examples() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(gap_matrix(&id, &q(1, 1, 1.0)).unwrap(), ComplexMatrix::zeros(3, 3));

        let a = fixtures::shift3();
        for lam in [0.5, 1.0, 7.0] {
            assert_eq!(gap_matrix(&a, &q(3, 2, lam)).unwrap(), ComplexMatrix::zeros(3, 3));
            let l2 = lam * lam;
            let expected = ComplexMatrix::real_diag(&[-1.0, l2, l2]);
            assert!((&gap_matrix(&a, &q(0, 2, lam)).unwrap() - &expected).max_abs() < 1e-15);
        }
        assert!(gap_matrix(&ComplexMatrix::zeros(2, 3), &q(0, 1, 1.0)).is_err());
    }

    #[test]
    fn membership_examples() {
        let a = fixtures::shift3();
        let r = is_member(&a, &q(3, 2, 1.0), TOL).unwrap();
        assert!(r.holds && r.witness.is_none() && r.gap_norm == 0.0);

        let r = is_member(&a, &q(0, 2, 1e6), TOL).unwrap();
        assert!(!r.holds);
        assert_eq!(r.gap_min_eigenvalue, -1.0);
        let w = r.witness.unwrap();
        assert!((w[0].norm() - 1.0).abs() < 1e-14);

        let mut rng = random::rng(3);
        let u = random::unitary(&mut rng, 4);
        for (k, n) in [(0, 1), (1, 3), (2, 2)] {
            let r = is_member(&u, &q(k, n, 1.0), TOL).unwrap();
            assert!(r.holds);
            assert!(r.gap_norm < 1e-13);
        }
    }

    #[test]
    fn posinormal_examples() {
        let h = 0.5f64.sqrt();
        let normal = ComplexMatrix::from_real_rows(&[&[h, h], &[-h, h]]);
        assert!(is_posinormal(&normal, 1.0, TOL).unwrap().holds);

        // λ²T*T − TT* = diag(0,1) − diag(1,0)
        let j = ComplexMatrix::from_real_rows(&[&[0., 1.], &[0., 0.]]);
        let r = is_posinormal(&j, 1.0, TOL).unwrap();
        assert!(!r.holds);
        assert_eq!(r.gap_min_eigenvalue, -1.0);

        let d = ComplexMatrix::real_diag(&[2.0, 1.0]);
        for lam in [1.0, 1.5, 10.0] {
            assert!(is_posinormal(&d, lam, TOL).unwrap().holds);
        }
    }

    #[test]
    fn n_power_examples() {
        let a = fixtures::shift3();
        for lam in [1.0, 1e3, 1e6] {
            assert!(!is_n_power_posinormal(&a, 2, lam, TOL).unwrap().holds);
        }
        assert!(is_n_power_posinormal(&ComplexMatrix::identity(3), 5, 1.0, TOL).unwrap().holds);
        let trunc = fixtures::truncated_shift(6);
        assert!(!is_n_power_posinormal(&trunc, 2, 1.0, TOL).unwrap().holds);
    }

    #[test]
    fn min_lambda_examples() {
        let r = min_lambda(&ComplexMatrix::identity(3), 0, 1, TOL).unwrap();
        assert!((r.lambda_min.unwrap() - 1.0).abs() < 1e-14);

        let r = min_lambda(&fixtures::shift3(), 0, 2, TOL).unwrap();
        assert!(!r.feasible && r.lambda_min.is_none());
        let x = r.kernel_obstruction.unwrap();
        assert!((x[0].norm() - 1.0).abs() < 1e-12);

        // closed form from det(gap(λ)) = 16λ⁴ − 168λ² + 64 = 0
        let expected = ((21.0 + 377f64.sqrt()) / 4.0).sqrt();
        let t = fixtures::restriction_example();
        let r = min_lambda(&t, 1, 2, TOL).unwrap();
        assert!((r.lambda_min.unwrap() - expected).abs() < 1e-12 * expected);
        let cert = certify_min_lambda(&t, 1, 2, &r, TOL).unwrap().unwrap();
        assert!(cert.passed());
    }

    #[test]
    fn norm_inequality_examples() {
        let mut rng = random::rng(11);
        let a = fixtures::shift3();
        for m in [3, 4, 5] {
            let r = check_norm_inequality(&a, &q(3, 2, 1.0), m, DEFAULT_TRIALS, TOL, &mut rng).unwrap();
            assert!(r.holds, "m = {m}");
        }
        let d = ComplexMatrix::real_diag(&[2.0, 1.0]);
        let r = check_norm_inequality(&d, &q(1, 2, 2.0), 1, 16, TOL, &mut rng).unwrap();
        assert!(r.holds);
        assert!(check_norm_inequality(&d, &q(2, 2, 2.0), 1, 16, TOL, &mut rng).is_err());
    }

    #[test]
    fn corollary_examples() {
        let id = ComplexMatrix::identity(3);
        for m in 0..4 {
            let r = operator_norm_corollary_check(&id, &q(0, 2, 1.0), m, TOL).unwrap();
            assert!(r.holds && (r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 1.0).abs() < 1e-14);
        }
        let a = fixtures::shift3();
        let r = operator_norm_corollary_check(&a, &q(3, 2, 1.0), 3, TOL).unwrap();
        assert!(r.holds && r.lhs == 0.0 && r.rhs == 0.0);
        assert!(matches!(
            operator_norm_corollary_check(&a, &q(0, 2, 1.0), 0, TOL),
            Err(Error::NotMember { .. })
        ));
    }

    #[test]
    fn collapse_examples() {
        let z = ComplexMatrix::zeros(3, 3);
        for (k, n) in [(1, 1), (2, 1), (1, 3)] {
            let r = nilpotency_collapse_check(&z, k, n, TOL).unwrap();
            assert_ne!(r.verdict, CollapseVerdict::Violated);
        }
        let j3 = fixtures::shift3();
        let r = nilpotency_collapse_check(&j3, 3, 2, TOL).unwrap();
        assert_eq!(r.verdict, CollapseVerdict::Holds);
        assert_eq!(r.power_norm, 0.0);
        let r = nilpotency_collapse_check(&j3, 2, 3, TOL).unwrap();
        assert_eq!(r.verdict, CollapseVerdict::ReportOnly);
        assert!((r.power_norm - 1.0).abs() < 1e-14);
        assert!(matches!(
            nilpotency_collapse_check(&j3, 1, 1, TOL),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn grid_examples() {
        let g = classify_grid(&ComplexMatrix::identity(3), 2, 2, TOL).unwrap();
        assert!(g.entries.iter().all(|e| (e.result.lambda_min.unwrap() - 1.0).abs() < 1e-14));
        assert!(g.monotonicity_violations().is_empty());

        let g = classify_grid(&fixtures::shift3(), 3, 2, TOL).unwrap();
        assert!(!g.get(0, 2).unwrap().feasible);
        let top = g.get(3, 2).unwrap();
        assert!(top.feasible && top.lambda_min == Some(0.0));
        assert!(g.monotonicity_violations().is_empty());

        // diagonal closed form: λ_min(0, n) = max dᵢ^{n−1}
        let g = classify_grid(&ComplexMatrix::real_diag(&[2.0, 1.0]), 2, 2, TOL).unwrap();
        assert!(g.entries.iter().all(|e| e.result.feasible));
        assert!((g.get(0, 1).unwrap().lambda_min.unwrap() - 1.0).abs() < 1e-14);
        assert!((g.get(0, 2).unwrap().lambda_min.unwrap() - 2.0).abs() < 1e-14);
    }
}
