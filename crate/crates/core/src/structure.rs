//! Structural properties of the class: the block decomposition along
//! `closure(Tᵏℋ) ⊕ ker T*ᵏ`, and closure under restriction, commuting
//! isometries, unitary equivalence, dense-range upgrade and tensor products.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    distinct_values, hausdorff_distance, hermitian_eigen, matpow, operator_norm, spectrum, svd_rank_spaces_scaled,
    ComplexMatrix, SubspaceBasis, C64,
};
use crate::posinormal::{self, ClassQuery, ClassReport};

/// `Q = [range | kernel]` and the blocks of `Q*TQ = [[A, B], [0, C]]`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub k: u32,
    pub range_basis: SubspaceBasis,
    pub kernel_basis: SubspaceBasis,
    pub block_a: Option<ComplexMatrix>,
    pub block_b: Option<ComplexMatrix>,
    pub block_c: Option<ComplexMatrix>,
    /// `‖K* T R‖`
    pub residual_lower_left: f64,
    /// `‖Cᵏ‖`, zero when the kernel part is trivial.
    pub nilpotency_residual: f64,
    /// `Tᵏ` has full numerical rank, so the kernel part is empty.
    pub degenerate: bool,
}

impl Decomposition {
    pub fn unitary(&self) -> ComplexMatrix {
        match (&self.range_basis.basis, &self.kernel_basis.basis) {
            (Some(r), Some(k)) => r.hstack(k),
            (Some(r), None) => r.clone(),
            (None, Some(k)) => k.clone(),
            (None, None) => unreachable!("a nonempty space has a nonempty basis"),
        }
    }

    pub fn range_dim(&self) -> usize {
        self.range_basis.dim()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.dim()
    }

    /// `Q [[A, B], [0, C]] Q*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let q = self.unitary();
        let n = q.rows();
        let r = self.range_dim();
        let mut m = ComplexMatrix::zeros(n, n);
        let mut place = |block: &Option<ComplexMatrix>, row0: usize, col0: usize| {
            if let Some(b) = block {
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        m[(row0 + i, col0 + j)] = b[(i, j)];
                    }
                }
            }
        };
        place(&self.block_a, 0, 0);
        place(&self.block_b, 0, r);
        place(&self.block_c, r, r);
        &(&q * &m) * &q.adjoint()
    }
}

/// Splits `ℋ = closure(Tᵏℋ) ⊕ ker T*ᵏ` using the SVD of `Tᵏ` at relative rank
/// threshold `tol`.
pub fn decompose(t: &ComplexMatrix, k: u32, tol: f64) -> Result<Decomposition> {
    if !t.is_square() {
        return Err(crate::linalg::LinalgError::NotSquare {
            op: "decompose",
            rows: t.rows(),
            cols: t.cols(),
        }
        .into());
    }
    let n = t.rows();
    let tk = matpow(t, k)?;
    let spaces = svd_rank_spaces_scaled(&tk, tol, operator_norm(t).powi(k as i32))?;
    let r = spaces.rank;
    let range_basis = spaces.range;
    let kernel_basis = spaces.cokernel;
    let q = match (&range_basis.basis, &kernel_basis.basis) {
        (Some(a), Some(b)) => a.hstack(b),
        (Some(a), None) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => unreachable!(),
    };
    let m = &(&q.adjoint() * t) * &q;
    let idx = |a: usize, b: usize| (a..b).collect::<Vec<_>>();
    let block = |rows: (usize, usize), cols: (usize, usize)| {
        (rows.0 < rows.1 && cols.0 < cols.1).then(|| m.select(&idx(rows.0, rows.1), &idx(cols.0, cols.1)))
    };
    let block_a = block((0, r), (0, r));
    let block_b = block((0, r), (r, n));
    let block_c = block((r, n), (r, n));
    let residual_lower_left = block((r, n), (0, r)).map_or(0.0, |b| operator_norm(&b));
    let nilpotency_residual = match &block_c {
        Some(c) => operator_norm(&matpow(c, k)?),
        None => 0.0,
    };
    Ok(Decomposition {
        k,
        range_basis,
        kernel_basis,
        block_a,
        block_b,
        block_c,
        residual_lower_left,
        nilpotency_residual,
        degenerate: r == n,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheck {
    pub range_dim: usize,
    pub kernel_dim: usize,
    pub degenerate: bool,
    pub unitary_defect: f64,
    pub reconstruction_residual: f64,
    pub residual_lower_left: f64,
    pub nilpotency_residual: f64,
    /// Membership of `T` at the query, when one was given.
    pub member: Option<bool>,
    /// k = 0 membership of `A` at the same λ, when `T` is a member.
    pub block_a_member: Option<bool>,
    #[serde(serialize_with = "ser_values")]
    pub spectrum_t: Vec<C64>,
    #[serde(serialize_with = "ser_values")]
    pub spectrum_a: Vec<C64>,
    /// Hausdorff distance between the distinct values of `σ(T)` and `σ(A) ∪ {0}`.
    pub spectrum_union_distance: f64,
    pub passed: bool,
}

fn ser_values<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::io::serialize_vector(v, s)
}

/// Residual bounds for [`check_decomposition`].
pub const DECOMPOSITION_TOL: f64 = 1e-8;
pub const SPECTRUM_UNION_TOL: f64 = 1e-6;

/// Checks the invariants of a decomposition: `Q` unitary, reconstruction,
/// zero lower-left block, `Cᵏ = 0`, the distinct-value identity
/// `σ(T) = σ(A) ∪ {0}`, and `A` passing the k = 0 test when `T` is a member.
pub fn check_decomposition(
    t: &ComplexMatrix,
    d: &Decomposition,
    query: Option<&ClassQuery>,
    tol: f64,
) -> Result<DecompositionCheck> {
    let scale = operator_norm(t).max(1.0);
    let q = d.unitary();
    let unitary_defect = (&(&q.adjoint() * &q) - &ComplexMatrix::identity(q.cols())).frobenius_norm();
    let reconstruction_residual = operator_norm(&(&d.reconstruct() - t));

    let member = match query {
        Some(q) => Some(posinormal::is_member(t, q, tol)?.holds),
        None => None,
    };
    let block_a_member = match (query, member, &d.block_a) {
        (Some(q), Some(true), Some(a)) => Some(posinormal::is_n_power_posinormal(a, q.n, q.lambda, tol)?.holds),
        _ => None,
    };

    let spectrum_t = spectrum(t, 0.0)?;
    let spectrum_a = match &d.block_a {
        Some(a) => spectrum(a, 0.0)?,
        None => Vec::new(),
    };
    // defective zero eigenvalues scatter like eps^(1/m); their centroid does not
    let merge = 1e-3 * scale;
    let distinct_t = distinct_values(&spectrum_t, merge);
    let mut union = spectrum_a.clone();
    if d.kernel_dim() > 0 {
        union.push(C64::new(0.0, 0.0));
    }
    let distinct_union = distinct_values(&union, merge);
    let spectrum_union_distance = hausdorff_distance(&distinct_t, &distinct_union);

    let bound = DECOMPOSITION_TOL * scale;
    let passed = unitary_defect <= 1e-9
        && reconstruction_residual <= bound
        && d.residual_lower_left <= bound
        && d.nilpotency_residual <= DECOMPOSITION_TOL * scale.powi(d.k as i32)
        && block_a_member.unwrap_or(true)
        && spectrum_union_distance <= SPECTRUM_UNION_TOL;
    Ok(DecompositionCheck {
        range_dim: d.range_dim(),
        kernel_dim: d.kernel_dim(),
        degenerate: d.degenerate,
        unitary_defect,
        reconstruction_residual,
        residual_lower_left: d.residual_lower_left,
        nilpotency_residual: d.nilpotency_residual,
        member,
        block_a_member,
        spectrum_t,
        spectrum_a,
        spectrum_union_distance,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Restriction {
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub matrix: ComplexMatrix,
    pub invariance_residual: f64,
    pub parent: ClassReport,
    pub report: ClassReport,
}

/// Compression `A = M*TM` to an invariant subspace and its membership at the
/// same query. Invariance requires `‖(I − MM*)TM‖ ≤ tol · ‖T‖`.
pub fn restrict_to_invariant(
    t: &ComplexMatrix,
    m: &SubspaceBasis,
    q: &ClassQuery,
    tol: f64,
) -> Result<Restriction> {
    let basis = m
        .basis
        .as_ref()
        .ok_or_else(|| Error::invalid("subspace", "the zero subspace has no restriction"))?;
    if basis.rows() != t.rows() {
        return Err(Error::invalid(
            "subspace",
            format!("ambient dimension {} does not match operator size {}", basis.rows(), t.rows()),
        ));
    }
    let tm = t * basis;
    let a = &basis.adjoint() * &tm;
    let invariance_residual = operator_norm(&(&tm - &(basis * &a)));
    let bound = tol * operator_norm(t).max(f64::MIN_POSITIVE);
    if invariance_residual > bound {
        return Err(Error::NotInvariant {
            residual: invariance_residual,
            bound,
        });
    }
    Ok(Restriction {
        parent: posinormal::is_member(t, q, tol)?,
        report: posinormal::is_member(&a, q, tol)?,
        matrix: a,
        invariance_residual,
    })
}

fn require_member(t: &ComplexMatrix, q: &ClassQuery, tol: f64) -> Result<ClassReport> {
    let r = posinormal::is_member(t, q, tol)?;
    if r.holds {
        Ok(r)
    } else {
        Err(Error::NotMember {
            min_eigenvalue: r.gap_min_eigenvalue,
        })
    }
}

fn identity_defect(m: &ComplexMatrix) -> f64 {
    operator_norm(&(m - &ComplexMatrix::identity(m.rows())))
}

/// Membership of `TS` for a member `T` and an isometry `S` commuting with it.
pub fn isometry_product_check(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    q: &ClassQuery,
    tol: f64,
) -> Result<ClassReport> {
    if s.shape() != t.shape() {
        return Err(Error::invalid("S", "must have the shape of T"));
    }
    let iso = identity_defect(&(&s.adjoint() * s));
    if iso > tol {
        return Err(Error::Precondition {
            check: "S*S = I",
            measured: iso,
            bound: tol,
        });
    }
    let commutator = operator_norm(&(&(t * s) - &(s * t)));
    let bound = tol * operator_norm(t) * operator_norm(s);
    if commutator > bound {
        return Err(Error::Precondition {
            check: "TS = ST",
            measured: commutator,
            bound,
        });
    }
    require_member(t, q, tol)?;
    posinormal::is_member(&(t * s), q, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugationReport {
    pub original: ClassReport,
    pub report: ClassReport,
    pub verdicts_agree: bool,
    /// Largest eigenvalue difference of the two gaps over `max(1, ‖gap‖)`.
    pub gap_spectrum_deviation: f64,
}

/// Membership of `U*TU` for unitary `U`, compared with that of `T`.
pub fn unitary_conjugate_check(
    t: &ComplexMatrix,
    u: &ComplexMatrix,
    q: &ClassQuery,
    tol: f64,
) -> Result<ConjugationReport> {
    if u.shape() != t.shape() {
        return Err(Error::invalid("U", "must have the shape of T"));
    }
    let defect = identity_defect(&(&u.adjoint() * u)).max(identity_defect(&(u * &u.adjoint())));
    if defect > tol {
        return Err(Error::Precondition {
            check: "U*U = UU* = I",
            measured: defect,
            bound: tol,
        });
    }
    let conj = &(&u.adjoint() * t) * u;
    let original = posinormal::is_member(t, q, tol)?;
    let report = posinormal::is_member(&conj, q, tol)?;
    let eig_tol = tol.max(1e-10);
    let a = hermitian_eigen(&posinormal::gap_matrix(t, q)?, eig_tol)?;
    let b = hermitian_eigen(&posinormal::gap_matrix(&conj, q)?, eig_tol)?;
    let scale = a.spectral_norm().max(1.0);
    let gap_spectrum_deviation = a
        .eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale;
    Ok(ConjugationReport {
        verdicts_agree: original.holds == report.holds,
        original,
        report,
        gap_spectrum_deviation,
    })
}

/// For a member whose `Tᵏ` has full numerical rank, the k = 0 test at the same λ.
pub fn dense_range_upgrade(t: &ComplexMatrix, q: &ClassQuery, tol: f64) -> Result<ClassReport> {
    let scale = operator_norm(t).powi(q.k as i32);
    let rank = svd_rank_spaces_scaled(&matpow(t, q.k)?, tol, scale)?.rank;
    if rank < t.rows() {
        return Err(Error::RankDeficient { rank, dim: t.rows() });
    }
    require_member(t, q, tol)?;
    posinormal::is_n_power_posinormal(t, q.n, q.lambda, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorReport {
    pub lambda: f64,
    pub report: ClassReport,
}

/// Membership of `T ⊗ S` at `(k, n, λμ)` for members `T` at `(k, n, λ)` and
/// `S` at `(k, n, μ)`.
pub fn tensor_check(
    t: &ComplexMatrix,
    s: &ComplexMatrix,
    qt: &ClassQuery,
    qs: &ClassQuery,
    tol: f64,
) -> Result<TensorReport> {
    if (qt.k, qt.n) != (qs.k, qs.n) {
        return Err(Error::InvalidQuery(format!(
            "queries must share (k, n): ({}, {}) vs ({}, {})",
            qt.k, qt.n, qs.k, qs.n
        )));
    }
    require_member(t, qt, tol)?;
    require_member(s, qs, tol)?;
    let lambda = qt.lambda * qs.lambda;
    let q = qt.with_lambda(lambda)?;
    Ok(TensorReport {
        lambda,
        report: posinormal::is_member(&t.kron(s), &q, tol)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random;

    const TOL: f64 = 1e-10;

    fn q(k: u32, n: u32, lambda: f64) -> ClassQuery {
        ClassQuery::new(k, n, lambda).unwrap()
    }

    #[test]
    fn decomposition_of_worked_example() {
        let t = fixtures::decomposition_example();
        let d = decompose(&t, 1, TOL).unwrap();
        assert_eq!((d.range_dim(), d.kernel_dim()), (3, 1));
        assert!(!d.degenerate);
        let lam = posinormal::min_lambda(&t, 1, 2, TOL).unwrap().lambda_min.unwrap();
        let c = check_decomposition(&t, &d, Some(&q(1, 2, lam * 1.001)), TOL).unwrap();
        assert!(c.passed, "{c:?}");
        assert_eq!(c.block_a_member, Some(true));
        let distinct_a = distinct_values(&c.spectrum_a, 1e-6);
        let want = [C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(hausdorff_distance(&distinct_a, &want) < 1e-10);
    }

    #[test]
    fn decomposition_edge_cases() {
        let j = fixtures::shift3();
        let d = decompose(&j, 3, TOL).unwrap();
        assert_eq!(d.range_dim(), 0);
        assert!(d.block_a.is_none());
        assert!((&d.reconstruct() - &j).max_abs() < 1e-14);
        assert_eq!(d.nilpotency_residual, 0.0);
        assert!(check_decomposition(&j, &d, None, TOL).unwrap().passed);

        let mut rng = random::rng(8);
        let u = random::unitary(&mut rng, 4);
        let d = decompose(&u, 1, TOL).unwrap();
        assert!(d.degenerate && d.block_c.is_none());
        let c = check_decomposition(&u, &d, Some(&q(1, 1, 1.0)), TOL).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn restriction_examples() {
        let d = ComplexMatrix::real_diag(&[2.0, 1.0, 3.0]);
        let m = SubspaceBasis::new(3, &[vec![1.0.into(), 0.0.into(), 0.0.into()], vec![0.0.into(), 1.0.into(), 0.0.into()]]);
        let r = restrict_to_invariant(&d, &m, &q(0, 2, 3.0), TOL).unwrap();
        assert_eq!(r.matrix, ComplexMatrix::real_diag(&[2.0, 1.0]));
        assert!(r.parent.holds && r.report.holds);

        let t = fixtures::restriction_example();
        let m = SubspaceBasis::new(4, &[vec![1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()], vec![0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]]);
        let lam = posinormal::min_lambda(&t, 1, 2, TOL).unwrap().lambda_min.unwrap() * (1.0 + 1e-8);
        let r = restrict_to_invariant(&t, &m, &q(1, 2, lam), TOL).unwrap();
        assert_eq!(r.matrix, fixtures::restriction_block());
        assert!(r.parent.holds && r.report.holds);

        let bad = SubspaceBasis::new(4, &[vec![0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]]);
        assert!(matches!(
            restrict_to_invariant(&t, &bad, &q(1, 2, lam), TOL),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn isometry_and_conjugation_examples() {
        let t = ComplexMatrix::real_diag(&[2.0, 1.0]);
        let s = ComplexMatrix::real_diag(&[1.0, -1.0]);
        assert!(isometry_product_check(&t, &s, &q(0, 2, 2.0), TOL).unwrap().holds);
        assert!(isometry_product_check(&t, &ComplexMatrix::identity(2), &q(0, 2, 2.0), TOL).unwrap().holds);
        let swap = ComplexMatrix::from_real_rows(&[&[0., 1.], &[1., 0.]]);
        assert!(matches!(
            isometry_product_check(&t, &swap, &q(0, 2, 2.0), TOL),
            Err(Error::Precondition { check: "TS = ST", .. })
        ));

        let r = unitary_conjugate_check(&t, &swap, &q(0, 2, 2.0), TOL).unwrap();
        assert!(r.verdicts_agree && r.report.holds && r.gap_spectrum_deviation < 1e-14);
        let mut rng = random::rng(12);
        let h = random::householder(&mut rng, 3);
        let r = unitary_conjugate_check(&fixtures::shift3(), &h, &q(3, 2, 1.0), TOL).unwrap();
        assert!(r.report.holds && r.verdicts_agree);
        assert!(unitary_conjugate_check(&t, &t, &q(0, 2, 2.0), TOL).is_err());
    }

    #[test]
    fn dense_range_and_tensor_examples() {
        let d = ComplexMatrix::real_diag(&[2.0, 1.0]);
        let lam = posinormal::min_lambda(&d, 2, 2, TOL).unwrap().lambda_min.unwrap();
        assert!((lam - 2.0).abs() < 1e-12);
        assert!(dense_range_upgrade(&d, &q(2, 2, lam * (1.0 + 1e-8)), TOL).unwrap().holds);
        assert!(matches!(
            dense_range_upgrade(&fixtures::shift3(), &q(3, 2, 1.0), TOL),
            Err(Error::RankDeficient { rank: 0, dim: 3 })
        ));

        let a = fixtures::shift3();
        let r = tensor_check(&a, &a, &q(3, 2, 1.0), &q(3, 2, 1.0), TOL).unwrap();
        assert!(r.report.holds && r.report.gap_norm == 0.0);
        let r = tensor_check(
            &ComplexMatrix::real_diag(&[2.0, 1.0]),
            &ComplexMatrix::real_diag(&[3.0, 1.0]),
            &q(0, 2, 2.0),
            &q(0, 2, 3.0),
            TOL,
        )
        .unwrap();
        assert!(r.report.holds && r.lambda == 6.0);
        assert!(tensor_check(&a, &a, &q(3, 2, 1.0), &q(2, 2, 1.0), TOL).is_err());
    }
}
