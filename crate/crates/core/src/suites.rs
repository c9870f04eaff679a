//! Seeded randomized suites over the class invariants.
//!
//! Case `i` draws from [`random::case_rng`]`(seed, i)`, so outcomes do not
//! depend on evaluation order and the parallel and sequential modes agree.

use rand::Rng;
use serde::Serialize;

use crate::condexp::{self, random_setup};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, SubspaceBasis};
use crate::par::{self, ExecMode};
use crate::posinormal::{self, certify_min_lambda, min_lambda, ClassQuery};
use crate::random::{self, case_rng, SuiteRng};
use crate::structure;

pub const TOL: f64 = 1e-10;
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Cases whose generated input fell outside the suite's hypothesis.
    pub skipped: usize,
    pub violations: usize,
    /// First few violation descriptions.
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

enum Case {
    Pass,
    Skip,
    Fail(String),
}

fn run(name: &'static str, mode: ExecMode, seed: u64, cases: usize, f: impl Fn(usize, &mut SuiteRng) -> Result<Case> + Sync + Send) -> SuiteOutcome {
    let results = par::map_range(mode, cases, |i| {
        let mut rng = case_rng(seed, i);
        match f(i, &mut rng) {
            Ok(c) => c,
            Err(e) => Case::Fail(format!("case {i}: {e}")),
        }
    });
    let mut out = SuiteOutcome {
        name,
        cases,
        skipped: 0,
        violations: 0,
        failures: Vec::new(),
    };
    for r in results {
        match r {
            Case::Pass => {}
            Case::Skip => out.skipped += 1,
            Case::Fail(msg) => {
                out.violations += 1;
                if out.failures.len() < 5 {
                    out.failures.push(msg);
                }
            }
        }
    }
    out
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Case {
    if ok {
        Case::Pass
    } else {
        Case::Fail(msg())
    }
}

/// Well-conditioned invertible, upper-triangular, or nilpotent-tailed operator.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    match rng.random_range(0..4) {
        0 | 1 => random::conditioned(rng, dim, 0.5, 1.5),
        2 => random::upper_triangular(rng, dim, 0.5, 1.5, 0.5),
        _ => {
            let nil = rng.random_range(1..=dim.min(2));
            random::with_nilpotent_part(rng, dim, nil)
        }
    }
}

/// `(T, k, n)` for case `i` of the bracketing suite: dim ≤ 6, k ≤ 2, n ≤ 3.
pub fn bracketing_case(seed: u64, i: usize) -> (ComplexMatrix, u32, u32) {
    let mut rng = case_rng(seed, i);
    let dim = rng.random_range(1..=6);
    let t = random_operator(&mut rng, dim);
    (t, rng.random_range(0..=2), rng.random_range(1..=3))
}

/// Membership at `λ_min(1 + 1e-8)` and non-membership at `λ_min(1 − 1e-6)`.
pub fn bracketing(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("min-lambda-bracketing", mode, seed, cases, |i, _| {
        let (t, k, n) = bracketing_case(seed, i);
        let r = min_lambda(&t, k, n, TOL)?;
        if !r.feasible {
            return Ok(Case::Skip);
        }
        Ok(match certify_min_lambda(&t, k, n, &r, TOL)? {
            None => Case::Skip,
            Some(c) => check(c.passed(), || format!("case {i}: ({k},{n}) certificate {c:?}")),
        })
    })
}

/// λ-monotonicity and k-monotonicity on random members and random queries.
pub fn monotonicity(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("monotonicity", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(1..=6);
        let t = random_operator(rng, dim);
        let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
        let lambda = match min_lambda(&t, k, n, TOL)? {
            r if r.feasible && rng.random_bool(0.7) => r.lambda_min.unwrap().max(1e-3) * rng.random_range(1.001..2.0),
            _ => rng.random_range(0.1..4.0),
        };
        let q = ClassQuery::new(k, n, lambda)?;
        let here = posinormal::is_member(&t, &q, TOL)?.holds;
        if !here {
            return Ok(Case::Pass);
        }
        let bigger = q.with_lambda(lambda * rng.random_range(1.0..3.0))?;
        let up = posinormal::is_member(&t, &bigger, TOL)?.holds;
        let next = posinormal::is_member(&t, &ClassQuery::new(k + 1, n, lambda)?, TOL)?.holds;
        Ok(check(up && next, || format!("case {i}: ({k},{n},{lambda}) larger λ {up}, k+1 {next}")))
    })
}

/// Verdict of `T` at `(k, n, λ)` equals that of `cT` at `(k, n, λ|c|^{n−1})`.
pub fn scaling(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("scaling-covariance", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(1..=6);
        let t = random_operator(rng, dim);
        let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
        let c = random::unit_phase(rng) * rng.random_range(0.5..2.0);
        let lambda = match min_lambda(&t, k, n, TOL)? {
            r if r.feasible && r.lambda_min.unwrap() > 0.0 => {
                let f = if rng.random_bool(0.5) { 1.01 } else { 0.99 };
                r.lambda_min.unwrap() * f
            }
            _ => rng.random_range(0.1..4.0),
        };
        let a = posinormal::is_member(&t, &ClassQuery::new(k, n, lambda)?, TOL)?.holds;
        let scaled_lambda = lambda * c.norm().powi(n as i32 - 1);
        let b = posinormal::is_member(&t.scale(c), &ClassQuery::new(k, n, scaled_lambda)?, TOL)?.holds;
        Ok(check(a == b, || format!("case {i}: ({k},{n},{lambda}) c = {c}: {a} vs {b}")))
    })
}

/// Decomposition invariants for random `T` with rank-deficient `Tᵏ`
/// (dim ≤ 8, k ≤ 3), including the k = 0 test of `A` for members.
pub fn decomposition(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("decomposition", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(2..=8);
        let nil = rng.random_range(1..=dim.min(3));
        let t = random::with_nilpotent_part(rng, dim, nil);
        let (k, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let r = min_lambda(&t, k, n, TOL)?;
        let query = match r.lambda_min {
            Some(l) if r.feasible => Some(ClassQuery::new(k, n, l.max(1e-6) * (1.0 + 1e-6))?),
            _ => None,
        };
        let d = structure::decompose(&t, k, TOL)?;
        if d.degenerate {
            return Ok(Case::Skip);
        }
        let c = structure::check_decomposition(&t, &d, query.as_ref(), TOL)?;
        Ok(check(c.passed, || {
            format!(
                "case {i}: k={k} recon {:.1e} lower {:.1e} nil {:.1e} A-member {:?} union {:.1e}",
                c.reconstruction_residual,
                c.residual_lower_left,
                c.nilpotency_residual,
                c.block_a_member,
                c.spectrum_union_distance
            )
        }))
    })
}

fn member_query<R: Rng + ?Sized>(rng: &mut R, t: &ComplexMatrix, k: u32, n: u32) -> Result<Option<ClassQuery>> {
    let r = min_lambda(t, k, n, TOL)?;
    Ok(match r.lambda_min {
        Some(l) if r.feasible => Some(ClassQuery::new(k, n, l.max(1e-6) * rng.random_range(1.000_001..1.5))?),
        _ => None,
    })
}

/// `T ⊗ S` at `λμ` for member pairs of dimension ≤ 4.
pub fn tensor(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("tensor", mode, seed, cases, |i, rng| {
        let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
        let (dt, ds) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let t = random_operator(rng, dt);
        let s = random_operator(rng, ds);
        let (Some(qt), Some(qs)) = (member_query(rng, &t, k, n)?, member_query(rng, &s, k, n)?) else {
            return Ok(Case::Skip);
        };
        let r = structure::tensor_check(&t, &s, &qt, &qs, CLOSURE_TOL)?;
        Ok(check(r.report.holds, || format!("case {i}: ({k},{n}) at {} min eig {:e}", r.lambda, r.report.gap_min_eigenvalue)))
    })
}

/// Restriction to leading Schur vectors of a random Schur form.
pub fn restriction(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("restriction", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(2..=6);
        let (t, q) = random::schur_form(rng, dim);
        let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
        let Some(query) = member_query(rng, &t, k, n)? else {
            return Ok(Case::Skip);
        };
        let j = rng.random_range(1..=dim);
        let m = SubspaceBasis::new(dim, &q.columns()[..j]);
        let r = structure::restrict_to_invariant(&t, &m, &query, CLOSURE_TOL)?;
        Ok(check(!r.parent.holds || r.report.holds, || format!("case {i}: restriction to {j} dims fails")))
    })
}

/// `TS` for a member `T` and a unitary `S` commuting with it.
pub fn isometry_product(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("isometry-product", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(1..=6);
        let (t, s) = random::commuting_unitary_pair(rng, dim);
        let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
        let Some(query) = member_query(rng, &t, k, n)? else {
            return Ok(Case::Skip);
        };
        let r = structure::isometry_product_check(&t, &s, &query, CLOSURE_TOL)?;
        Ok(check(r.holds, || format!("case {i}: TS min eig {:e}", r.gap_min_eigenvalue)))
    })
}

/// Verdict and gap spectrum of `U*TU` against `T`, above and below `λ_min`.
pub fn unitary_conjugation(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("unitary-conjugation", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(1..=6);
        let t = random_operator(rng, dim);
        let u = if rng.random_bool(0.5) {
            random::householder(rng, dim)
        } else {
            random::unitary(rng, dim)
        };
        let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
        let r = min_lambda(&t, k, n, TOL)?;
        let lambda = match r.lambda_min {
            Some(l) if r.feasible && l > 0.0 => l * if rng.random_bool(0.5) { 1.001 } else { 0.9 },
            _ => rng.random_range(0.1..4.0),
        };
        let c = structure::unitary_conjugate_check(&t, &u, &ClassQuery::new(k, n, lambda)?, CLOSURE_TOL)?;
        Ok(check(c.verdicts_agree && c.gap_spectrum_deviation <= CLOSURE_TOL, || {
            format!("case {i}: agree {} deviation {:e}", c.verdicts_agree, c.gap_spectrum_deviation)
        }))
    })
}

/// k = 0 membership of invertible members.
pub fn dense_range(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("dense-range-upgrade", mode, seed, cases, |i, rng| {
        let dim = rng.random_range(1..=6);
        let t = random::conditioned(rng, dim, 0.5, 1.5);
        let (k, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let Some(query) = member_query(rng, &t, k, n)? else {
            return Ok(Case::Skip);
        };
        let r = structure::dense_range_upgrade(&t, &query, CLOSURE_TOL)?;
        Ok(check(r.holds, || format!("case {i}: k = 0 min eig {:e}", r.gap_min_eigenvalue)))
    })
}

/// Power identities, norm formula and polar factors on random measure spaces.
pub fn weighted_operators(mode: ExecMode, seed: u64, cases: usize) -> SuiteOutcome {
    run("weighted-operators", mode, seed, cases, |i, rng| {
        let op = random_setup(rng, 12, 4).build()?;
        let norm = condexp::norm_formula_check(&op, TOL);
        let mut bad = Vec::new();
        if !norm.holds {
            bad.push(format!("norm deviation {:e}", norm.deviation));
        }
        for m in [1.0, 2.0, 3.0] {
            let l = condexp::lemma31_check(&op, m, TOL)?;
            if !l.holds {
                bad.push(format!("m = {m}: {:e} / {:e}", l.star_t_deviation, l.t_star_deviation));
            }
        }
        let p = condexp::polar_decomposition_check(&op, TOL)?;
        if !(p.holds && p.factor_residual <= TOL) {
            bad.push(format!("polar residual {:e}", p.factor_residual));
        }
        if op.action_residual(rng, 16) > 1e-12 {
            bad.push("action mismatch".into());
        }
        Ok(check(bad.is_empty(), || format!("case {i}: {}", bad.join("; "))))
    })
}

/// Printed and exact blockwise criteria against the matrix verdict at
/// `λ ∈ {λ_min/2, λ_min, 2λ_min}`; returns counts of agreement per criterion.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct CriterionTally {
    pub evaluations: usize,
    pub printed_agrees: usize,
    pub derived_agrees: usize,
    /// Matrix membership without the printed inequality.
    pub printed_necessity_failures: usize,
}

fn tally_cases(seed: u64, cases: usize, k: u32, n: u32, printed: impl Fn(&condexp::WeightedConditionalOperator, f64) -> Result<(bool, bool, bool)> + Sync + Send) -> Result<CriterionTally> {
    let rows = par::map_range(ExecMode::Parallel, cases, |i| -> Result<Vec<(bool, bool, bool)>> {
        let mut rng = case_rng(seed, i);
        let op = random_setup(&mut rng, 8, 3).build()?;
        let r = min_lambda(&op.matrix, k, n, TOL)?;
        let Some(l) = r.lambda_min.filter(|&l| r.feasible && l > 0.0) else {
            return Ok(Vec::new());
        };
        [0.5, 1.0, 2.0].iter().map(|f| printed(&op, l * f)).collect()
    });
    let mut tally = CriterionTally::default();
    for row in rows {
        for (p, d, m) in row? {
            tally.evaluations += 1;
            tally.printed_agrees += usize::from(p == m);
            tally.derived_agrees += usize::from(d == m);
            tally.printed_necessity_failures += usize::from(m && !p);
        }
    }
    Ok(tally)
}

// Verdicts at exactly λ_min sit on the boundary; the comparison uses a
// tolerance well below the default so tiny gaps are not rounded away.
const TALLY_TOL: f64 = 1e-13;

pub fn posinormal_criterion_tally(seed: u64, cases: usize) -> Result<CriterionTally> {
    tally_cases(seed, cases, 0, 1, |op, lam| {
        let r = condexp::thm33_check(op, lam, TALLY_TOL)?;
        Ok((r.blockwise_holds, r.derived_holds, r.matrix_holds))
    })
}

pub fn power_criterion_tally(seed: u64, cases: usize, n: u32) -> Result<CriterionTally> {
    tally_cases(seed, cases, 0, n, |op, lam| {
        let r = condexp::thm34_check(op, n, lam, TALLY_TOL)?;
        Ok((r.printed_holds, r.derived_holds, r.matrix_holds))
    })
}

pub fn quasi_criterion_tally(seed: u64, cases: usize, k: u32, n: u32) -> Result<CriterionTally> {
    tally_cases(seed, cases, k, n, |op, lam| {
        let r = condexp::thm35_check(op, k, n, lam, TALLY_TOL)?;
        Ok((r.stated_holds, r.derived_holds, r.matrix_holds))
    })
}
