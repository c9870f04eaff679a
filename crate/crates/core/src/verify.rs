//! Claim-by-claim verification report over the worked examples and the
//! randomized invariant suites.
//!
//! Claims run concurrently and are sorted by id afterwards, so the report is
//! byte-stable for a given seed apart from the `timings` map.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::condexp::{self, block_means, discretize_interval_example, random_setup, stated_criterion, Setup};
use crate::error::Result;
use crate::fixtures;
use crate::io::{matrix_to_json, SpaceDoc};
use crate::linalg::{distinct_values, hausdorff_distance, spectrum, ComplexMatrix, SubspaceBasis, C64};
use crate::par::{self, ExecMode};
use crate::posinormal::{self, classify_grid, is_member, min_lambda, ClassQuery, CollapseVerdict};
use crate::random::{self, case_rng};
use crate::structure;
use crate::suites::{self, SuiteOutcome, TOL};

pub const DEFAULT_SEED: u64 = 20_240_611;

/// Cases per randomized suite in the report.
pub const SUITE_CASES: usize = 60;

/// Atoms in the discretized interval example.
pub const INTERVAL_ATOMS: usize = 4096;

/// Atoms used for the matrix verdict on the interval example.
pub const INTERVAL_MATRIX_ATOMS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Match,
    Mismatch,
    NotAssertable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimRecord {
    pub claim_id: String,
    pub paper_location: String,
    pub expected: String,
    pub computed: String,
    pub status: ClaimStatus,
}

fn claim(id: &str, location: &str, expected: impl Into<String>, computed: impl Into<String>, status: ClaimStatus) -> ClaimRecord {
    ClaimRecord {
        claim_id: id.into(),
        paper_location: location.into(),
        expected: expected.into(),
        computed: computed.into(),
        status,
    }
}

fn status(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Match
    } else {
        ClaimStatus::Mismatch
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    /// SHA-256 of the canonical JSON of every built-in input.
    pub input_digests: BTreeMap<String, String>,
    pub claims: Vec<ClaimRecord>,
    /// Wall-clock milliseconds per claim.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// The report text with the timing map emptied.
    pub fn to_json_without_timings(&self) -> String {
        Self {
            timings: BTreeMap::new(),
            ..self.clone()
        }
        .to_json()
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimRecord> {
        self.claims.iter().find(|c| c.claim_id == id)
    }

    pub fn count(&self, s: ClaimStatus) -> usize {
        self.claims.iter().filter(|c| c.status == s).count()
    }
}

type ClaimFn = fn(u64) -> Result<ClaimRecord>;

const CLAIMS: &[ClaimFn] = &[
    ex22_membership,
    ex22_not_power,
    ex23_truncated,
    k1_remark,
    inclusion_chain,
    prop26_tstar_t,
    prop26_t2_tstar2,
    prop26_lambda3,
    prop26_restriction_gap,
    prop26_restriction_preserved,
    thm210_lambda3,
    thm210_gap_display,
    thm210_split,
    thm210_spectrum,
    thm210_nilpotent,
    thm210_block_a,
    ex36_ew2,
    ex36_eu2,
    ex36_euw,
    ex36_arithmetic,
    ex36_exponent,
    ex36_oracle_criterion,
    ex36_matrix_verdict,
    prop24_min_lambda,
    prop24_norm_inequality,
    prop24_collapse,
    cor25_norm_bound,
    monotonicity,
    scaling,
    prop26_suite,
    prop27_suite,
    prop28_suite,
    prop29_suite,
    thm210_suite,
    thm211_suite,
    e_properties,
    norm_formula,
    lemma31,
    thm32_polar,
    thm33,
    thm34,
    thm35,
];

pub fn input_digests() -> BTreeMap<String, String> {
    let hex = |text: &str| Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    let mut out = BTreeMap::new();
    let matrices = [
        ("shift3", fixtures::shift3()),
        ("truncated_shift6", fixtures::truncated_shift(6)),
        ("restriction_example", fixtures::restriction_example()),
        ("restriction_block", fixtures::restriction_block()),
        ("decomposition_example", fixtures::decomposition_example()),
    ];
    for (name, m) in matrices {
        out.insert(name.to_string(), hex(&matrix_to_json(&m)));
    }
    for n in [INTERVAL_MATRIX_ATOMS, INTERVAL_ATOMS] {
        let doc = SpaceDoc::from_setup(&discretize_interval_example(n).expect("even size"));
        out.insert(format!("interval{n}"), hex(&serde_json::to_string(&doc).expect("space serialises")));
    }
    out
}

pub fn run(seed: u64) -> Result<RunReport> {
    run_with(ExecMode::default(), seed)
}

pub fn run_with(mode: ExecMode, seed: u64) -> Result<RunReport> {
    let results = par::map_with(mode, CLAIMS, |f| {
        let start = Instant::now();
        let r = f(seed);
        (r, start.elapsed().as_secs_f64() * 1e3)
    });
    let mut claims = Vec::with_capacity(results.len());
    let mut timings = BTreeMap::new();
    for (r, ms) in results {
        let c = r?;
        timings.insert(c.claim_id.clone(), ms);
        claims.push(c);
    }
    claims.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    Ok(RunReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        input_digests: input_digests(),
        claims,
        timings,
    })
}

fn fmt_real(m: &ComplexMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|z| fmt_num(z.re)).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn fmt_num(x: f64) -> String {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        format!("{}", r + 0.0)
    } else {
        format!("{x:.6}")
    }
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    a.shape() == b.shape() && (a - b).max_abs() <= 1e-9
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn suite_claim(id: &str, location: &str, expected: &str, s: SuiteOutcome) -> ClaimRecord {
    let mut computed = format!("{} cases, {} outside hypothesis, {} violations", s.cases, s.skipped, s.violations);
    if let Some(f) = s.failures.first() {
        let _ = write!(computed, "; first: {f}");
    }
    claim(id, location, expected, computed, status(s.passed()))
}

fn lambda_text(t: &ComplexMatrix, k: u32, n: u32) -> Result<(Option<f64>, String)> {
    let r = min_lambda(t, k, n, TOL)?;
    Ok(match r.lambda_min {
        Some(l) if r.feasible => (Some(l), format!("lambda_min = {l:.10}")),
        _ => (None, "infeasible".into()),
    })
}

// Worked examples on matrices.

fn ex22_membership(_: u64) -> Result<ClaimRecord> {
    let r = is_member(&fixtures::shift3(), &ClassQuery::new(3, 2, 1.0)?, TOL)?;
    Ok(claim(
        "ex2.2-membership",
        "Example 2.2",
        "3-quasi 2-power posinormal",
        format!("holds = {} at (k=3, n=2, lambda=1); gap norm {}", r.holds, fmt_num(r.gap_norm)),
        status(r.holds && r.gap_norm == 0.0),
    ))
}

fn obstruction_is_e1(v: &Option<Vec<C64>>) -> bool {
    v.as_ref().is_some_and(|x| (x[0].norm() - 1.0).abs() <= 1e-10)
}

fn ex22_not_power(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::shift3();
    let r = min_lambda(&t, 0, 2, TOL)?;
    let big = is_member(&t, &ClassQuery::new(0, 2, 1e6)?, TOL)?;
    Ok(claim(
        "ex2.2-not-2-power",
        "Example 2.2",
        "not 2-power posinormal",
        format!(
            "(k=0, n=2): feasible = {}, obstruction e1 = {}; at lambda = 1e6 holds = {}, min eigenvalue {}",
            r.feasible,
            obstruction_is_e1(&r.kernel_obstruction),
            big.holds,
            fmt_num(big.gap_min_eigenvalue)
        ),
        status(!r.feasible && obstruction_is_e1(&r.kernel_obstruction) && !big.holds),
    ))
}

fn ex23_truncated(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::truncated_shift(6);
    let member = is_member(&t, &ClassQuery::new(3, 2, 1.0)?, TOL)?;
    let r = min_lambda(&t, 0, 2, TOL)?;
    Ok(claim(
        "ex2.3-truncated",
        "Example 2.3",
        "3-quasi 2-power posinormal, not 2-power posinormal",
        format!("dimension 6: (3,2,1) holds = {}; (0,2) feasible = {}", member.holds, r.feasible),
        status(member.holds && !r.feasible),
    ))
}

fn k1_remark(_: u64) -> Result<ClaimRecord> {
    let mut parts = Vec::new();
    for (name, t) in [
        ("shift3", fixtures::shift3()),
        ("truncated_shift6", fixtures::truncated_shift(6)),
        ("restriction_example", fixtures::restriction_example()),
    ] {
        let (_, k0) = lambda_text(&t, 0, 2)?;
        let (_, k1) = lambda_text(&t, 1, 2)?;
        let (_, k3) = lambda_text(&t, 3, 2)?;
        parts.push(format!("{name}: k=0 {k0}, k=1 {k1}, k=3 {k3}"));
    }
    Ok(claim(
        "def2.1-k1-remark",
        "Remark after Definition 2.1",
        "k = 1 coincides with n-power posinormal",
        format!("n-power posinormal taken as k = 0; n = 2 on {}", parts.join("; ")),
        ClaimStatus::NotAssertable,
    ))
}

fn inclusion_chain(seed: u64) -> Result<ClaimRecord> {
    let seed = sub_seed(seed, 1);
    let grids = par::map_range(ExecMode::Parallel, SUITE_CASES, |i| -> Result<(usize, usize)> {
        let mut rng = case_rng(seed, i);
        let dim = rng.random_range(1..=5);
        let g = classify_grid(&suites::random_operator(&mut rng, dim), 3, 3, TOL)?;
        // posinormal feasible but n-power infeasible
        let chain = (2..=3)
            .filter(|&n| g.get(0, 1).unwrap().feasible && !g.get(0, n).unwrap().feasible)
            .count();
        Ok((g.monotonicity_violations().len(), chain))
    });
    let (mut mono, mut chain) = (0, 0);
    for g in grids {
        let (a, b) = g?;
        mono += a;
        chain += b;
    }
    Ok(claim(
        "def2.1-inclusion-chain",
        "Remark after Definition 2.1",
        "posinormal ⊆ n-power posinormal ⊆ k-quasi n-power posinormal",
        format!("{SUITE_CASES} grids (k ≤ 3, n ≤ 3): {mono} k-monotonicity violations, {chain} feasibility breaks from n = 1 to n > 1; constants not compared"),
        ClaimStatus::NotAssertable,
    ))
}

fn prop26_tstar_t(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::restriction_example();
    let got = &t.adjoint() * &t;
    let want = ComplexMatrix::from_real_rows(&[&[1., 1., 0., 0.], &[1., 5., 0., 0.], &[0., 0., 0., 0.], &[0., 0., 0., 1.]]);
    Ok(claim("ex-prop2.6-tstar-t", "Example following Proposition 2.6", fmt_real(&want), fmt_real(&got), status(close(&got, &want))))
}

fn prop26_t2_tstar2(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::restriction_example();
    let t2 = &t * &t;
    let got = &t2 * &t2.adjoint();
    let want = ComplexMatrix::from_real_rows(&[&[5., 10., 0., 0.], &[10., 20., 0., 0.], &[0., 0., 0., 0.], &[0., 0., 0., 0.]]);
    Ok(claim("ex-prop2.6-t2-tstar2", "Example following Proposition 2.6", fmt_real(&want), fmt_real(&got), status(close(&got, &want))))
}

fn prop26_lambda3(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::restriction_example();
    let r = is_member(&t, &ClassQuery::new(1, 2, 3.0)?, TOL)?;
    let (_, l) = lambda_text(&t, 1, 2)?;
    Ok(claim(
        "ex-prop2.6-lambda3",
        "Example following Proposition 2.6",
        "1-quasi 2-power posinormal at lambda = 3",
        format!("holds = {} at lambda = 3, gap min eigenvalue {:.10}; {l}", r.holds, r.gap_min_eigenvalue),
        status(r.holds),
    ))
}

fn prop26_restriction_gap(_: u64) -> Result<ClaimRecord> {
    let got = posinormal::gap_matrix(&fixtures::restriction_block(), &ClassQuery::new(1, 2, 3.0)?)?;
    let want = ComplexMatrix::from_real_rows(&[&[8., 8.], &[8., 25.]]);
    let psd = is_member(&fixtures::restriction_block(), &ClassQuery::new(1, 2, 3.0)?, TOL)?.holds;
    Ok(claim(
        "ex-prop2.6-restriction-gap",
        "Example following Proposition 2.6",
        format!("{} positive definite", fmt_real(&want)),
        format!("{} psd = {psd}", fmt_real(&got)),
        status(close(&got, &want) && psd),
    ))
}

fn prop26_restriction_preserved(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::restriction_example();
    let (Some(l), _) = lambda_text(&t, 1, 2)? else {
        return Ok(claim("ex-prop2.6-restriction-preserved", "Example following Proposition 2.6", "restriction to span{e1, e2} stays in the class", "parent infeasible", ClaimStatus::Mismatch));
    };
    let e = |i: usize| (0..4).map(|j| C64::from(f64::from(u8::from(i == j)))).collect::<Vec<_>>();
    let m = SubspaceBasis::new(4, &[e(0), e(1)]);
    let lambda = l * posinormal::CERT_UPPER;
    let r = structure::restrict_to_invariant(&t, &m, &ClassQuery::new(1, 2, lambda)?, TOL)?;
    let block_ok = close(&r.matrix, &fixtures::restriction_block());
    Ok(claim(
        "ex-prop2.6-restriction-preserved",
        "Example following Proposition 2.6",
        "restriction to span{e1, e2} is [[1,1],[0,2]] and stays in the class",
        format!(
            "restriction {}; at lambda = {lambda:.10} parent holds = {}, restriction holds = {}",
            fmt_real(&r.matrix),
            r.parent.holds,
            r.report.holds
        ),
        status(block_ok && r.parent.holds && r.report.holds),
    ))
}

fn thm210_lambda3(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::decomposition_example();
    let r = is_member(&t, &ClassQuery::new(1, 2, 3.0)?, TOL)?;
    let (_, l) = lambda_text(&t, 1, 2)?;
    Ok(claim(
        "ex-thm2.10-lambda3",
        "Example following Theorem 2.10",
        "gap is positive semidefinite at lambda = 3",
        format!("holds = {} at lambda = 3, gap min eigenvalue {:.10}; {l}", r.holds, r.gap_min_eigenvalue),
        status(r.holds),
    ))
}

fn thm210_gap_display(_: u64) -> Result<ClaimRecord> {
    let got = posinormal::gap_matrix(&fixtures::decomposition_example(), &ClassQuery::new(1, 2, 3.0)?)?;
    let want = ComplexMatrix::from_real_rows(&[&[12., 6., 0., 0.], &[6., 3., 0., 0.], &[0., 0., 0., 0.], &[0., 0., 0., 0.]]);
    Ok(claim("ex-thm2.10-gap-display", "Example following Theorem 2.10", fmt_real(&want), fmt_real(&got), status(close(&got, &want))))
}

fn thm210_split(_: u64) -> Result<ClaimRecord> {
    let d = structure::decompose(&fixtures::decomposition_example(), 1, TOL)?;
    Ok(claim(
        "ex-thm2.10-split",
        "Example following Theorem 2.10",
        "range of T = span{e1, e2}, ker T* = span{e3, e4} (2 + 2)",
        format!("range dimension {}, kernel dimension {} ({} + {})", d.range_dim(), d.kernel_dim(), d.range_dim(), d.kernel_dim()),
        status(d.range_dim() == 2 && d.kernel_dim() == 2),
    ))
}

fn fmt_set(values: &[C64]) -> String {
    let mut re: Vec<f64> = values.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    let cells: Vec<String> = re.iter().map(|&x| fmt_num(x)).collect();
    format!("{{{}}}", cells.join(","))
}

fn thm210_spectrum(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::decomposition_example();
    let d = structure::decompose(&t, 1, TOL)?;
    let c = structure::check_decomposition(&t, &d, None, TOL)?;
    let want = [C64::from(0.0), C64::from(1.0), C64::from(2.0)];
    let distinct = distinct_values(&spectrum(&t, TOL)?, 1e-3 * t.max_abs().max(1.0));
    let ok = hausdorff_distance(&distinct, &want) <= structure::SPECTRUM_UNION_TOL
        && c.spectrum_union_distance <= structure::SPECTRUM_UNION_TOL;
    Ok(claim(
        "ex-thm2.10-spectrum",
        "Example following Theorem 2.10",
        "sigma(T) = {0,1,2} = sigma(A) ∪ {0}",
        format!(
            "sigma(T) = {}, sigma(A) = {}, union distance {:.1e}",
            fmt_set(&distinct),
            fmt_set(&distinct_values(&c.spectrum_a, 1e-3)),
            c.spectrum_union_distance
        ),
        status(ok),
    ))
}

fn thm210_nilpotent(_: u64) -> Result<ClaimRecord> {
    let d = structure::decompose(&fixtures::decomposition_example(), 1, TOL)?;
    Ok(claim(
        "ex-thm2.10-nilpotent",
        "Theorem 2.10",
        "C^k = 0 for k = 1",
        format!("C is {0}x{0}, norm of C^1 = {1:.1e}", d.kernel_dim(), d.nilpotency_residual),
        status(d.nilpotency_residual <= structure::DECOMPOSITION_TOL),
    ))
}

fn thm210_block_a(_: u64) -> Result<ClaimRecord> {
    let t = fixtures::decomposition_example();
    let (Some(l), _) = lambda_text(&t, 1, 2)? else {
        return Ok(claim("ex-thm2.10-block-a", "Example following Theorem 2.10", "A is 2-power posinormal", "T infeasible", ClaimStatus::Mismatch));
    };
    let q = ClassQuery::new(1, 2, l * posinormal::CERT_UPPER)?;
    let d = structure::decompose(&t, 1, TOL)?;
    let c = structure::check_decomposition(&t, &d, Some(&q), TOL)?;
    Ok(claim(
        "ex-thm2.10-block-a",
        "Example following Theorem 2.10",
        "A is 2-power posinormal",
        format!("A is {0}x{0}; at lambda = {1:.10}: T member = {2:?}, A (k=0, n=2) member = {3:?}", d.range_dim(), q.lambda, c.member, c.block_a_member),
        status(c.block_a_member == Some(true)),
    ))
}

// Interval example on [0, 1].

fn interval_means(n: usize) -> Result<(Setup, [Vec<C64>; 3])> {
    let s = discretize_interval_example(n)?;
    let m = |f: &condexp::MeasurableFunction| block_means(&s.space, &s.partition, f);
    let ew = m(&s.w.abs_sq());
    let eu = m(&s.u.abs_sq());
    let euw = m(&s.u.mul(&s.w));
    Ok((s, [ew, eu, euw]))
}

fn fmt_pair(v: &[C64]) -> String {
    format!("({:.8}, {:.8})", v[0].re, v[1].re)
}

fn ex36_ew2(_: u64) -> Result<ClaimRecord> {
    let (_, [ew, _, _]) = interval_means(INTERVAL_ATOMS)?;
    Ok(claim(
        "ex3.6-Ew2",
        "Example following Theorem 3.5",
        "E(|w|^2) = (4, 1)",
        format!("E(|w|^2) = {} at N = {INTERVAL_ATOMS}", fmt_pair(&ew)),
        status(ew[0] == C64::from(4.0) && ew[1] == C64::from(1.0)),
    ))
}

fn ex36_eu2(_: u64) -> Result<ClaimRecord> {
    let (_, [_, eu, _]) = interval_means(INTERVAL_ATOMS)?;
    let ok = eu.iter().all(|z| (z.re - 1.0 / 12.0).abs() <= 1e-6 && z.im == 0.0);
    Ok(claim(
        "ex3.6-Eu2",
        "Example following Theorem 3.5",
        "E(|u|^2) = (1/12, 1/12)",
        format!("E(|u|^2) = {} at N = {INTERVAL_ATOMS}", fmt_pair(&eu)),
        status(ok),
    ))
}

fn ex36_euw(_: u64) -> Result<ClaimRecord> {
    let (_, [_, _, euw]) = interval_means(INTERVAL_ATOMS)?;
    let paper = [0.25, 0.25];
    let ok = euw.iter().zip(paper).all(|(z, p)| (z.re - p).abs() <= 1e-6);
    Ok(claim(
        "ex3.6-Euw",
        "Example following Theorem 3.5",
        "E(uw) = (1/4, 1/4)",
        format!("E(uw) = {} at N = {INTERVAL_ATOMS}", fmt_pair(&euw)),
        status(ok),
    ))
}

/// Printed left and right sides of the criterion, in exact arithmetic.
pub fn printed_criterion_arithmetic() -> (Rational64, Rational64) {
    let quarter = Rational64::new(1, 4);
    let twelfth = Rational64::new(1, 12);
    let lhs = quarter.pow(4);
    let rhs = Rational64::from_integer(16) * twelfth.pow(3) * Rational64::from_integer(4).pow(1);
    (lhs, rhs)
}

fn ex36_arithmetic(_: u64) -> Result<ClaimRecord> {
    let (lhs, rhs) = printed_criterion_arithmetic();
    let ok = lhs == Rational64::new(1, 256) && rhs == Rational64::new(1, 27) && lhs <= rhs;
    Ok(claim(
        "ex3.6-criterion-arithmetic",
        "Example following Theorem 3.5",
        "(1/4)^4 = 1/256 <= 16 (1/12)^3 (4)^1 = 1/27",
        format!("{lhs} <= {rhs}: {}", lhs <= rhs),
        status(ok),
    ))
}

fn ex36_exponent(_: u64) -> Result<ClaimRecord> {
    let (k, n) = (1i32, 2i32);
    let rhs = Rational64::from_integer(16) * Rational64::new(1, 12).pow(2 * n - 1) * Rational64::from_integer(4).pow(2 * k * n - 1);
    Ok(claim(
        "ex3.6-exponent",
        "Example following Theorem 3.5",
        "right side 1/27, with (E|w|^2)^(2kn-1) evaluated as 4^1",
        format!("2kn - 1 = {}, right side {rhs}", 2 * k * n - 1),
        status(rhs == Rational64::new(1, 27)),
    ))
}

fn ex36_oracle_criterion(_: u64) -> Result<ClaimRecord> {
    let (_, [ew, eu, euw]) = interval_means(INTERVAL_ATOMS)?;
    let blocks: Vec<_> = (0..2).map(|b| stated_criterion(euw[b].norm(), eu[b].re, ew[b].re, 1, 2, 4.0, TOL)).collect();
    let text: Vec<String> = blocks.iter().map(|b| format!("{:.6} <= {:.6}: {}", b.lhs, b.rhs, b.holds)).collect();
    Ok(claim(
        "ex3.6-oracle-criterion",
        "Example following Theorem 3.5",
        "criterion holds at (k=1, n=2, lambda=4)",
        format!("recomputed expectations: {}", text.join("; ")),
        status(blocks.iter().all(|b| b.holds)),
    ))
}

fn ex36_matrix_verdict(_: u64) -> Result<ClaimRecord> {
    let op = discretize_interval_example(INTERVAL_MATRIX_ATOMS)?.build()?;
    let r = condexp::thm35_check(&op, 1, 2, 4.0, TOL)?;
    Ok(claim(
        "ex3.6-matrix-verdict",
        "Example following Theorem 3.5",
        "T_{w,u} is 1-quasi 2-power posinormal",
        format!(
            "N = {INTERVAL_MATRIX_ATOMS}, lambda = 4: matrix {}, exact blockwise {}, stated {}, proof form {}",
            r.matrix_holds, r.derived_holds, r.stated_holds, r.proof_form_holds
        ),
        status(r.matrix_holds),
    ))
}

// Randomized suites over the operator class.

fn prop24_min_lambda(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "prop2.4-min-lambda",
        "Proposition 2.4",
        "member exactly for lambda >= lambda_min",
        suites::bracketing(ExecMode::Parallel, sub_seed(seed, 2), SUITE_CASES),
    ))
}

fn random_member(rng: &mut random::SuiteRng) -> Result<Option<(ComplexMatrix, ClassQuery)>> {
    let dim = rng.random_range(1..=5);
    let t = suites::random_operator(rng, dim);
    let (k, n) = (rng.random_range(0..=2), rng.random_range(1..=3));
    let r = min_lambda(&t, k, n, TOL)?;
    Ok(match r.lambda_min {
        Some(l) if r.feasible => Some((t, ClassQuery::new(k, n, l.max(1e-6) * 1.001)?)),
        _ => None,
    })
}

fn count_cases(seed: u64, f: impl Fn(&mut random::SuiteRng) -> Result<Option<bool>> + Sync + Send) -> Result<(usize, usize, usize)> {
    let rows = par::map_range(ExecMode::Parallel, SUITE_CASES, |i| f(&mut case_rng(seed, i)));
    let (mut run, mut bad) = (0, 0);
    for r in rows {
        if let Some(ok) = r? {
            run += 1;
            bad += usize::from(!ok);
        }
    }
    Ok((SUITE_CASES, run, bad))
}

fn prop24_norm_inequality(seed: u64) -> Result<ClaimRecord> {
    let (cases, run, bad) = count_cases(sub_seed(seed, 3), |rng| {
        let Some((t, q)) = random_member(rng)? else { return Ok(None) };
        let m = q.k + rng.random_range(0..=2);
        let r = posinormal::check_norm_inequality(&t, &q, m, 16, 1e-9, rng)?;
        Ok(Some(r.holds))
    })?;
    Ok(claim(
        "prop2.4i-norm-inequality",
        "Proposition 2.4(i)",
        "||T*^n T^m x|| <= lambda ||T^(m+1) x|| for all m >= k",
        format!("{cases} cases, {run} members, {bad} violations"),
        status(bad == 0),
    ))
}

fn prop24_collapse(_: u64) -> Result<ClaimRecord> {
    let cases = [
        ("shift3", fixtures::shift3(), 3, 2),
        ("shift3", fixtures::shift3(), 4, 2),
        ("truncated_shift6", fixtures::truncated_shift(6), 3, 2),
        ("truncated_shift6", fixtures::truncated_shift(6), 3, 3),
        ("zero", ComplexMatrix::zeros(3, 3), 1, 1),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, t, k, n) in cases {
        let r = posinormal::nilpotency_collapse_check(&t, k, n, TOL)?;
        ok &= r.verdict != CollapseVerdict::Violated;
        parts.push(format!("{name} (k={k}, n={n}): ||T^k|| = {} {:?}", fmt_num(r.power_norm), r.verdict));
    }
    Ok(claim(
        "prop2.4ii-collapse",
        "Proposition 2.4(ii)",
        "T^(k+1) = 0 forces T^k = 0 when k >= n",
        parts.join("; "),
        status(ok),
    ))
}

fn cor25_norm_bound(seed: u64) -> Result<ClaimRecord> {
    let squared_fail = std::sync::atomic::AtomicUsize::new(0);
    let (cases, run, bad) = count_cases(sub_seed(seed, 4), |rng| {
        let Some((t, q)) = random_member(rng)? else { return Ok(None) };
        let m = q.k + rng.random_range(0..=2);
        let r = posinormal::operator_norm_corollary_check(&t, &q, m, TOL)?;
        if !r.squared_variant_holds {
            squared_fail.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        Ok(Some(r.holds))
    })?;
    Ok(claim(
        "cor2.5-norm-bound",
        "Corollary 2.5",
        "||T*^n T^m|| <= lambda^2 ||T^(m+1)||",
        format!(
            "{cases} cases, {run} members: first-power bound violated {bad} times, printed squared bound violated {} times",
            squared_fail.into_inner()
        ),
        status(bad == 0),
    ))
}

fn monotonicity(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "def2.1-monotonicity",
        "Definition 2.1",
        "membership is preserved by larger lambda and larger k",
        suites::monotonicity(ExecMode::Parallel, sub_seed(seed, 5), SUITE_CASES),
    ))
}

fn scaling(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "def2.1-scaling",
        "Definition 2.1",
        "cT is a member at lambda |c|^(n-1) exactly when T is at lambda",
        suites::scaling(ExecMode::Parallel, sub_seed(seed, 6), SUITE_CASES),
    ))
}

fn prop26_suite(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "prop2.6-restriction",
        "Proposition 2.6",
        "restriction to an invariant subspace stays in the class",
        suites::restriction(ExecMode::Parallel, sub_seed(seed, 7), SUITE_CASES),
    ))
}

fn prop27_suite(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "prop2.7-isometry-product",
        "Proposition 2.7",
        "TS is a member for a commuting isometry S",
        suites::isometry_product(ExecMode::Parallel, sub_seed(seed, 8), SUITE_CASES),
    ))
}

fn prop28_suite(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "prop2.8-unitary-conjugation",
        "Proposition 2.8",
        "membership is unitarily invariant",
        suites::unitary_conjugation(ExecMode::Parallel, sub_seed(seed, 9), SUITE_CASES),
    ))
}

fn prop29_suite(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "prop2.9-dense-range",
        "Proposition 2.9",
        "dense range of T^k upgrades to n-power posinormal",
        suites::dense_range(ExecMode::Parallel, sub_seed(seed, 10), SUITE_CASES),
    ))
}

fn thm210_suite(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "thm2.10-decomposition",
        "Theorem 2.10",
        "T = [[A, B], [0, C]] with C^k = 0, A n-power posinormal, sigma(T) = sigma(A) ∪ {0}",
        suites::decomposition(ExecMode::Parallel, sub_seed(seed, 11), SUITE_CASES),
    ))
}

fn thm211_suite(seed: u64) -> Result<ClaimRecord> {
    Ok(suite_claim(
        "thm2.11-tensor",
        "Theorem 2.11",
        "T ⊗ S is a member at lambda mu",
        suites::tensor(ExecMode::Parallel, sub_seed(seed, 12), SUITE_CASES),
    ))
}

// Weighted conditional type operators.

fn e_properties(seed: u64) -> Result<ClaimRecord> {
    let (cases, run, bad) = count_cases(sub_seed(seed, 13), |rng| {
        let s = random_setup(rng, 12, 4);
        let p = [1.0, 2.0, 3.0][rng.random_range(0..3)];
        let r = condexp::check_e_properties(&s.space, &s.partition, &s.w, &s.u, p, TOL)?;
        Ok(Some(r.all_hold()))
    })?;
    Ok(claim(
        "sec1-conditional-expectation",
        "Section 1, properties of E",
        "module property, positivity, |E f|^p <= E|f|^p, Hölder, Jensen",
        format!("{cases} random spaces, {run} checked, {bad} with a violated property"),
        status(bad == 0),
    ))
}

fn weighted_suite(seed: u64, f: impl Fn(&condexp::WeightedConditionalOperator) -> Result<bool> + Sync + Send) -> Result<(usize, usize, usize)> {
    count_cases(seed, |rng| {
        let op = random_setup(rng, 12, 4).build()?;
        f(&op).map(Some)
    })
}

fn norm_formula(seed: u64) -> Result<ClaimRecord> {
    let (cases, _, bad) = weighted_suite(sub_seed(seed, 14), |op| Ok(condexp::norm_formula_check(op, TOL).holds))?;
    Ok(claim(
        "sec3-norm-formula",
        "Section 3, norm of T_{w,u}",
        "||T_{w,u}|| = ||(E|w|^2)^(1/2) (E|u|^2)^(1/2)||_inf",
        format!("{cases} random spaces, {bad} deviations above tolerance"),
        status(bad == 0),
    ))
}

fn lemma31(seed: u64) -> Result<ClaimRecord> {
    let (cases, _, bad) = weighted_suite(sub_seed(seed, 15), |op| {
        for m in [0.5, 1.0, 2.0, 3.0] {
            if !condexp::lemma31_check(op, m, TOL)?.holds {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(claim(
        "lemma3.1-powers",
        "Lemma 3.1",
        "closed forms of (T*T)^m and (TT*)^m",
        format!("{cases} random spaces, m in {{0.5, 1, 2, 3}}: {bad} deviations above tolerance"),
        status(bad == 0),
    ))
}

fn thm32_polar(seed: u64) -> Result<ClaimRecord> {
    let (cases, _, bad) = weighted_suite(sub_seed(seed, 16), |op| Ok(condexp::polar_decomposition_check(op, TOL)?.holds))?;
    Ok(claim(
        "thm3.2-polar",
        "Theorem 3.2",
        "closed-form polar factors U and |T|",
        format!("{cases} random spaces, {bad} with residual above tolerance"),
        status(bad == 0),
    ))
}

fn tally_claim(id: &str, location: &str, expected: &str, t: suites::CriterionTally) -> ClaimRecord {
    claim(
        id,
        location,
        expected,
        format!(
            "{} evaluations at lambda_min x {{1/2, 1, 2}}: printed criterion agrees {}, member without printed criterion {}, exact blockwise criterion agrees {}",
            t.evaluations, t.printed_agrees, t.printed_necessity_failures, t.derived_agrees
        ),
        status(t.printed_agrees == t.evaluations),
    )
}

fn thm33(seed: u64) -> Result<ClaimRecord> {
    let t = suites::posinormal_criterion_tally(sub_seed(seed, 17), SUITE_CASES)?;
    Ok(tally_claim("thm3.3-criterion", "Theorem 3.3", "blockwise criterion characterizes posinormality", t))
}

fn thm34(seed: u64) -> Result<ClaimRecord> {
    let t = suites::power_criterion_tally(sub_seed(seed, 18), SUITE_CASES, 2)?;
    Ok(tally_claim("thm3.4-criterion", "Theorem 3.4", "blockwise criterion characterizes 2-power posinormality", t))
}

fn thm35(seed: u64) -> Result<ClaimRecord> {
    let t = suites::quasi_criterion_tally(sub_seed(seed, 19), SUITE_CASES, 1, 2)?;
    Ok(tally_claim("thm3.5-criterion", "Theorem 3.5", "|E(uw)|^(2k+2) <= lambda^2 (E|u|^2)^(2n-1) (E|w|^2)^(2kn-1) characterizes membership", t))
}
