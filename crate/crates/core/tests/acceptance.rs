//! Acceptance gate: one PASS/FAIL line per criterion.

use std::io::Write;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::Rng;

use posilab::condexp::{block_means, discretize_interval_example};
use posilab::fixtures;
use posilab::linalg::{hausdorff_distance, ComplexMatrix, C64};
use posilab::par::ExecMode;
use posilab::posinormal::{certify_min_lambda, gap_matrix, is_member, min_lambda, ClassQuery};
use posilab::random::{case_rng, with_nilpotent_part};
use posilab::structure;
use posilab::suites::{self, bracketing_case, SuiteOutcome};
use posilab::verify::{self, ClaimStatus, DEFAULT_SEED};

const TOL: f64 = 1e-10;
const SEED: u64 = DEFAULT_SEED;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn from_suite(s: SuiteOutcome) -> Outcome {
    let mut detail = format!("{} cases, {} skipped, {} violations", s.cases, s.skipped, s.violations);
    if let Some(f) = s.failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    outcome(s.passed(), detail)
}

fn is_e1(v: &[C64]) -> bool {
    (v[0].norm() - 1.0).abs() <= TOL && v[1..].iter().all(|z| z.norm() <= TOL)
}

// Independent oracle: Cholesky of G + δI by hand, on λ²X*X − Y*Y built from
// plain products, with bisection on λ.

fn power(t: &ComplexMatrix, p: u32) -> ComplexMatrix {
    (0..p).fold(ComplexMatrix::identity(t.rows()), |acc, _| &acc * t)
}

fn cholesky_ok(g: &ComplexMatrix, delta: f64) -> bool {
    let n = g.rows();
    let mut l = vec![vec![C64::from(0.0); n]; n];
    for j in 0..n {
        let mut d = g[(j, j)].re + delta;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let djj = d.sqrt();
        l[j][j] = C64::from(djj);
        for i in j + 1..n {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / djj;
        }
    }
    true
}

fn bisection_lambda(t: &ComplexMatrix, k: u32, n: u32, upper: f64) -> f64 {
    let x = power(t, k + 1);
    let y = &power(&t.adjoint(), n) * &power(t, k);
    let xx = &x.adjoint() * &x;
    let yy = &y.adjoint() * &y;
    let delta = 1e-14 * yy.max_abs().max(xx.max_abs()).max(f64::MIN_POSITIVE);
    let psd = |l: f64| cholesky_ok(&(&xx.scale_real(l * l) - &yy), delta);
    let (mut lo, mut hi) = (0.0, upper.max(1e-12));
    while !psd(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi
}

fn criterion_1() -> Outcome {
    let t = fixtures::shift3();
    let gap = gap_matrix(&t, &ClassQuery::new(3, 2, 1.0).unwrap()).unwrap();
    let accepted = is_member(&t, &ClassQuery::new(3, 2, 1.0).unwrap(), TOL).unwrap().holds;
    let mut rejected = true;
    for lambda in [1.0, 10.0, 1e3, 1e6] {
        let q = ClassQuery::new(0, 2, lambda).unwrap();
        let r = is_member(&t, &q, TOL).unwrap();
        // λ² diag(0, 1, 1) − diag(1, 0, 0)
        let oracle = ComplexMatrix::real_diag(&[-1.0, lambda * lambda, lambda * lambda]);
        let g = gap_matrix(&t, &q).unwrap();
        rejected &= !r.holds && r.witness.as_deref().is_some_and(is_e1) && (&g - &oracle).max_abs() == 0.0;
    }
    let m = min_lambda(&t, 0, 2, TOL).unwrap();
    let certified = !m.feasible && m.kernel_obstruction.as_deref().is_some_and(is_e1);
    outcome(
        accepted && gap.max_abs() == 0.0 && rejected && certified,
        format!("(3,2,1) accepted = {accepted}, zero gap = {}; (0,2) rejected up to 1e6 with e1 = {rejected}; infeasible = {certified}", gap.max_abs() == 0.0),
    )
}

fn criterion_2() -> Outcome {
    let t = fixtures::truncated_shift(6);
    let passes = is_member(&t, &ClassQuery::new(3, 2, 1.0).unwrap(), TOL).unwrap().holds;
    let m = min_lambda(&t, 0, 2, TOL).unwrap();
    // A e₂ = e₁ and A e₁ = 0, so e₁ ∈ ker A with A*² e₁ = e₃
    let obstruction = m.kernel_obstruction.as_deref().is_some_and(|v| {
        let w = t.matvec(v);
        w.iter().map(|z| z.norm()).fold(0.0, f64::max) <= TOL
    });
    outcome(passes && !m.feasible && obstruction, format!("(3,2,1) holds = {passes}; (0,2) feasible = {}", m.feasible))
}

fn criterion_3() -> Outcome {
    let (mut checked, mut bad, mut worst) = (0, Vec::new(), 0.0f64);
    let mut i = 0;
    while checked < 200 {
        let (t, k, n) = bracketing_case(SEED, i);
        i += 1;
        let r = min_lambda(&t, k, n, TOL).unwrap();
        let lambda = match r.lambda_min {
            Some(l) if r.feasible && l > 0.0 => l,
            _ => continue,
        };
        checked += 1;
        let cert = certify_min_lambda(&t, k, n, &r, TOL).unwrap().unwrap();
        let oracle = bisection_lambda(&t, k, n, 2.0 * lambda);
        let rel = (oracle - lambda).abs() / lambda;
        worst = worst.max(rel);
        if !cert.passed() || rel > 1e-7 {
            bad.push(format!("case {} ({k},{n}): {cert:?}, pencil {lambda}, bisection {oracle}", i - 1));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} feasible cases from {i} draws, worst pencil/bisection deviation {worst:.1e}{}", bad.first().map(|b| format!("; first failure {b}")).unwrap_or_default()),
    )
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    let (mut members, mut worst_recon, mut worst_nil, mut worst_union) = (0, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..200 {
        let mut rng = case_rng(SEED ^ 6, i);
        let dim = rng.random_range(2..=8);
        let nil = rng.random_range(1..=dim.min(3));
        let t = with_nilpotent_part(&mut rng, dim, nil);
        let (k, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let m = min_lambda(&t, k, n, TOL).unwrap();
        let q = match m.lambda_min {
            Some(l) if m.feasible => Some(ClassQuery::new(k, n, l.max(1e-6) * (1.0 + 1e-6)).unwrap()),
            _ => None,
        };
        let d = structure::decompose(&t, k, TOL).unwrap();
        let c = structure::check_decomposition(&t, &d, q.as_ref(), TOL).unwrap();
        worst_recon = worst_recon.max(c.reconstruction_residual);
        worst_nil = worst_nil.max(c.nilpotency_residual);
        worst_union = worst_union.max(c.spectrum_union_distance);
        let union = {
            let mut with_zero = c.spectrum_a.clone();
            with_zero.push(C64::from(0.0));
            hausdorff_distance(&posilab::linalg::distinct_values(&c.spectrum_t, 1e-3 * t.max_abs().max(1.0)), &posilab::linalg::distinct_values(&with_zero, 1e-3 * t.max_abs().max(1.0)))
        };
        let member_ok = match (c.member, c.block_a_member) {
            (Some(true), a) => {
                members += 1;
                // an empty range leaves no block A to test
                a == Some(true) || (a.is_none() && d.range_dim() == 0)
            }
            _ => true,
        };
        if d.range_dim() >= dim || c.reconstruction_residual > 1e-8 || c.nilpotency_residual > 1e-8 || union > 1e-6 || !member_ok {
            bad.push(format!("case {i}: dim {dim} k {k} range {} recon {:.1e} nil {:.1e} union {union:.1e} A {:?}", d.range_dim(), c.reconstruction_residual, c.nilpotency_residual, c.block_a_member));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "200 cases, {members} members; worst reconstruction {worst_recon:.1e}, worst ||C^k|| {worst_nil:.1e}, worst union distance {worst_union:.1e}{}",
            bad.first().map(|b| format!("; first failure {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_8() -> Outcome {
    let runs = [
        suites::restriction(ExecMode::Parallel, SEED ^ 81, 100),
        suites::isometry_product(ExecMode::Parallel, SEED ^ 82, 100),
        suites::unitary_conjugation(ExecMode::Parallel, SEED ^ 83, 100),
        suites::dense_range(ExecMode::Parallel, SEED ^ 84, 100),
    ];
    let pass = runs.iter().all(|s| s.passed() && s.cases - s.skipped > 0);
    let detail: Vec<String> = runs.iter().map(|s| format!("{} {}/{} run, {} violations", s.name, s.cases - s.skipped, s.cases, s.violations)).collect();
    outcome(pass, detail.join("; "))
}

fn criterion_10() -> Outcome {
    let s = discretize_interval_example(4096).unwrap();
    let means = |f| block_means(&s.space, &s.partition, &f);
    let ew = means(s.w.abs_sq());
    let eu = means(s.u.abs_sq());
    let euw = means(s.u.mul(&s.w));
    // (1/|B|) ∫_B u w dx: 2·∫₀^{1/2} 2x dx = 1/2 and 2·∫_{1/2}^1 (1 − x) dx = 1/4
    let oracle = [0.5, 0.25];
    let ew_exact = ew == vec![C64::from(4.0), C64::from(1.0)];
    let eu_ok = eu.iter().all(|z| (z.re - 1.0 / 12.0).abs() <= 1e-6 && z.im == 0.0);
    let euw_ok = euw.iter().zip(oracle).all(|(z, o)| (z.re - o).abs() <= 1e-6 && z.im.abs() <= 1e-12);
    let (lhs, rhs) = verify::printed_criterion_arithmetic();
    let arithmetic = lhs == Rational64::new(1, 256) && rhs == Rational64::new(1, 27) && lhs <= rhs;
    let report = verify::run(SEED).unwrap();
    let recorded = report.claim("ex3.6-Euw").is_some_and(|c| {
        c.status == ClaimStatus::Mismatch && c.expected.contains("1/4") && c.computed.contains("0.50000000")
    });
    outcome(
        ew_exact && eu_ok && euw_ok && arithmetic && recorded,
        format!(
            "E|w|^2 = ({}, {}), E|u|^2 = ({:.9}, {:.9}), E(uw) = ({:.9}, {:.9}); {lhs} <= {rhs}; discrepancy recorded = {recorded}",
            ew[0].re, ew[1].re, eu[0].re, eu[1].re, euw[0].re, euw[1].re
        ),
    )
}

fn strip_timings(text: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    serde_json::to_string_pretty(&v).unwrap()
}

const COVERAGE: &[&str] = &[
    "def2.1-", "ex2.2-", "ex2.3-", "prop2.4-", "prop2.4i-", "prop2.4ii-", "cor2.5-", "prop2.6-", "ex-prop2.6-", "prop2.7-", "prop2.8-", "prop2.9-",
    "thm2.10-", "ex-thm2.10-", "thm2.11-", "sec1-", "sec3-norm", "lemma3.1-", "thm3.2-", "thm3.3-", "thm3.4-", "thm3.5-", "ex3.6-",
];

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let texts: Vec<String> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("run{i}.json"));
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_posilab"))
                .args(["paper-verify", "--out", path.to_str().unwrap()])
                .output()
                .unwrap();
            assert_eq!(out.status.code(), Some(0));
            std::fs::read_to_string(path).unwrap()
        })
        .collect();
    let identical = strip_timings(&texts[0]) == strip_timings(&texts[1]);
    let v: serde_json::Value = serde_json::from_str(&texts[0]).unwrap();
    let ids: Vec<&str> = v["claims"].as_array().unwrap().iter().map(|c| c["claim_id"].as_str().unwrap()).collect();
    let missing: Vec<&&str> = COVERAGE.iter().filter(|p| !ids.iter().any(|id| id.starts_with(**p))).collect();
    outcome(
        identical && ids.len() >= 12 && missing.is_empty(),
        format!("identical modulo timings = {identical}, {} claims, uncovered {missing:?}", ids.len()),
    )
}

#[test]
fn acceptance_criteria() {
    type Check = Box<dyn Fn() -> Outcome>;
    let criteria: Vec<(u32, &str, Duration, Check)> = vec![
        (1, "shift example membership and infeasibility", Duration::from_secs(1), Box::new(criterion_1)),
        (2, "truncated shift", Duration::from_secs(1), Box::new(criterion_2)),
        (3, "min_lambda bracketing against bisection", Duration::from_secs(30), Box::new(criterion_3)),
        (4, "lambda and k monotonicity", Duration::from_secs(30), Box::new(|| from_suite(suites::monotonicity(ExecMode::Parallel, SEED ^ 4, 500)))),
        (5, "scaling covariance", Duration::from_secs(20), Box::new(|| from_suite(suites::scaling(ExecMode::Parallel, SEED ^ 5, 200)))),
        (6, "decomposition", Duration::from_secs(60), Box::new(criterion_6)),
        (7, "tensor products", Duration::from_secs(60), Box::new(|| from_suite(suites::tensor(ExecMode::Parallel, SEED ^ 7, 200)))),
        (8, "closure under restriction, isometries, conjugation, dense range", Duration::from_secs(60), Box::new(criterion_8)),
        (9, "power identities, norm formula, polar factors", Duration::from_secs(30), Box::new(|| from_suite(suites::weighted_operators(ExecMode::Parallel, SEED ^ 9, 100)))),
        (10, "interval example at N = 4096", Duration::from_secs(5), Box::new(criterion_10)),
        (11, "report determinism and coverage", Duration::from_secs(180), Box::new(criterion_11)),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        let _ = writeln!(
            out,
            "criterion {id:>2} {}: {name} ({:.2}s of {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
