//! Command-line front end.
//!
//! Every command prints a JSON report to stdout or to `--out`. Exit status is
//! 0 on a clean run whatever the verdict, 1 on invalid input and 2 on a
//! numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::condexp;
use crate::error::{Error, Result};
use crate::io::{parse_matrix, parse_space};
use crate::linalg::ComplexMatrix;
use crate::posinormal::{self, ClassQuery};
use crate::structure;
use crate::verify;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "posilab", version, about = "Membership, decomposition and weighted operator checks for k-quasi n-power posinormal operators")]
pub struct Cli {
    /// Relative PSD and rank tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed for randomized probes and suites.
    #[arg(long, global = true, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Query {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CondexpCheck {
    Norm,
    Lemma31,
    Polar,
    Thm33,
    Thm34,
    Thm35,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide membership at (k, n, λ).
    Check {
        matrix: PathBuf,
        #[command(flatten)]
        query: Query,
    },
    /// Minimal λ for (k, n) with its bracketing certificate.
    LambdaMin {
        matrix: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
    /// Split along the closure of range Tᵏ and ker T*ᵏ.
    Decompose {
        matrix: PathBuf,
        #[arg(long)]
        k: u32,
        /// With --n, also test T and the block A; λ defaults to just above λ_min.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, requires = "n")]
        lambda: Option<f64>,
    },
    /// Membership of T ⊗ S at λμ.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        query: Query,
        #[arg(long)]
        mu: f64,
    },
    /// Weighted conditional type operator checks on a measure-space file.
    Condexp {
        space: PathBuf,
        check: CondexpCheck,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        lambda: Option<f64>,
        /// Power for the lemma31 check.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Run every worked example and invariant suite and emit the claim report.
    PaperVerify,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid("file", format!("{}: {e}", path.display())))
}

fn matrix(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&read(path)?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialise")
}

fn query(q: &Query) -> Result<ClassQuery> {
    ClassQuery::new(q.k, q.n, q.lambda)
}

fn need_lambda(lambda: Option<f64>) -> Result<f64> {
    lambda.ok_or_else(|| Error::invalid("lambda", "this check needs --lambda"))
}

/// Runs a parsed command and returns the report text.
pub fn execute(cli: &Cli) -> Result<String> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tol", "must be positive and finite"));
    }
    Ok(match &cli.command {
        Command::Check { matrix: path, query: q } => {
            let q = query(q)?;
            let r = posinormal::is_member(&matrix(path)?, &q, tol)?;
            to_json(&json!({ "query": q, "report": r }))
        }
        Command::LambdaMin { matrix: path, k, n } => {
            let t = matrix(path)?;
            let r = posinormal::min_lambda(&t, *k, *n, tol)?;
            let cert = posinormal::certify_min_lambda(&t, *k, *n, &r, tol)?;
            to_json(&json!({ "k": k, "n": n, "result": r, "certificate": cert }))
        }
        Command::Decompose { matrix: path, k, n, lambda } => {
            let t = matrix(path)?;
            let q = match (n, lambda) {
                (Some(n), Some(l)) => Some(ClassQuery::new(*k, *n, *l)?),
                (Some(n), None) => {
                    let r = posinormal::min_lambda(&t, *k, *n, tol)?;
                    match r.lambda_min {
                        Some(l) if r.feasible && l > 0.0 => Some(ClassQuery::new(*k, *n, l * posinormal::CERT_UPPER)?),
                        _ => None,
                    }
                }
                _ => None,
            };
            let d = structure::decompose(&t, *k, tol)?;
            let c = structure::check_decomposition(&t, &d, q.as_ref(), tol)?;
            to_json(&json!({ "k": k, "query": q, "check": c }))
        }
        Command::Tensor { a, b, query: q, mu } => {
            let qt = query(q)?;
            let qs = ClassQuery::new(q.k, q.n, *mu)?;
            let r = structure::tensor_check(&matrix(a)?, &matrix(b)?, &qt, &qs, tol)?;
            to_json(&r)
        }
        Command::Condexp { space, check, k, n, lambda, m } => {
            let op = parse_space(&read(space)?)?.build()?;
            match check {
                CondexpCheck::Norm => to_json(&condexp::norm_formula_check(&op, tol)),
                CondexpCheck::Lemma31 => to_json(&condexp::lemma31_check(&op, *m, tol)?),
                CondexpCheck::Polar => to_json(&condexp::polar_decomposition_check(&op, tol)?),
                CondexpCheck::Thm33 => to_json(&condexp::thm33_check(&op, need_lambda(*lambda)?, tol)?),
                CondexpCheck::Thm34 => to_json(&condexp::thm34_check(&op, *n, need_lambda(*lambda)?, tol)?),
                CondexpCheck::Thm35 => to_json(&condexp::thm35_check(&op, *k, *n, need_lambda(*lambda)?, tol)?),
            }
        }
        Command::PaperVerify => verify::run(cli.seed)?.to_json(),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::invalid("out", format!("{}: {e}", p.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::invalid("stdout", e.to_string())),
            _ => Ok(()),
        },
    }
}

pub fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|text| emit(cli.out.as_deref(), &text)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
