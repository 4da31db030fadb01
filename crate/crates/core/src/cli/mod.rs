//! Command implementations behind the `dks` binary: CSV input, JSON
//! reports, and the benchmark's CSV and SVG outputs.
//!
//! Reports carry every input, the seed and the crate version. Apart from
//! `runtime_ms`, the same inputs and seed produce byte-identical JSON.

pub mod bench;
pub mod csvio;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::dual::approx_dks_pipeline;
use crate::error::DksError;
use crate::exact::exact_dks_fast;
use crate::grid::grid_dks;
use crate::instability::{gen_diagonal_case, gen_simplex_case, mdks, Quadrants, DEFAULT_ETA, DEFAULT_JITTER};
use crate::points::DominatingRange;
use crate::two_sample::{two_sample_test, TestReport};

pub use csvio::{load_csv, parse_csv, save_csv, write_csv};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Validation(#[from] DksError),

    #[error("{origin}{}: {message}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
    Input {
        origin: String,
        line: Option<u64>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Input { .. } => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

/// Exit code of the `test` command when H₀ is rejected.
pub const EXIT_REJECT: i32 = 3;

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `out`, or to stdout when `None`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceConfig {
    pub p: PathBuf,
    pub q: PathBuf,
    pub dim: usize,
    /// `None` computes the exact value.
    pub eps: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Exact,
    Grid,
    Pipeline,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs: DistanceConfig,
    pub n_p: usize,
    pub n_q: usize,
    pub method: DistanceMethod,
    pub value: f64,
    pub witness: DominatingRange,
    pub runtime_ms: f64,
}

/// Exact for `eps = None`, the grid for `d ≤ 2`, otherwise the
/// sample-and-dualize pipeline.
pub fn cmd_distance(cfg: &DistanceConfig) -> Result<DistanceReport, CliError> {
    let p = load_csv(&cfg.p, cfg.dim)?;
    let q = load_csv(&cfg.q, cfg.dim)?;
    let start = Instant::now();
    let (method, value, witness) = match cfg.eps {
        None => {
            let r = exact_dks_fast(&p, &q)?;
            (DistanceMethod::Exact, r.value, r.witness)
        }
        Some(eps) if cfg.dim <= 2 => {
            let r = grid_dks(&p, &q, eps)?;
            (DistanceMethod::Grid, r.value, r.witness)
        }
        Some(eps) => {
            let r = approx_dks_pipeline(&p, &q, eps, cfg.seed)?;
            (DistanceMethod::Pipeline, r.value, r.witness)
        }
    };
    Ok(DistanceReport {
        command: "distance",
        version: VERSION,
        inputs: cfg.clone(),
        n_p: p.len(),
        n_q: q.len(),
        method,
        value,
        witness,
        runtime_ms: elapsed_ms(start),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestConfig {
    pub x: PathBuf,
    pub y: PathBuf,
    pub dim: usize,
    pub delta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestCommandReport {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs: TestConfig,
    #[serde(flatten)]
    pub result: TestReport,
}

pub fn cmd_test(cfg: &TestConfig) -> Result<TestCommandReport, CliError> {
    let x = load_csv(&cfg.x, cfg.dim)?;
    let y = load_csv(&cfg.y, cfg.dim)?;
    Ok(TestCommandReport {
        command: "test",
        version: VERSION,
        inputs: cfg.clone(),
        result: two_sample_test(&x, &y, cfg.delta, cfg.seed)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Diagonal,
    Simplex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityConfig {
    pub case: CaseKind,
    pub alpha: f64,
    pub n: usize,
    pub with_dagger: bool,
    /// Simplex offset; ignored by the diagonal case.
    pub eta: f64,
    /// Simplex dimension; the diagonal case is always planar.
    pub dim: usize,
    pub jitter: f64,
    pub seed: u64,
}

impl InstabilityConfig {
    pub fn new(case: CaseKind, alpha: f64, n: usize, with_dagger: bool, seed: u64) -> Self {
        Self {
            case,
            alpha,
            n,
            with_dagger,
            eta: DEFAULT_ETA,
            dim: match case {
                CaseKind::Diagonal => 2,
                CaseKind::Simplex => 3,
            },
            jitter: DEFAULT_JITTER,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstabilityReport {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs: InstabilityConfig,
    pub n_p: usize,
    pub n_q: usize,
    pub dagger: Option<Vec<f64>>,
    pub dagger_mask: u32,
    pub mdks_single: f64,
    pub mdks_all: f64,
    /// mdKS restricted to the orientation through which `p†` acts.
    pub mdks_dagger_quadrant: f64,
    pub exact_dks: f64,
    pub runtime_ms: f64,
}

pub fn cmd_instability(cfg: &InstabilityConfig) -> Result<InstabilityReport, CliError> {
    let start = Instant::now();
    let case = match cfg.case {
        CaseKind::Diagonal => {
            if cfg.dim != 2 {
                return Err(DksError::UnsupportedDimension { dim: cfg.dim, supported: "2" }.into());
            }
            gen_diagonal_case(cfg.n, cfg.alpha, cfg.with_dagger, cfg.jitter, cfg.seed)?
        }
        CaseKind::Simplex => gen_simplex_case(cfg.dim, cfg.n, cfg.alpha, cfg.eta, cfg.with_dagger, cfg.seed)?,
    };
    let (p, q) = (&case.p, &case.q);
    Ok(InstabilityReport {
        command: "instability",
        version: VERSION,
        inputs: cfg.clone(),
        n_p: p.len(),
        n_q: q.len(),
        mdks_single: mdks(p, q, Quadrants::Single)?,
        mdks_all: mdks(p, q, Quadrants::All)?,
        mdks_dagger_quadrant: mdks(p, q, Quadrants::Oriented(case.dagger_mask))?,
        exact_dks: exact_dks_fast(p, q)?.value,
        dagger: case.dagger,
        dagger_mask: case.dagger_mask,
        runtime_ms: elapsed_ms(start),
    })
}
