use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dks::cli::bench::{self, BenchConfig, BenchSummary, Method, Preset};
use dks::cli::{self, CaseKind, CliError, DistanceConfig, InstabilityConfig, TestConfig, EXIT_REJECT};
use dks::seed::DEFAULT_SEED;

#[derive(Parser)]
#[command(name = "dks", version, about = "Multidimensional Kolmogorov-Smirnov distance and two-sample test")]
struct Args {
    /// RNG seed for every randomized step.
    #[arg(long, global = true, env = "DKS_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two CSV point sets.
    Distance {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        dim: usize,
        /// Additive accuracy; omit (or pass --exact) for the exact value.
        #[arg(long, conflicts_with = "exact")]
        eps: Option<f64>,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-delta two-sample test; exits with 3 when H0 is rejected.
    Test {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid estimator against the exact sweep on uniform samples.
    Bench {
        #[arg(long, value_enum, default_value_t = PresetArg::Uniform2d)]
        preset: PresetArg,
        #[arg(long, default_value_t = 1024)]
        n_min: usize,
        #[arg(long, default_value_t = 16384)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        /// Largest n at which the quadratic baseline still runs.
        #[arg(long, default_value_t = 16384)]
        baseline_n_max: usize,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// mdKS on the constructions where one added point changes it sharply.
    Instability {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long)]
        with_dagger: bool,
        #[arg(long)]
        eta: Option<f64>,
        /// Simplex dimension (3 or 4).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Uniform2d,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Diagonal,
    Simplex,
}

fn run(args: Args) -> Result<i32, CliError> {
    let seed = args.seed;
    match args.command {
        Command::Distance { p, q, dim, eps, exact: _, out } => {
            let report = cli::cmd_distance(&DistanceConfig { p, q, dim, eps, seed })?;
            cli::emit(&cli::to_json(&report)?, out.as_deref())?;
            Ok(0)
        }
        Command::Test { x, y, dim, delta, out } => {
            let report = cli::cmd_test(&TestConfig { x, y, dim, delta, seed })?;
            if !report.result.threshold.condition_ok {
                eprintln!("warning: n = {} is below the range where the threshold's derivation holds", report.result.n);
            }
            cli::emit(&cli::to_json(&report)?, out.as_deref())?;
            Ok(if report.result.reject { EXIT_REJECT } else { 0 })
        }
        Command::Bench {
            preset,
            n_min,
            n_max,
            repeats,
            baseline_n_max,
            out_csv,
            out_svg,
        } => {
            let config = BenchConfig {
                preset: match preset {
                    PresetArg::Uniform2d => Preset::Uniform2d,
                },
                n_min,
                n_max,
                repeats,
                baseline_n_max,
                seed,
            };
            let rows = bench::run_bench(&config, |r| {
                eprintln!("n={:>7} {:>8} {:>10.3} ms  error {:.5}", r.n, r.method.name(), r.mean_runtime_ms, r.mean_observed_error);
            })?;
            if let Some(path) = &out_csv {
                bench::write_rows_csv(&rows, std::fs::File::create(path)?)?;
            }
            if let Some(path) = &out_svg {
                std::fs::write(path, bench::render_svg(&rows))?;
            }
            let errors: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.method == Method::Grid && r.mean_observed_error > 0.0)
                .map(|r| (r.n as f64, r.mean_observed_error))
                .collect();
            let summary = BenchSummary {
                command: "bench",
                version: cli::VERSION,
                config,
                out_csv,
                out_svg,
                error_loglog_slope: (errors.len() >= 2).then(|| bench::loglog_slope(&errors)),
                rows,
            };
            cli::emit(&cli::to_json(&summary)?, None)?;
            Ok(0)
        }
        Command::Instability {
            case,
            alpha,
            n,
            with_dagger,
            eta,
            dim,
            out,
        } => {
            let kind = match case {
                CaseArg::Diagonal => CaseKind::Diagonal,
                CaseArg::Simplex => CaseKind::Simplex,
            };
            let mut config = InstabilityConfig::new(kind, alpha, n, with_dagger, seed);
            if let Some(eta) = eta {
                config.eta = eta;
            }
            if let Some(dim) = dim {
                config.dim = dim;
            }
            let report = cli::cmd_instability(&config)?;
            cli::emit(&cli::to_json(&report)?, out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
