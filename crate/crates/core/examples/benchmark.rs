//! Grid estimator against the quadratic exact sweep on uniform samples,
//! written as CSV and an SVG plot.
//!
//! cargo run --release --example benchmark -- [n_max] [repeats]

use dks::cli::bench::{loglog_slope, render_svg, run_bench, write_rows_csv, BenchConfig, Method};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n_max = args.next().map_or(Ok(16384), |s| s.parse())?;
    let repeats = args.next().map_or(Ok(3), |s| s.parse())?;
    let cfg = BenchConfig {
        n_max,
        repeats,
        ..BenchConfig::default()
    };
    let rows = run_bench(&cfg, |r| {
        println!("n {:>7} {:>8} {:>10.2} ms   error {:.5}", r.n, r.method.name(), r.mean_runtime_ms, r.mean_observed_error);
    })?;
    let errors: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == Method::Grid)
        .map(|r| (r.n as f64, r.mean_observed_error))
        .collect();
    if errors.len() >= 2 {
        println!("grid error log-log slope {:.3}", loglog_slope(&errors));
    }
    let dir = std::env::temp_dir();
    write_rows_csv(&rows, std::fs::File::create(dir.join("dks_bench.csv"))?)?;
    std::fs::write(dir.join("dks_bench.svg"), render_svg(&rows))?;
    println!("wrote {}", dir.join("dks_bench.{csv,svg}").display());
    Ok(())
}
