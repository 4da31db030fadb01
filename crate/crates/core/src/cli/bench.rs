//! Runtime and error of the grid estimator against the quadratic exact
//! sweep, on two independent uniform samples of the unit square.
//!
//! Both samples come from the same distribution, so the true distance is 0
//! and the observed error of an estimate is the estimate itself.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::CliError;
use crate::error::DksError;
use crate::exact::exact_dks;
use crate::grid::grid_dks;
use crate::points::PointSet;
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Uniform2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Grid,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Grid => "grid",
            Method::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub preset: Preset,
    pub n_min: usize,
    pub n_max: usize,
    pub repeats: usize,
    /// The exact sweep is skipped above this size.
    pub baseline_n_max: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Uniform2d,
            n_min: 1024,
            n_max: 16384,
            repeats: 20,
            baseline_n_max: 16384,
            seed: crate::seed::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub method: Method,
    pub mean_runtime_ms: f64,
    pub mean_observed_error: f64,
    pub repeats: usize,
}

/// `n_min, 2 n_min, …` up to `n_max`.
pub fn doubling_schedule(n_min: usize, n_max: usize) -> Vec<usize> {
    std::iter::successors(Some(n_min), |&n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect()
}

fn uniform_square(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::from_flat(2, (0..2 * n).map(|_| rng.gen::<f64>()).collect()).expect("finite coordinates")
}

fn validate(cfg: &BenchConfig) -> Result<(), DksError> {
    if cfg.repeats == 0 {
        return Err(DksError::InvalidParameter {
            name: "repeats",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    if cfg.n_min < 2 || cfg.n_max < cfg.n_min {
        return Err(DksError::InvalidParameter {
            name: "n_max",
            value: cfg.n_max as f64,
            reason: "must be at least n_min, which must be at least 2",
        });
    }
    Ok(())
}

/// Runs the schedule; `progress` sees each row as it completes.
pub fn run_bench(cfg: &BenchConfig, mut progress: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>, CliError> {
    validate(cfg)?;
    let mut rows = Vec::new();
    for n in doubling_schedule(cfg.n_min, cfg.n_max) {
        let eps = (1.0 / (n as f64).sqrt()).min(1.0);
        let mut methods = vec![Method::Grid];
        if n <= cfg.baseline_n_max {
            methods.push(Method::Baseline);
        }
        for method in methods {
            let mut time = 0.0;
            let mut err = 0.0;
            // One untimed call per size so the timed repeats do not pay for
            // first-touch allocation of a larger cell array.
            if method == Method::Grid {
                let s = derive_seed(cfg.seed, n as u64);
                let (p, q) = (uniform_square(n, derive_seed(s, 0)), uniform_square(n, derive_seed(s, 1)));
                grid_dks(&p, &q, eps)?;
            }
            for r in 0..cfg.repeats as u64 {
                let s = derive_seed(derive_seed(cfg.seed, n as u64), r);
                let p = uniform_square(n, derive_seed(s, 0));
                let q = uniform_square(n, derive_seed(s, 1));
                let start = Instant::now();
                let value = match method {
                    Method::Grid => grid_dks(&p, &q, eps)?.value,
                    Method::Baseline => exact_dks(&p, &q)?.value,
                };
                time += start.elapsed().as_secs_f64() * 1e3;
                err += value;
            }
            let row = BenchRow {
                n,
                method,
                mean_runtime_ms: time / cfg.repeats as f64,
                mean_observed_error: err / cfg.repeats as f64,
                repeats: cfg.repeats,
            };
            progress(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_rows_csv<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,method,mean_runtime_ms,mean_observed_error,repeats")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:?},{:?},{}",
            r.n,
            r.method.name(),
            r.mean_runtime_ms,
            r.mean_observed_error,
            r.repeats
        )?;
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `time(2n) / time(n)` for consecutive rows of one method.
pub fn runtime_ratios(rows: &[BenchRow], method: Method) -> Vec<(usize, f64)> {
    let series: Vec<&BenchRow> = rows.iter().filter(|r| r.method == method).collect();
    series
        .windows(2)
        .map(|w| (w[0].n, w[1].mean_runtime_ms / w[0].mean_runtime_ms))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub command: &'static str,
    pub version: &'static str,
    pub config: BenchConfig,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub rows: Vec<BenchRow>,
    pub error_loglog_slope: Option<f64>,
}

/// Two log-log panels: mean runtime and mean observed error against `n`.
pub fn render_svg(rows: &[BenchRow]) -> String {
    const W: f64 = 420.0;
    const H: f64 = 320.0;
    const PAD: f64 = 56.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="11">"#,
        2.0 * W,
        H
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    type Metric = fn(&BenchRow) -> f64;
    let panels: [(&str, Metric); 2] = [
        ("runtime (ms)", |r| r.mean_runtime_ms),
        ("observed error", |r| r.mean_observed_error),
    ];
    for (k, (label, metric)) in panels.iter().enumerate() {
        let x0 = k as f64 * W;
        let pts: Vec<(f64, f64, Method)> = rows
            .iter()
            .map(|r| (r.n as f64, metric(r), r.method))
            .filter(|p| p.0 > 0.0 && p.1 > 0.0)
            .collect();
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="18" text-anchor="middle">{label} vs n (log-log)</text>"#,
            x0 + W / 2.0
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x0 + PAD,
            W - 1.5 * PAD,
            H - 2.0 * PAD
        );
        if pts.is_empty() {
            continue;
        }
        let span = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x.ln()), b.max(x.ln())));
            if hi - lo < 1e-9 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (xl, xh) = span(&mut pts.iter().map(|p| p.0));
        let (yl, yh) = span(&mut pts.iter().map(|p| p.1));
        let sx = |x: f64| x0 + PAD + (x.ln() - xl) / (xh - xl) * (W - 1.5 * PAD);
        let sy = |y: f64| H - PAD - (y.ln() - yl) / (yh - yl) * (H - 2.0 * PAD);
        for (method, color) in [(Method::Grid, "#1f77b4"), (Method::Baseline, "#d62728")] {
            let series: Vec<String> = pts
                .iter()
                .filter(|p| p.2 == method)
                .map(|p| format!("{:.1},{:.1}", sx(p.0), sy(p.1)))
                .collect();
            if series.is_empty() {
                continue;
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                series.join(" ")
            );
            for s in &series {
                let (cx, cy) = s.split_once(',').expect("formatted pair");
                let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="start">n = {:.0}</text><text x="{}" y="{}" text-anchor="end">{:.0}</text>"#,
            x0 + PAD,
            H - PAD + 16.0,
            xl.exp(),
            x0 + W - 0.5 * PAD,
            H - PAD + 16.0,
            xh.exp()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text><text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#,
            x0 + PAD - 4.0,
            H - PAD,
            yl.exp(),
            x0 + PAD - 4.0,
            PAD + 8.0,
            yh.exp()
        );
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" fill="#1f77b4">grid</text><text x="{}" y="{}" fill="#d62728">baseline</text>"##,
            x0 + PAD + 8.0,
            PAD + 16.0,
            x0 + PAD + 48.0,
            PAD + 16.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule() {
        assert_eq!(doubling_schedule(1024, 8192), vec![1024, 2048, 4096, 8192]);
        assert_eq!(doubling_schedule(1024, 3000), vec![1024, 2048]);
        assert!(doubling_schedule(10, 5).is_empty());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, (k as f64).powf(-0.5) * 3.0)).collect();
        assert!((loglog_slope(&pts) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_bench_rows() {
        let cfg = BenchConfig {
            n_min: 64,
            n_max: 256,
            repeats: 2,
            baseline_n_max: 128,
            ..BenchConfig::default()
        };
        let rows = run_bench(&cfg, |_| {}).unwrap();
        let methods: Vec<(usize, Method)> = rows.iter().map(|r| (r.n, r.method)).collect();
        assert_eq!(
            methods,
            vec![
                (64, Method::Grid),
                (64, Method::Baseline),
                (128, Method::Grid),
                (128, Method::Baseline),
                (256, Method::Grid)
            ]
        );
        for r in &rows {
            assert!(r.mean_observed_error >= 0.0 && r.mean_observed_error <= 1.0);
        }
        // the grid never overshoots the exact value on the same samples
        assert!(rows[0].mean_observed_error <= rows[1].mean_observed_error);
        let mut csv = Vec::new();
        write_rows_csv(&rows, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 6);
        let svg = render_svg(&rows);
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    }

    #[test]
    fn rejects_zero_repeats() {
        let cfg = BenchConfig {
            repeats: 0,
            ..BenchConfig::default()
        };
        assert_eq!(run_bench(&cfg, |_| {}).unwrap_err().exit_code(), 2);
    }
}
