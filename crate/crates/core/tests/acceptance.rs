//! End-to-end acceptance checks. Runs as a plain binary so every check
//! prints exactly one PASS/FAIL line; exits non-zero if any check fails.

mod common;

use std::time::{Duration, Instant};

use dks::cli::bench::{loglog_slope, run_bench, runtime_ratios, BenchConfig, Method};
use dks::dual::{approx_dks_pipeline, max_depth_point, to_dual};
use dks::eps_sample::{build_eps_sample, sample_size_target};
use dks::exact::{brute_force_dks, exact_dks, exact_dks_fast};
use dks::grid::grid_dks;
use dks::instability::{gen_diagonal_case, gen_simplex_case, mdks, Quadrants, DEFAULT_ETA, DEFAULT_JITTER};
use dks::seed::derive_seed;
use dks::two_sample::{threshold, threshold_with, two_sample_test, ThresholdConstants, ThresholdFormula};
use dks::{apply_monotone, PointSet};
use rand::Rng;

use common::{lattice, mixed, rng, uniform};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn within(budget: Duration, start: Instant, body: Outcome) -> Outcome {
    let took = start.elapsed();
    if took > budget {
        Outcome::new(false, format!("{} — over the {:?} budget", body.detail, budget))
    } else {
        body
    }
}

/// Exact sweep against direct enumeration.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0f64;
    let mut failures = 0;
    for i in 0..1000 {
        let d = 1 + i % 3;
        let n = r.gen_range(1..=40);
        let m = r.gen_range(1..=40);
        let p = mixed(&mut r, n, d);
        let q = mixed(&mut r, m, d);
        let a = exact_dks(&p, &q).unwrap().value;
        let b = brute_force_dks(&p, &q).unwrap().value;
        worst = worst.max((a - b).abs());
        if (a - b).abs() > 1e-12 {
            failures += 1;
        }
    }
    within(
        Duration::from_secs(60),
        start,
        Outcome::new(failures == 0, format!("1000 instances, {failures} mismatches, max drift {worst:e}")),
    )
}

/// `exact − eps ≤ grid ≤ exact`.
fn grid_bound() -> Outcome {
    let start = Instant::now();
    let mut failures = 0;
    let mut worst = 0f64;
    for d in [2, 3] {
        for eps in [0.05, 0.1] {
            let mut r = rng(derive_seed(2, (d * 100) as u64 + (eps * 100.0) as u64));
            for _ in 0..200 {
                let p = mixed(&mut r, 200, d);
                let q = mixed(&mut r, 200, d);
                let exact = exact_dks_fast(&p, &q).unwrap().value;
                let g = grid_dks(&p, &q, eps).unwrap().value;
                worst = worst.max(exact - g);
                if g > exact || exact - g > eps {
                    failures += 1;
                }
            }
        }
    }
    within(
        Duration::from_secs(120),
        start,
        Outcome::new(failures == 0, format!("800 instances, {failures} violations, max gap {worst:.4}")),
    )
}

/// Sample-and-dualize estimate within eps of the exact value.
fn pipeline_bound() -> Outcome {
    let start = Instant::now();
    let mut failures = 0;
    let mut worst = 0f64;
    for (d, n, eps, seeds) in [(3, 1500, 0.15, 20u64), (4, 600, 0.25, 10)] {
        for s in 0..seeds {
            let mut r = rng(derive_seed(3, s + 10 * d as u64));
            let p = uniform(&mut r, n, d, 0.0);
            let q = uniform(&mut r, n, d, 0.1);
            let exact = exact_dks_fast(&p, &q).unwrap().value;
            let est = approx_dks_pipeline(&p, &q, eps, s).unwrap().value;
            worst = worst.max((est - exact).abs());
            if (est - exact).abs() > eps {
                failures += 1;
            }
        }
    }
    let target = sample_size_target(3, 0.05);
    within(
        Duration::from_secs(600),
        start,
        Outcome::new(
            failures == 0,
            format!("30 runs, {failures} violations, max error {worst:.4} (per-set sample target {target})"),
        ),
    )
}

/// Maximum depth in the dual equals the primal optimum exactly.
fn primal_dual() -> Outcome {
    let start = Instant::now();
    let mut r = rng(4);
    let mut failures = 0;
    for i in 0..500 {
        let d = 2 + i % 3;
        let n = r.gen_range(1..=40);
        let m = r.gen_range(1..=40);
        let p = mixed(&mut r, n, d);
        let q = mixed(&mut r, m, d);
        let dual = max_depth_point(&to_dual(&p, &q).unwrap()).value;
        if dual != exact_dks(&p, &q).unwrap().value {
            failures += 1;
        }
    }
    within(
        Duration::from_secs(300),
        start,
        Outcome::new(failures == 0, format!("500 instances, {failures} mismatches")),
    )
}

/// Halving keeps every dominating-range fraction within eps.
fn eps_sample_property() -> Outcome {
    let start = Instant::now();
    let n = 2048;
    let eps = 0.1;
    let mut failures = Vec::new();
    let mut worst = 0f64;
    let mut sizes = Vec::new();
    for d in [2, 3] {
        for s in 0..20u64 {
            let mut r = rng(derive_seed(5, s + 100 * d as u64));
            let ps = uniform(&mut r, n, d, 0.0);
            let sample = build_eps_sample(&ps, eps, s).unwrap();
            let err = exact_dks_fast(&ps, &sample.points).unwrap().value;
            worst = worst.max(err);
            let size_ok = sample_size_target(d, eps) >= n / 2 || sample.points.len() <= n / 2;
            if err > eps || !size_ok {
                failures.push((d, s, err, sample.points.len()));
            }
            if s == 0 {
                sizes.push((d, sample.points.len()));
            }
        }
    }
    within(
        Duration::from_secs(600),
        start,
        Outcome::new(
            failures.is_empty(),
            format!("40 runs, max error {worst:.4}, output sizes {sizes:?}, failures {failures:?}"),
        ),
    )
}

fn metric_suite() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let dist = |a: &PointSet, b: &PointSet| exact_dks_fast(a, b).unwrap().value;
    let mut problems = Vec::new();

    for i in 0..1000 {
        let d = 1 + i % 3;
        let sizes: Vec<usize> = (0..3).map(|_| r.gen_range(1..=25)).collect();
        let a = mixed(&mut r, sizes[0], d);
        let b = mixed(&mut r, sizes[1], d);
        let c = mixed(&mut r, sizes[2], d);
        let (ab, ba) = (dist(&a, &b), dist(&b, &a));
        if ab != ba {
            problems.push(format!("asymmetric at {i}"));
        }
        if dist(&a, &c) > ab + dist(&b, &c) + 1e-12 {
            problems.push(format!("triangle at {i}"));
        }
    }

    let mut positive = 0;
    for i in 0..200 {
        let d = 1 + i % 3;
        let n = r.gen_range(1..=20);
        let a = lattice(&mut r, n, d, 5);
        let mut b = lattice(&mut r, n, d, 5);
        let sorted = |p: &PointSet| {
            let mut v = p.to_vecs();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v
        };
        while sorted(&a) == sorted(&b) {
            b = lattice(&mut r, n, d, 5);
        }
        if dist(&a, &b) > 0.0 {
            positive += 1;
        }
    }
    if positive != 200 {
        problems.push(format!("only {positive}/200 distinct pairs at positive distance"));
    }

    let maps: [&dyn Fn(f64) -> f64; 4] = [&|x| x * x * x + 2.0 * x, &|x| x.exp(), &|x| x.atan(), &|x| 3.0 * x - 7.0];
    for i in 0..200 {
        let d = 1 + i % 3;
        let p = mixed(&mut r, 30, d);
        let q = mixed(&mut r, 30, d);
        let chosen: Vec<&dyn Fn(f64) -> f64> = (0..d).map(|j| maps[(i + j) % 4]).collect();
        let union = p.union(&q).unwrap();
        let moved = apply_monotone(&union, &chosen).unwrap();
        let mp = moved.subset(&(0..p.len()).collect::<Vec<_>>());
        let mq = moved.subset(&(p.len()..moved.len()).collect::<Vec<_>>());
        if dist(&mp, &mq) != dist(&p, &q) {
            problems.push(format!("transform changed value at {i}"));
        }
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "symmetry+triangle on 1000 triples, 200 identity pairs, 200 transforms in {:.1}s; problems {problems:?}",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn instability() -> Outcome {
    let n = 400;
    let without = gen_diagonal_case(n, 0.5, false, DEFAULT_JITTER, 7).unwrap();
    let with = gen_diagonal_case(n, 0.5, true, DEFAULT_JITTER, 7).unwrap();
    let m0 = mdks(&without.p, &without.q, Quadrants::All).unwrap();
    let m1 = mdks(&with.p, &with.q, Quadrants::All).unwrap();
    let e0 = exact_dks(&without.p, &without.q).unwrap().value;
    let e1 = exact_dks(&with.p, &with.q).unwrap().value;
    let ratio = m1 / m0;
    let diag_ok = ratio >= 1.8 && (e1 - e0).abs() <= 2.0 / n as f64;

    let (d, alpha) = (3, 0.6);
    let s0 = gen_simplex_case(d, 600, alpha, DEFAULT_ETA, false, 7).unwrap();
    let s1 = gen_simplex_case(d, 600, alpha, DEFAULT_ETA, true, 7).unwrap();
    let quadrant = Quadrants::Oriented(s1.dagger_mask);
    let g0 = mdks(&s0.p, &s0.q, quadrant).unwrap();
    let g1 = mdks(&s1.p, &s1.q, quadrant).unwrap();
    let gap = g1 - g0;
    let simplex_ok = gap >= 0.9 * alpha * (d - 1) as f64 / d as f64;
    Outcome::new(
        diag_ok && simplex_ok,
        format!(
            "diagonal mdks {m0:.4} -> {m1:.4} (ratio {ratio:.3}), exact {e0:.4} -> {e1:.4}; \
             simplex anchored-quadrant {g0:.4} -> {g1:.4} (gap {gap:.4} vs 0.36)"
        ),
    )
}

fn test_level_and_power() -> Outcome {
    let start = Instant::now();
    let (n, delta) = (5000, 0.05);
    let trials = 500;
    let mut rejections = 0;
    for t in 0..trials {
        let mut r = rng(derive_seed(8, t));
        let x = uniform(&mut r, n, 2, 0.0);
        let y = uniform(&mut r, n, 2, 0.0);
        if two_sample_test(&x, &y, delta, t).unwrap().reject {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / trials as f64;
    let limit = delta + 2.0 * (delta * (1.0 - delta) / trials as f64).sqrt();
    let mut power = 0;
    for t in 0..100 {
        let mut r = rng(derive_seed(9, t));
        let x = uniform(&mut r, n, 2, 0.0);
        let y = uniform(&mut r, n, 2, 0.2);
        if two_sample_test(&x, &y, delta, t).unwrap().reject {
            power += 1;
        }
    }
    within(
        Duration::from_secs(900),
        start,
        Outcome::new(
            rate <= limit && power >= 95,
            format!("H0 rejection rate {rate:.4} (limit {limit:.4}), shift rejected {power}/100"),
        ),
    )
}

fn benchmark_shape() -> Outcome {
    let cfg = BenchConfig {
        n_min: 1024,
        n_max: 131072,
        repeats: 5,
        baseline_n_max: 16384,
        ..BenchConfig::default()
    };
    let rows = run_bench(&cfg, |_| {}).unwrap();
    let grid: Vec<(usize, f64)> = runtime_ratios(&rows, Method::Grid)
        .into_iter()
        .filter(|&(n, _)| n >= 8192)
        .collect();
    let base = runtime_ratios(&rows, Method::Baseline);
    let errors: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == Method::Grid)
        .map(|r| (r.n as f64, r.mean_observed_error))
        .collect();
    let slope = loglog_slope(&errors);
    let at = |m: Method| {
        rows.iter()
            .find(|r| r.n == 16384 && r.method == m)
            .map_or(f64::NAN, |r| r.mean_runtime_ms)
    };
    let pass = grid.iter().all(|&(_, x)| x <= 2.5)
        && base.iter().all(|&(_, x)| x >= 3.2)
        && (-0.65..=-0.35).contains(&slope);
    let fmt = |v: &[(usize, f64)]| v.iter().map(|(n, x)| format!("{n}:{x:.2}")).collect::<Vec<_>>().join(" ");
    Outcome::new(
        pass,
        format!(
            "grid ratios [{}], baseline ratios [{}], error slope {slope:.3}; at n=16384 grid {:.1} ms, baseline {:.0} ms",
            fmt(&grid),
            fmt(&base),
            at(Method::Grid),
            at(Method::Baseline)
        ),
    )
}

fn threshold_formulas() -> Outcome {
    let t = threshold(10_000, 0.05, 2).unwrap();
    let by_hand = ((4.0 * (20_000f64).ln() / 10_000.0) * (20f64).ln()).sqrt();
    let value_ok = (t.eps - 0.1089).abs() <= 1e-4 && (t.eps - by_hand).abs() <= 1e-12;
    let crossovers: Vec<f64> = (2..=4)
        .map(|d| ThresholdConstants::for_dim(d).unwrap().crossover_log10_n())
        .collect();
    let cross_ok = crossovers.iter().all(|&c| c > 478.0);
    let mut c = ThresholdConstants::for_dim(2).unwrap();
    c.absolute = 1.0;
    let flipped = threshold_with(10_000, 0.05, 2, c).unwrap();
    let branch_ok = flipped.formula == ThresholdFormula::Absolute
        && flipped.eps == flipped.absolute_candidate
        && t.formula == ThresholdFormula::Log
        && t.eps == t.log_candidate.min(t.absolute_candidate);
    Outcome::new(
        value_ok && cross_ok && branch_ok,
        format!(
            "threshold(1e4, 0.05, 2) = {:.5}; candidates tie at log10 n = {:?}; injected branch {:?}",
            t.eps, crossovers, flipped.formula
        ),
    )
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("exact oracle equivalence", oracle_equivalence),
        ("grid approximation bound", grid_bound),
        ("pipeline approximation bound", pipeline_bound),
        ("primal-dual equivalence", primal_dual),
        ("eps-sample property", eps_sample_property),
        ("metric properties", metric_suite),
        ("mdks instability", instability),
        ("test level and power", test_level_and_power),
        ("benchmark shape", benchmark_shape),
        ("threshold formulas", threshold_formulas),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        if !out.pass {
            failed += 1;
        }
        println!(
            "acceptance {:>2} {:<30} {} ({:.1}s): {}",
            i + 1,
            name,
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} of {} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
