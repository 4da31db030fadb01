//! δ-level two-sample testing with an approximate dKS statistic.
//!
//! The decision threshold is `ε(n, δ) = min{ sqrt(a_d ln(b_d n)/n · ln(1/δ)),
//! sqrt(2205 d/n · ln(1/δ)) }` with `(a_d, b_d) = (4, 2), (6, 3), (8, 3)` for
//! `d = 2, 3, 4`. All logarithms are natural. The statistic is computed to
//! accuracy `ε` itself and the test rejects when it reaches `ε`.

use std::time::Instant;

use serde::Serialize;

use crate::dual::approx_dks_pipeline;
use crate::error::{DksError, Result};
use crate::grid::grid_dks;
use crate::points::{check_pair, PointSet};
use crate::seed::derive_seed;

/// Constants behind the threshold for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdConstants {
    /// `a_d` in `a_d ln(b_d n)`.
    pub log_coef: f64,
    /// `b_d` in `a_d ln(b_d n)`.
    pub log_scale: f64,
    /// The absolute `C_d`, `2205 d`.
    pub absolute: f64,
    /// `α_d, β_d` of the validity condition `ln(β_d² n/α_d) ln(1/δ) < sqrt(n/α_d)`.
    pub alpha: f64,
    pub beta: f64,
}

impl ThresholdConstants {
    pub fn for_dim(d: usize) -> Result<Self> {
        let (log_coef, log_scale, alpha, beta) = match d {
            2 => (4.0, 2.0, 4.0, 8.0),
            3 => (6.0, 3.0, 6.0, 18.0),
            4 => (8.0, 3.0, 8.0, 24.0),
            _ => {
                return Err(DksError::UnsupportedDimension {
                    dim: d,
                    supported: "2, 3, 4",
                })
            }
        };
        Ok(Self {
            log_coef,
            log_scale,
            absolute: 2205.0 * d as f64,
            alpha,
            beta,
        })
    }

    /// `log10 n` at which both candidates are equal:
    /// `a_d ln(b_d n) = 2205 d`. Worked symbolically; `n` itself overflows.
    pub fn crossover_log10_n(&self) -> f64 {
        (self.absolute / self.log_coef - self.log_scale.ln()) / std::f64::consts::LN_10
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdFormula {
    Log,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub eps: f64,
    /// Which candidate was the smaller one.
    pub formula: ThresholdFormula,
    pub n: usize,
    pub delta: f64,
    pub dim: usize,
    pub log_candidate: f64,
    pub absolute_candidate: f64,
    /// Whether `n` is large enough for the closed form's derivation.
    pub condition_ok: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(DksError::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must lie in (0, 1)",
        })
    }
}

pub fn threshold(n: usize, delta: f64, d: usize) -> Result<Threshold> {
    threshold_with(n, delta, d, ThresholdConstants::for_dim(d)?)
}

/// [`threshold`] with explicit constants.
pub fn threshold_with(n: usize, delta: f64, d: usize, c: ThresholdConstants) -> Result<Threshold> {
    check_delta(delta)?;
    if n < 2 {
        return Err(DksError::TooFewPoints { min: 2, found: n });
    }
    let nf = n as f64;
    let l = (1.0 / delta).ln();
    let log_candidate = (c.log_coef * (c.log_scale * nf).ln() / nf * l).sqrt();
    let absolute_candidate = (c.absolute / nf * l).sqrt();
    let (eps, formula) = if absolute_candidate < log_candidate {
        (absolute_candidate, ThresholdFormula::Absolute)
    } else {
        (log_candidate, ThresholdFormula::Log)
    };
    let condition_ok = (c.beta * c.beta * nf / c.alpha).ln() * l < (nf / c.alpha).sqrt();
    Ok(Threshold {
        eps,
        formula,
        n,
        delta,
        dim: d,
        log_candidate,
        absolute_candidate,
        condition_ok,
    })
}

/// `max(1, ⌈2 ln(1/δ)⌉)`.
pub fn amplification_runs(delta: f64) -> Result<usize> {
    check_delta(delta)?;
    Ok(((2.0 * (1.0 / delta).ln()).ceil() as usize).max(1))
}

/// Median of `amplification_runs(delta)` runs of `estimator`, each given an
/// independent seed derived from `seed`. Even counts average the middle two.
pub fn median_amplify<F>(mut estimator: F, delta: f64, seed: u64) -> Result<f64>
where
    F: FnMut(u64) -> Result<f64>,
{
    let r = amplification_runs(delta)?;
    let mut values = (0..r as u64)
        .map(|i| estimator(derive_seed(seed, i)))
        .collect::<Result<Vec<f64>>>()?;
    values.sort_by(f64::total_cmp);
    Ok(if r % 2 == 1 {
        values[r / 2]
    } else {
        0.5 * (values[r / 2 - 1] + values[r / 2])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Grid,
    Pipeline,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub threshold: Threshold,
    pub reject: bool,
    pub dim: usize,
    pub n: usize,
    pub delta: f64,
    pub estimator: Estimator,
    pub seed: u64,
    pub repeats: usize,
    pub runtime_ms: f64,
}

/// Tests `H₀: X and Y come from the same distribution` at level `delta`.
pub fn two_sample_test(x: &PointSet, y: &PointSet, delta: f64, seed: u64) -> Result<TestReport> {
    check_pair(x, y)?;
    if x.len() != y.len() {
        return Err(DksError::UnequalSampleSizes {
            left: x.len(),
            right: y.len(),
        });
    }
    let d = x.dim();
    let th = threshold(x.len(), delta, d)?;
    let eps = th.eps.min(1.0);
    let estimator = if d == 2 { Estimator::Grid } else { Estimator::Pipeline };
    let start = Instant::now();
    let statistic = median_amplify(
        |s| match estimator {
            Estimator::Grid => Ok(grid_dks(x, y, eps)?.value),
            Estimator::Pipeline => Ok(approx_dks_pipeline(x, y, eps, s)?.value),
        },
        delta,
        seed,
    )?;
    Ok(TestReport {
        statistic,
        reject: statistic >= th.eps,
        dim: d,
        n: x.len(),
        delta,
        estimator,
        seed,
        repeats: amplification_runs(delta)?,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        threshold: th,
    })
}
