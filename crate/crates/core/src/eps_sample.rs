//! ε-samples by repeated low-discrepancy coloring and halving.
//!
//! Each round colors the current set with a self-balancing walk, keeps the
//! `+1` class and discards the rest. A round whose coloring has discrepancy
//! `D` over dominating ranges and signed total `s` moves every range
//! fraction by at most `(D + |s|) / (n + s)`; rounds are accepted while the
//! running sum of these measured bounds stays within the requested `eps`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dominance::extreme_dominance_sums;
use crate::error::{DksError, Result};
use crate::points::{Bound, PointSet};
use crate::seed::derive_seed;

/// Largest input accepted by [`eval_discrepancy`] for dominating ranges.
pub const MAX_DISCREPANCY_POINTS: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedColoring {
    pub chi: Vec<i8>,
    pub seed: u64,
}

impl SignedColoring {
    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.chi.iter().map(|&c| c as i64).sum()
    }

    fn weights(&self) -> Vec<i64> {
        self.chi.iter().map(|&c| c as i64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeFamily {
    /// `{ x ⪯ z }`
    Dominating,
    /// `{ lo ≺ x ⪯ hi }`
    Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsProvenance {
    pub seed: u64,
    /// Size before the first round, then after each accepted round.
    pub sizes: Vec<usize>,
    /// Measured error bound of each accepted round.
    pub round_bounds: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsSample {
    #[serde(skip)]
    pub points: PointSet,
    pub rounds: usize,
    pub eps_target: f64,
    pub size_target: usize,
    /// Sum of the accepted round bounds; never above `eps_target`.
    pub error_bound: f64,
    pub provenance: EpsProvenance,
}

/// `⌈(1/ε) · ln^{2d+1}(1/ε)⌉`, at least 1.
pub fn sample_size_target(dim: usize, eps: f64) -> usize {
    let inv = 1.0 / eps;
    let s = inv * inv.ln().powi(2 * dim as i32 + 1);
    if s.is_finite() {
        (s.ceil() as usize).max(1)
    } else {
        usize::MAX
    }
}

/// Signed walk state over the `g^d` corners of a rank grid: entry `c` holds
/// `Σ χ(y)` over colored points `y` whose cell is dominated by `c`.
struct CornerState {
    dim: usize,
    side: usize,
    sums: Vec<i64>,
}

impl CornerState {
    fn new(dim: usize, side: usize) -> Self {
        Self {
            dim,
            side,
            sums: vec![0; side.pow(dim as u32)],
        }
    }

    /// Visits every corner `⪰ cell`.
    fn for_each_above(&self, cell: &[usize], mut f: impl FnMut(usize)) {
        let mut idx = cell.to_vec();
        loop {
            f(idx.iter().fold(0, |acc, &i| acc * self.side + i));
            let mut j = self.dim;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.side {
                    break;
                }
                idx[j] = cell[j];
            }
        }
    }

    /// Inner product of the state with the indicator of corners `⪰ cell`.
    fn pressure(&self, cell: &[usize]) -> i64 {
        let mut w = 0;
        self.for_each_above(cell, |k| w += self.sums[k]);
        w
    }

    fn push(&mut self, cell: &[usize], label: i64) {
        let mut touched = Vec::new();
        self.for_each_above(cell, |k| touched.push(k));
        for k in touched {
            self.sums[k] += label;
        }
    }
}

/// Largest corner grid the walk keeps.
const MAX_WALK_CORNERS: usize = 1 << 14;

/// Colors `ps` online with a self-balancing walk.
///
/// Points arrive in a seeded random order. The walk tracks the signed sum of
/// every dominating range anchored at a corner of a `g^d` rank grid,
/// `g = 2⌈log2 n⌉` (capped so `g^d ≤ 2^14`). An arriving point reads the
/// total `w` of the tracked sums over corners whose range contains it and
/// takes `+1` with probability `(1 − clamp(w/c, −1, 1)) / 2`, where
/// `c = 0.3 ln(n) g^{d/2}`. Random majority-label points are then flipped
/// until `|Σχ| ≤ 1`.
pub fn color_self_balancing(ps: &PointSet, seed: u64) -> Result<SignedColoring> {
    let n = ps.len();
    if n < 2 {
        return Err(DksError::TooFewPoints { min: 2, found: n });
    }
    let d = ps.dim();
    let max_side = (MAX_WALK_CORNERS as f64).powf(1.0 / d as f64).floor() as usize;
    let g = (2 * (n as f64).log2().ceil() as usize).clamp(1, max_side.max(1));
    let mut cells = vec![vec![0usize; d]; n];
    for j in 0..d {
        let order = ps.axis_order(j);
        let mut rank = 0;
        for (r, &i) in order.iter().enumerate() {
            // tied coordinates share a cell
            if r > 0 && ps.point(i as usize)[j] != ps.point(order[r - 1] as usize)[j] {
                rank = r;
            }
            cells[i as usize][j] = rank * g / n;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arrival: Vec<usize> = (0..n).collect();
    arrival.shuffle(&mut rng);

    let c = 0.3 * (n as f64).ln() * (g as f64).powf(d as f64 / 2.0);
    let mut state = CornerState::new(d, g);
    let mut chi = vec![0i8; n];
    for &i in &arrival {
        let w = state.pressure(&cells[i]) as f64;
        let p_plus = (1.0 - (w / c).clamp(-1.0, 1.0)) / 2.0;
        let label: i8 = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        chi[i] = label;
        state.push(&cells[i], label as i64);
    }

    let total: i64 = chi.iter().map(|&x| x as i64).sum();
    if total.abs() > 1 {
        let majority: i8 = if total > 0 { 1 } else { -1 };
        let flips = (total.unsigned_abs() / 2) as usize;
        let mut pool: Vec<usize> = (0..n).filter(|&i| chi[i] == majority).collect();
        let (chosen, _) = pool.partial_shuffle(&mut rng, flips);
        for &i in chosen.iter() {
            chi[i] = -majority;
        }
    }
    Ok(SignedColoring { chi, seed })
}

fn check_coloring(ps: &PointSet, chi: &SignedColoring) -> Result<()> {
    if chi.len() != ps.len() {
        return Err(DksError::DimensionMismatch {
            expected: ps.len(),
            found: chi.len(),
        });
    }
    Ok(())
}

fn dominating_discrepancy(ps: &PointSet, weights: &[i64]) -> u64 {
    let (hi, lo) = extreme_dominance_sums(ps, weights);
    hi.value.unsigned_abs().max(lo.value.unsigned_abs())
}

/// Largest input accepted by [`eval_discrepancy`] for rectangles in `dim`
/// dimensions; the search costs `O(n^{2d−1})`.
pub fn rect_discrepancy_limit(dim: usize) -> usize {
    let budget = 2e9f64;
    let n = budget.powf(1.0 / (2 * dim - 1) as f64).floor() as usize;
    n.min(MAX_DISCREPANCY_POINTS)
}

/// Exact `max_R |Σ_{x ∈ R} χ(x)|` over the given range family.
pub fn eval_discrepancy(ps: &PointSet, chi: &SignedColoring, family: RangeFamily) -> Result<u64> {
    check_coloring(ps, chi)?;
    let limit = match family {
        RangeFamily::Dominating => MAX_DISCREPANCY_POINTS,
        RangeFamily::Rect => rect_discrepancy_limit(ps.dim()),
    };
    if ps.len() > limit {
        return Err(DksError::TooLarge {
            what: "discrepancy evaluation",
            found: ps.len(),
            max: limit,
        });
    }
    if ps.is_empty() {
        return Ok(0);
    }
    let w = chi.weights();
    Ok(match family {
        RangeFamily::Dominating => dominating_discrepancy(ps, &w),
        RangeFamily::Rect => rect_discrepancy(ps, &w),
    })
}

/// Fixes `lo ≺ x ⪯ hi` on the first `d − 1` axes and takes the widest
/// spread of prefix sums along the last axis.
fn rect_discrepancy(ps: &PointSet, w: &[i64]) -> u64 {
    let d = ps.dim();
    let last = d - 1;
    let order = ps.axis_order(last);
    let axes: Vec<Vec<f64>> = (0..last).map(|j| ps.distinct_values(j)).collect();
    // per axis: (lo, hi) with lo ∈ {-inf} ∪ values, hi ∈ values, lo < hi
    let spans: Vec<Vec<(Bound, f64)>> = axes
        .iter()
        .map(|vals| {
            let mut s = Vec::new();
            for (a, &hi) in vals.iter().enumerate() {
                s.push((Bound::NegInf, hi));
                for &lo in &vals[..a] {
                    s.push((Bound::At(lo), hi));
                }
            }
            s
        })
        .collect();

    let mut best = 0u64;
    let mut idx = vec![0usize; last];
    loop {
        let mut running = 0i64;
        let (mut max_s, mut min_s) = (0i64, 0i64);
        let mut k = 0;
        while k < order.len() {
            let v = ps.point(order[k] as usize)[last];
            while k < order.len() && ps.point(order[k] as usize)[last] == v {
                let i = order[k] as usize;
                let x = ps.point(i);
                if (0..last).all(|j| {
                    let (lo, hi) = spans[j][idx[j]];
                    lo.is_strictly_below(x[j]) && x[j] <= hi
                }) {
                    running += w[i];
                }
                k += 1;
            }
            max_s = max_s.max(running);
            min_s = min_s.min(running);
        }
        best = best.max((max_s - min_s) as u64);

        let mut j = 0;
        loop {
            if j == last {
                return best;
            }
            idx[j] += 1;
            if idx[j] < spans[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Halves `ps` with self-balancing colorings until the size target is met or
/// the next round would push the accumulated error bound past `eps`.
pub fn build_eps_sample(ps: &PointSet, eps: f64, seed: u64) -> Result<EpsSample> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(DksError::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "must lie in (0, 1]",
        });
    }
    if ps.is_empty() {
        return Err(DksError::EmptyPointSet);
    }
    let size_target = sample_size_target(ps.dim(), eps);
    let mut current = ps.clone();
    let mut provenance = EpsProvenance {
        seed,
        sizes: vec![ps.len()],
        round_bounds: Vec::new(),
    };
    let mut error_bound = 0.0;

    while current.len() > size_target && current.len() >= 2 {
        let round = provenance.round_bounds.len() as u64;
        let mut coloring = color_self_balancing(&current, derive_seed(seed, round))?;
        if coloring.total() < 0 {
            coloring.chi.iter_mut().for_each(|c| *c = -*c);
        }
        let n = current.len() as f64;
        let s = coloring.total() as f64;
        let disc = dominating_discrepancy(&current, &coloring.weights()) as f64;
        let bound = (disc + s.abs()) / (n + s);
        if error_bound + bound > eps {
            break;
        }
        let keep: Vec<usize> = (0..current.len()).filter(|&i| coloring.chi[i] > 0).collect();
        current = current.subset(&keep);
        error_bound += bound;
        provenance.sizes.push(current.len());
        provenance.round_bounds.push(bound);
    }

    Ok(EpsSample {
        rounds: provenance.round_bounds.len(),
        points: current,
        eps_target: eps,
        size_target,
        error_bound,
        provenance,
    })
}
