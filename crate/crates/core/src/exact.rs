//! Exact dKS between two point sets.
//!
//! Counts only change at data coordinates, so the supremum over `z ∈ R^d` is
//! a maximum over the grid of per-axis data values (plus one unbounded value
//! per axis). Differences are accumulated as integers
//! `|P| · |Q| · (fracP − fracQ)`, which makes every route here agree bit for
//! bit.

use serde::Serialize;

use crate::dominance::extreme_dominance_sums;
use crate::error::Result;
use crate::points::{check_pair, count_dominated, Bound, DominatingRange, PointSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DksResult {
    /// `max_z |fracP(R_z) − fracQ(R_z)|`, in `[0, 1]`.
    pub value: f64,
    /// A corner attaining `value`.
    pub witness: DominatingRange,
}

#[inline]
fn to_fraction(numerator: i64, np: usize, nq: usize) -> f64 {
    numerator.unsigned_abs() as f64 / (np as f64 * nq as f64)
}

/// `|fracP(R_z) − fracQ(R_z)|` for a single range.
pub fn range_difference(p: &PointSet, q: &PointSet, z: &DominatingRange) -> Result<f64> {
    check_pair(p, q)?;
    let cp = count_dominated(p, z)? as i64;
    let cq = count_dominated(q, z)? as i64;
    Ok(to_fraction(
        cp * q.len() as i64 - cq * p.len() as i64,
        p.len(),
        q.len(),
    ))
}

/// Exact dKS by fixing the first `d − 1` corner coordinates and sweeping the
/// last axis in sorted order with running counts. `O(d n^d)` time for
/// `n = |P| + |Q|`; this is the quadratic baseline in two dimensions.
pub fn exact_dks(p: &PointSet, q: &PointSet) -> Result<DksResult> {
    check_pair(p, q)?;
    let d = p.dim();
    let (np, nq) = (p.len(), q.len());
    let last = d - 1;

    // points of P ∪ Q sorted by the last axis
    let mut rows: Vec<(&[f64], i64)> = p
        .iter()
        .map(|x| (x, nq as i64))
        .chain(q.iter().map(|x| (x, -(np as i64))))
        .collect();
    rows.sort_by(|a, b| a.0[last].total_cmp(&b.0[last]));
    let n = rows.len();
    let mut prefix_coords = Vec::with_capacity(n * last);
    for (x, _) in &rows {
        prefix_coords.extend_from_slice(&x[..last]);
    }
    let weights: Vec<i64> = rows.iter().map(|r| r.1).collect();
    let last_values: Vec<f64> = rows.iter().map(|r| r.0[last]).collect();
    let mut group_ends = Vec::new();
    for k in 1..=n {
        if k == n || last_values[k] != last_values[k - 1] {
            group_ends.push(k);
        }
    }

    let all = p.union(q)?;
    let candidates: Vec<Vec<Bound>> = (0..last)
        .map(|j| {
            let mut c: Vec<Bound> = all
                .distinct_values(j)
                .into_iter()
                .map(Bound::At)
                .collect();
            c.push(Bound::PosInf);
            c
        })
        .collect();

    let mut best_abs: i64 = -1;
    let mut witness = DominatingRange::full(d);
    let mut idx = vec![0usize; last];
    // comparison-only thresholds; an unbounded side becomes +inf here
    let mut thresholds = vec![0f64; last];
    loop {
        for j in 0..last {
            thresholds[j] = match candidates[j][idx[j]] {
                Bound::At(x) => x,
                Bound::PosInf => f64::INFINITY,
                Bound::NegInf => f64::NEG_INFINITY,
            };
        }
        let mut running = 0i64;
        let mut start = 0;
        for &end in &group_ends {
            for k in start..end {
                let x = &prefix_coords[k * last..(k + 1) * last];
                if x.iter().zip(&thresholds).all(|(a, b)| a <= b) {
                    running += weights[k];
                }
            }
            start = end;
            if running.abs() > best_abs {
                best_abs = running.abs();
                let mut z: Vec<Bound> = (0..last).map(|j| candidates[j][idx[j]]).collect();
                z.push(Bound::At(last_values[end - 1]));
                witness = DominatingRange::new(z);
            }
        }

        let mut j = 0;
        loop {
            if j == last {
                return Ok(DksResult {
                    value: to_fraction(best_abs, np, nq),
                    witness,
                });
            }
            idx[j] += 1;
            if idx[j] < candidates[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Direct evaluation of every candidate corner with per-point membership
/// tests, `O(d n^{d+1})`. Kept deliberately naive as a test oracle.
pub fn brute_force_dks(p: &PointSet, q: &PointSet) -> Result<DksResult> {
    check_pair(p, q)?;
    let d = p.dim();
    let (np, nq) = (p.len() as i64, q.len() as i64);
    let axes: Vec<Vec<Bound>> = (0..d)
        .map(|j| {
            let mut vals: Vec<f64> = p.iter().chain(q.iter()).map(|x| x[j]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            vals.dedup();
            let mut axis: Vec<Bound> = vals.into_iter().map(Bound::At).collect();
            axis.push(Bound::PosInf);
            axis
        })
        .collect();

    let total: usize = axes.iter().map(Vec::len).product();
    let mut best: Option<(i64, DominatingRange)> = None;
    for flat in 0..total {
        let mut rem = flat;
        let z: Vec<Bound> = axes
            .iter()
            .map(|axis| {
                let b = axis[rem % axis.len()];
                rem /= axis.len();
                b
            })
            .collect();
        let range = DominatingRange::new(z);
        let cp = count_dominated(p, &range)? as i64;
        let cq = count_dominated(q, &range)? as i64;
        let diff = (cp * nq - cq * np).abs();
        if best.as_ref().map_or(true, |(b, _)| diff > *b) {
            best = Some((diff, range));
        }
    }
    let (diff, witness) = best.expect("at least one candidate");
    Ok(DksResult {
        value: to_fraction(diff, p.len(), q.len()),
        witness,
    })
}

/// Exact dKS through the segment-tree dominance engine,
/// `O(n^{d−1} log n)`; the route used as ground truth at larger sizes.
pub fn exact_dks_fast(p: &PointSet, q: &PointSet) -> Result<DksResult> {
    check_pair(p, q)?;
    let (np, nq) = (p.len(), q.len());
    let all = p.union(q)?;
    let weights: Vec<i64> = std::iter::repeat(nq as i64)
        .take(np)
        .chain(std::iter::repeat(-(np as i64)).take(nq))
        .collect();
    let (hi, lo) = extreme_dominance_sums(&all, &weights);
    let best = if hi.value >= -lo.value { hi } else { lo };
    Ok(DksResult {
        value: to_fraction(best.value, np, nq),
        witness: DominatingRange::new(best.corner),
    })
}
