//! Dual rectangles and the three/four-dimensional approximation pipeline.
//!
//! Each point `x ∈ P ∪ Q` becomes the box `r_x = [x, ξ]^d` with weight
//! `+1/|P|` or `−1/|Q|`, so `z ∈ r_x ⇔ x ⪯ z` and the total weight of boxes
//! containing `z` is `fracP(R_z) − fracQ(R_z)`. Maximizing the absolute
//! depth over `z` gives dKS; on ε/3-samples of P and Q it gives an
//! ε-approximation.

use serde::Serialize;

use crate::dominance::{lower_bound, sorted_distinct, PrefixMaxTree};
use crate::eps_sample::build_eps_sample;
use crate::error::{DksError, Result};
use crate::grid::grid_dks;
use crate::points::{apply_monotone, check_pair, Bound, DominatingRange, PointSet};
use crate::seed::derive_seed;

/// `r_x = { z : lo ⪯ z ⪯ ξ }` with an integer weight in units of
/// `1 / (|P| |Q|)`. Containment is closed on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRect {
    pub lo: Vec<f64>,
    pub weight: i64,
}

#[derive(Debug, Clone)]
pub struct WeightedRectSet {
    dim: usize,
    rects: Vec<DualRect>,
    xi: f64,
    offset: Vec<f64>,
    denominator: f64,
    /// Original primal coordinates per axis, keyed by translated value.
    primal_axes: Vec<Vec<(f64, f64)>>,
}

impl WeightedRectSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rects(&self) -> &[DualRect] {
        &self.rects
    }

    /// The common upper corner coordinate.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Per-axis translation applied before dualizing.
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.rects[i].weight as f64 / self.denominator
    }

    pub fn contains(&self, i: usize, z: &[f64]) -> bool {
        self.rects[i]
            .lo
            .iter()
            .zip(z)
            .all(|(&l, &v)| l <= v && v <= self.xi)
    }

    /// Signed depth at `z` in integer units, by direct containment tests.
    pub fn depth_units(&self, z: &[f64]) -> i64 {
        (0..self.len())
            .filter(|&i| self.contains(i, z))
            .map(|i| self.rects[i].weight)
            .sum()
    }

    pub fn depth(&self, z: &[f64]) -> f64 {
        self.depth_units(z) as f64 / self.denominator
    }

    /// Maps a dual corner built from rect lower coordinates back to the
    /// primal corner with the same dominated sets.
    pub fn to_primal(&self, z: &[f64]) -> DominatingRange {
        DominatingRange::new(
            z.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let axis = &self.primal_axes[j];
                    let k = axis.partition_point(|&(t, _)| t < v);
                    match axis.get(k) {
                        Some(&(t, orig)) if t == v => Bound::At(orig),
                        // between data values: same set as the one below
                        _ if k == 0 => Bound::NegInf,
                        _ => Bound::At(axis[k - 1].1),
                    }
                })
                .collect(),
        )
    }

    pub(crate) fn units(&self) -> f64 {
        self.denominator
    }
}

/// Translates `P ∪ Q` so every axis starts at 1, sets `ξ = 2 · max`, and
/// builds one weighted box per point.
pub fn to_dual(p: &PointSet, q: &PointSet) -> Result<WeightedRectSet> {
    check_pair(p, q)?;
    let d = p.dim();
    if !(2..=4).contains(&d) {
        return Err(DksError::UnsupportedDimension {
            dim: d,
            supported: "2, 3, 4",
        });
    }
    let (np, nq) = (p.len(), q.len());
    let all = p.union(q)?;
    let offset: Vec<f64> = (0..d)
        .map(|j| 1.0 - all.iter().map(|x| x[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let shifts: Vec<Box<dyn Fn(f64) -> f64>> = offset
        .iter()
        .map(|&o| Box::new(move |x: f64| x + o) as Box<dyn Fn(f64) -> f64>)
        .collect();
    let maps: Vec<&dyn Fn(f64) -> f64> = shifts.iter().map(|b| b.as_ref()).collect();
    let moved = apply_monotone(&all, &maps)?;
    let max = moved.coords().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let xi = 2.0 * max;

    let rects = moved
        .iter()
        .enumerate()
        .map(|(i, x)| DualRect {
            lo: x.to_vec(),
            weight: if i < np { nq as i64 } else { -(np as i64) },
        })
        .collect();
    let primal_axes = (0..d)
        .map(|j| {
            let mut pairs: Vec<(f64, f64)> = moved
                .iter()
                .zip(all.iter())
                .map(|(m, o)| (m[j], o[j]))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.dedup_by(|a, b| a.0 == b.0);
            pairs
        })
        .collect();
    Ok(WeightedRectSet {
        dim: d,
        rects,
        xi,
        offset,
        denominator: np as f64 * nq as f64,
        primal_axes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthMax {
    /// Largest `|depth|`, as a real weight.
    pub value: f64,
    /// Signed depth at `z` in integer units.
    pub depth_units: i64,
    /// A dual point attaining it (all coordinates are rect lower corners).
    pub z: Vec<f64>,
    /// Whether the maximum came from the negated weights.
    pub negated: bool,
}

/// Exact maximum of `|Σ weights of boxes containing z|` over `z`.
///
/// Sweeps the last axis over lower-corner events. In three dimensions the
/// other two axes are held as one best-prefix tree per candidate row of the
/// first axis; four dimensions fix the first axis and reuse the
/// three-dimensional sweep. Rows and tree positions use only lower corners
/// of positive-weight boxes, which is where a maximum can sit.
pub fn max_depth_point(w: &WeightedRectSet) -> DepthMax {
    let lows: Vec<&[f64]> = w.rects.iter().map(|r| r.lo.as_slice()).collect();
    let weights: Vec<i64> = w.rects.iter().map(|r| r.weight).collect();
    let negated: Vec<i64> = weights.iter().map(|x| -x).collect();
    let (up, z_up) = signed_max(w.dim, &lows, &weights);
    let (down, z_down) = signed_max(w.dim, &lows, &negated);
    let (units, z, neg) = if up >= down {
        (up, z_up, false)
    } else {
        (-down, z_down, true)
    };
    // the empty corner has depth 0; place it below every box
    let z = z.unwrap_or_else(|| vec![f64::MIN; w.dim]);
    DepthMax {
        value: units.unsigned_abs() as f64 / w.units(),
        depth_units: units,
        z,
        negated: neg,
    }
}

fn signed_max(d: usize, lows: &[&[f64]], w: &[i64]) -> (i64, Option<Vec<f64>>) {
    let all: Vec<usize> = (0..lows.len()).collect();
    match d {
        1 => sweep_1d(lows, w, &all),
        2 => sweep_2d(lows, w, &all, 0),
        3 => sweep_3d(lows, w, &all, 0),
        4 => {
            let base = positive_values(lows, w, &all, 0);
            let mut best: (i64, Option<Vec<f64>>) = (0, None);
            for &c in &base {
                let subset: Vec<usize> = all.iter().copied().filter(|&i| lows[i][0] <= c).collect();
                let (v, z) = sweep_3d(lows, w, &subset, 1);
                if v > best.0 {
                    let mut full = vec![c];
                    full.extend(z.expect("positive depth has a witness"));
                    best = (v, Some(full));
                }
            }
            best
        }
        _ => unreachable!("dimension checked by to_dual"),
    }
}

fn positive_values(lows: &[&[f64]], w: &[i64], ids: &[usize], axis: usize) -> Vec<f64> {
    sorted_distinct(ids.iter().filter(|&&i| w[i] > 0).map(|&i| lows[i][axis]))
}

/// Ids sorted by coordinate `axis`, grouped by equal value.
fn events(lows: &[&[f64]], ids: &[usize], axis: usize) -> Vec<(f64, Vec<usize>)> {
    let mut sorted = ids.to_vec();
    sorted.sort_by(|&a, &b| lows[a][axis].total_cmp(&lows[b][axis]));
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in sorted {
        let v = lows[i][axis];
        match out.last_mut() {
            Some((u, group)) if *u == v => group.push(i),
            _ => out.push((v, vec![i])),
        }
    }
    out
}

fn sweep_1d(lows: &[&[f64]], w: &[i64], ids: &[usize]) -> (i64, Option<Vec<f64>>) {
    let mut best = (0, None);
    let mut running = 0;
    for (v, group) in events(lows, ids, 0) {
        running += group.iter().map(|&i| w[i]).sum::<i64>();
        if running > best.0 {
            best = (running, Some(vec![v]));
        }
    }
    best
}

/// Axes `base` and `base + 1`; sweeps `base + 1`.
fn sweep_2d(lows: &[&[f64]], w: &[i64], ids: &[usize], base: usize) -> (i64, Option<Vec<f64>>) {
    let cand = positive_values(lows, w, ids, base);
    if cand.is_empty() {
        return (0, None);
    }
    let mut tree = PrefixMaxTree::new(cand.len());
    let mut best = (0, None);
    for (v, group) in events(lows, ids, base + 1) {
        for &i in &group {
            let pos = lower_bound(&cand, lows[i][base]);
            if pos < cand.len() {
                tree.add(pos, w[i]);
            }
        }
        let (value, arg) = tree.best();
        if value > best.0 {
            best = (value, Some(vec![cand[arg.min(cand.len() - 1)], v]));
        }
    }
    best
}

/// Axes `base..base + 3`; sweeps `base + 2` with a tree per `base` row.
fn sweep_3d(lows: &[&[f64]], w: &[i64], ids: &[usize], base: usize) -> (i64, Option<Vec<f64>>) {
    let rows = positive_values(lows, w, ids, base);
    let cols = positive_values(lows, w, ids, base + 1);
    if rows.is_empty() || cols.is_empty() {
        return (0, None);
    }
    let mut trees: Vec<PrefixMaxTree> = (0..rows.len()).map(|_| PrefixMaxTree::new(cols.len())).collect();
    let mut best = (0, None);
    for (v, group) in events(lows, ids, base + 2) {
        for &i in &group {
            let col = lower_bound(&cols, lows[i][base + 1]);
            if col == cols.len() {
                continue;
            }
            for tree in &mut trees[lower_bound(&rows, lows[i][base])..] {
                tree.add(col, w[i]);
            }
        }
        for (r, tree) in trees.iter().enumerate() {
            let (value, arg) = tree.best();
            if value > best.0 {
                best = (value, Some(vec![rows[r], cols[arg.min(cols.len() - 1)], v]));
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineRoute {
    /// Two dimensions go straight to the stratified grid.
    Grid,
    /// ε/3-samples, dualize, exact maximum depth.
    SampleDual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineEstimate {
    pub value: f64,
    pub witness: DominatingRange,
    pub route: PipelineRoute,
    pub sample_sizes: [usize; 2],
    pub halving_rounds: [usize; 2],
}

/// `|estimate − dKS(P, Q)| ≤ eps`.
pub fn approx_dks_pipeline(p: &PointSet, q: &PointSet, eps: f64, seed: u64) -> Result<PipelineEstimate> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(DksError::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "must lie in (0, 1]",
        });
    }
    check_pair(p, q)?;
    match p.dim() {
        2 => {
            let g = grid_dks(p, q, eps)?;
            Ok(PipelineEstimate {
                value: g.value,
                witness: g.witness,
                route: PipelineRoute::Grid,
                sample_sizes: [p.len(), q.len()],
                halving_rounds: [0, 0],
            })
        }
        3 | 4 => {
            let inner = eps / 3.0;
            let sp = build_eps_sample(p, inner, derive_seed(seed, 0))?;
            let sq = build_eps_sample(q, inner, derive_seed(seed, 1))?;
            let dual = to_dual(&sp.points, &sq.points)?;
            let best = max_depth_point(&dual);
            Ok(PipelineEstimate {
                value: best.value,
                witness: dual.to_primal(&best.z),
                route: PipelineRoute::SampleDual,
                sample_sizes: [sp.points.len(), sq.points.len()],
                halving_rounds: [sp.rounds, sq.rounds],
            })
        }
        d => Err(DksError::UnsupportedDimension {
            dim: d,
            supported: "2, 3, 4",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force_dks, range_difference};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ps(d: usize, pts: &[&[f64]]) -> PointSet {
        PointSet::new(d, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    /// Every candidate corner from rect lower coordinates, direct containment.
    fn brute_depth(w: &WeightedRectSet) -> (i64, i64) {
        let d = w.dim();
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|j| sorted_distinct(w.rects().iter().map(|r| r.lo[j])))
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let (mut hi, mut lo) = (0i64, 0i64);
        for code in 0..total {
            let mut rem = code;
            let z: Vec<f64> = axes
                .iter()
                .map(|a| {
                    let v = a[rem % a.len()];
                    rem /= a.len();
                    v
                })
                .collect();
            let s = w.depth_units(&z);
            hi = hi.max(s);
            lo = lo.min(s);
        }
        (hi, lo)
    }

    #[test]
    fn dual_containment_matches_domination() {
        let p = ps(2, &[&[0.3, 0.7]]);
        let q = ps(2, &[&[0.9, 0.1]]);
        let w = to_dual(&p, &q).unwrap();
        assert_eq!(w.offset(), &[0.7, 0.9]);
        assert!(w.xi() > 1.0);
        for r in w.rects() {
            assert!(r.lo.iter().all(|&x| x >= 1.0 && x < w.xi()));
        }
        let total: i64 = w.rects().iter().map(|r| r.weight).sum();
        assert_eq!(total, 0);
        // z ∈ r_x iff x ⪯ z, checked at translated coordinates
        let z = [0.5 + 0.7, 0.8 + 0.9];
        assert!(w.contains(0, &z));
        assert!(!w.contains(1, &z));
    }

    #[test]
    fn dual_rejects_bad_input() {
        let p = ps(2, &[&[1.0, 1.0]]);
        let empty = PointSet::new(2, vec![]).unwrap();
        assert_eq!(to_dual(&p, &empty).unwrap_err(), DksError::EmptyPointSet);
        let line = PointSet::from_values(&[1.0]).unwrap();
        assert!(matches!(
            to_dual(&line, &line).unwrap_err(),
            DksError::UnsupportedDimension { .. }
        ));
    }

    #[test]
    fn single_positive_rect() {
        let p = ps(3, &[&[2.0, 2.0, 2.0]]);
        let q = ps(3, &[&[5.0, 5.0, 5.0]]);
        let w = to_dual(&p, &q).unwrap();
        let m = max_depth_point(&w);
        assert_eq!(m.value, 1.0);
        assert_eq!(m.z, w.rects()[0].lo);
        assert_eq!(w.to_primal(&m.z), DominatingRange::at(&[2.0, 2.0, 2.0]));
    }

    #[test]
    fn two_by_two_dual() {
        let p = ps(2, &[&[1.0, 1.0], &[2.0, 2.0]]);
        let q = ps(2, &[&[1.0, 2.0], &[2.0, 1.0]]);
        let m = max_depth_point(&to_dual(&p, &q).unwrap());
        assert_eq!(m.value, 0.5);
    }

    #[test]
    fn matches_brute_force_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let d = rng.gen_range(2..=4);
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=12);
            let gen = |rng: &mut ChaCha8Rng, k: usize| {
                PointSet::from_flat(d, (0..k * d).map(|_| rng.gen_range(0..5) as f64 * 0.5).collect())
                    .unwrap()
            };
            let p = gen(&mut rng, n);
            let q = gen(&mut rng, m);
            let w = to_dual(&p, &q).unwrap();
            let best = max_depth_point(&w);
            let (hi, lo) = brute_depth(&w);
            assert_eq!(best.depth_units.abs(), hi.max(-lo));
            assert_eq!(best.negated, hi < -lo);
            assert_eq!(w.depth_units(&best.z), best.depth_units);
            let primal = w.to_primal(&best.z);
            assert_eq!(range_difference(&p, &q, &primal).unwrap(), best.value);
            assert_eq!(best.value, brute_force_dks(&p, &q).unwrap().value);
        }
    }

    #[test]
    fn pipeline_rejects_bad_parameters() {
        let p = ps(3, &[&[1.0, 1.0, 1.0]]);
        assert!(approx_dks_pipeline(&p, &p, 0.0, 1).is_err());
        let line = PointSet::from_values(&[1.0]).unwrap();
        assert!(approx_dks_pipeline(&line, &line, 0.5, 1).is_err());
    }

    #[test]
    fn pipeline_on_identical_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = PointSet::from_flat(3, (0..300).map(|_| rng.gen::<f64>()).collect()).unwrap();
        let e = approx_dks_pipeline(&p, &p, 0.3, 7).unwrap();
        assert!(e.value <= 0.3);
        assert_eq!(e.route, PipelineRoute::SampleDual);
    }
}
