//! Maximum signed weight of a dominating range, computed exactly.
//!
//! Given points `x_i` with integer weights `w_i`, finds
//! `max_z Σ_{x_i ⪯ z} w_i` together with a corner `z` attaining it.
//!
//! Only coordinates of positive-weight points can be optimal on any axis
//! (lowering `z_j` to the largest positive coordinate below it only drops
//! non-positive weights), so the first `d - 2` axes are enumerated over those
//! values, axis `d - 2` is swept, and axis `d - 1` lives in a segment tree
//! that keeps the best prefix sum under point updates. Cost is
//! `O(m^{d-2} (n + n log m))` for `m` positive coordinates per axis.

use crate::points::{Bound, PointSet};

/// A maximizing corner and its signed weight, in integer units.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: i64,
    pub corner: Vec<Bound>,
}

#[derive(Clone, Copy)]
struct Node {
    sum: i64,
    best: i64,
    arg: u32,
}

/// Segment tree over positions `0..m` holding weights; reports the largest
/// sum over the non-empty prefixes `[0, p]` and its end position `p`.
pub(crate) struct PrefixMaxTree {
    size: usize,
    nodes: Vec<Node>,
}

impl PrefixMaxTree {
    pub(crate) fn new(m: usize) -> Self {
        let size = m.max(1).next_power_of_two();
        let mut t = Self {
            size,
            nodes: vec![Node { sum: 0, best: 0, arg: 0 }; 2 * size],
        };
        t.clear();
        t
    }

    pub(crate) fn clear(&mut self) {
        for i in 0..self.size {
            self.nodes[self.size + i] = Node {
                sum: 0,
                best: 0,
                arg: i as u32,
            };
        }
        for i in (1..self.size).rev() {
            self.nodes[i] = Node {
                sum: 0,
                best: 0,
                arg: self.nodes[2 * i].arg,
            };
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, pos: usize, w: i64) {
        let mut i = self.size + pos;
        self.nodes[i].sum += w;
        self.nodes[i].best = self.nodes[i].sum;
        i /= 2;
        while i >= 1 {
            let l = self.nodes[2 * i];
            let r = self.nodes[2 * i + 1];
            let through = l.sum + r.best;
            self.nodes[i] = if l.best >= through {
                Node { sum: l.sum + r.sum, best: l.best, arg: l.arg }
            } else {
                Node { sum: l.sum + r.sum, best: through, arg: r.arg }
            };
            i /= 2;
        }
    }

    /// `(best prefix sum, end position)`.
    #[inline]
    pub(crate) fn best(&self) -> (i64, usize) {
        let root = self.nodes[1];
        (root.best, root.arg as usize)
    }
}

pub(crate) fn sorted_distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// First index `i` with `sorted[i] >= x`.
#[inline]
pub(crate) fn lower_bound(sorted: &[f64], x: f64) -> usize {
    sorted.partition_point(|&c| c < x)
}

/// Largest signed dominating-range weight; never below 0 (the empty range).
pub fn max_dominance_sum(ps: &PointSet, weights: &[i64]) -> Extremum {
    assert_eq!(ps.len(), weights.len(), "one weight per point");
    let d = ps.dim();
    let empty = Extremum {
        value: 0,
        corner: vec![Bound::NegInf; d],
    };
    let positive: Vec<usize> = (0..ps.len()).filter(|&i| weights[i] > 0).collect();
    if positive.is_empty() {
        return empty;
    }

    if d == 1 {
        let mut best = empty;
        let mut running = 0i64;
        let order = ps.axis_order(0);
        let mut k = 0;
        while k < order.len() {
            let v = ps.point(order[k] as usize)[0];
            while k < order.len() && ps.point(order[k] as usize)[0] == v {
                running += weights[order[k] as usize];
                k += 1;
            }
            if running > best.value {
                best = Extremum {
                    value: running,
                    corner: vec![Bound::At(v)],
                };
            }
        }
        return best;
    }

    let cand: Vec<Vec<f64>> = (0..d)
        .map(|j| sorted_distinct(positive.iter().map(|&i| ps.point(i)[j])))
        .collect();
    let sweep = d - 2;
    let tree_axis = d - 1;
    let fixed = d - 2;

    let order = ps.axis_order(sweep);
    let tree_pos: Vec<usize> = (0..ps.len())
        .map(|i| lower_bound(&cand[tree_axis], ps.point(i)[tree_axis]))
        .collect();
    let m = cand[tree_axis].len();
    let mut tree = PrefixMaxTree::new(m);
    let mut best = empty;

    let mut idx = vec![0usize; fixed];
    let mut prefix = vec![0f64; fixed];
    let mut subset: Vec<u32> = Vec::with_capacity(ps.len());
    'tuples: loop {
        for j in 0..fixed {
            prefix[j] = cand[j][idx[j]];
        }
        subset.clear();
        subset.extend(order.iter().copied().filter(|&i| {
            let p = ps.point(i as usize);
            tree_pos[i as usize] < m && (0..fixed).all(|j| p[j] <= prefix[j])
        }));
        tree.clear();
        let mut k = 0;
        while k < subset.len() {
            let v = ps.point(subset[k] as usize)[sweep];
            while k < subset.len() && ps.point(subset[k] as usize)[sweep] == v {
                let i = subset[k] as usize;
                tree.add(tree_pos[i], weights[i]);
                k += 1;
            }
            let (value, arg) = tree.best();
            if value > best.value {
                let mut corner: Vec<Bound> = prefix.iter().map(|&x| Bound::At(x)).collect();
                corner.push(Bound::At(v));
                corner.push(Bound::At(cand[tree_axis][arg.min(m - 1)]));
                best = Extremum { value, corner };
            }
        }

        // odometer over the fixed axes
        let mut j = 0;
        loop {
            if j == fixed {
                break 'tuples;
            }
            idx[j] += 1;
            if idx[j] < cand[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
    best
}

/// `(max, min)` of the signed dominating-range weight.
pub fn extreme_dominance_sums(ps: &PointSet, weights: &[i64]) -> (Extremum, Extremum) {
    let hi = max_dominance_sum(ps, weights);
    let negated: Vec<i64> = weights.iter().map(|w| -w).collect();
    let mut lo = max_dominance_sum(ps, &negated);
    lo.value = -lo.value;
    (hi, lo)
}
