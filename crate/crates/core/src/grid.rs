//! ε-approximate dKS on a stratified grid.
//!
//! Each axis gets `k = ⌈4d/ε⌉` breakpoints at evenly spaced ranks of the
//! combined sorted coordinates of `P ∪ Q`. Points are binned into the `k^d`
//! cells as signed weights, dominated weights at every grid corner come from a `d`-pass
//! cumulative sum, and the estimate is the largest corner difference. Grid
//! corners are realizable ranges, so the estimate never exceeds the exact
//! value.

use serde::Serialize;

use crate::dominance::lower_bound;
use crate::error::{DksError, Result};
use crate::points::{check_pair, Bound, DominatingRange, PointSet};

/// Upper limit on `resolution^d`.
pub const MAX_GRID_CELLS: usize = 1 << 26;

/// Cell buffers up to this many entries are kept per thread and reused, so
/// repeated estimates skip fresh page faults on large allocations.
const RETAINED_CELLS: usize = 1 << 24;

thread_local! {
    static SCRATCH: std::cell::RefCell<Vec<i64>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Bit pattern whose unsigned order is `f64::total_cmp` order; integer
/// sorting is markedly cheaper than comparing floats.
fn order_key(v: f64) -> u64 {
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn from_order_key(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

fn take_cells(len: usize) -> Vec<i64> {
    let mut v = SCRATCH.with(|s| std::mem::take(&mut *s.borrow_mut()));
    v.clear();
    v.resize(len, 0);
    v
}

fn return_cells(v: Vec<i64>) {
    if v.capacity() <= RETAINED_CELLS {
        SCRATCH.with(|s| {
            let mut slot = s.borrow_mut();
            if v.capacity() > slot.capacity() {
                *slot = v;
            }
        });
    }
}

#[derive(Debug, Clone)]
pub struct StratifiedGrid {
    dim: usize,
    k: usize,
    breaks: Vec<Vec<f64>>,
    /// Signed weight per cell in units of `1 / (|P| |Q|)`: `+|Q|` for each
    /// point of P, `−|P|` for each point of Q. Last axis fastest.
    weights: Vec<i64>,
    np: usize,
    nq: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEstimate {
    pub value: f64,
    pub witness: DominatingRange,
    /// Requested breakpoints per axis.
    pub k: usize,
    /// Breakpoints actually used per axis, `min(k, |P| + |Q|)`.
    pub resolution: usize,
}

pub fn breakpoints_for(dim: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(DksError::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "must lie in (0, 1]",
        });
    }
    Ok((4.0 * dim as f64 / eps).ceil() as usize)
}

pub fn build_grid(p: &PointSet, q: &PointSet, eps: f64) -> Result<StratifiedGrid> {
    let k = breakpoints_for(p.dim(), eps)?;
    check_pair(p, q)?;
    let d = p.dim();
    let total = p.len() + q.len();
    let r = k.min(total);
    let cells = r
        .checked_pow(d as u32)
        .filter(|&c| c <= MAX_GRID_CELLS)
        .ok_or(DksError::TooLarge {
            what: "grid cells",
            found: r.saturating_pow(d as u32),
            max: MAX_GRID_CELLS,
        })?;

    let breaks: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let mut v: Vec<u64> = p.iter().chain(q.iter()).map(|x| order_key(x[j])).collect();
            v.sort_unstable();
            (1..=r).map(|i| from_order_key(v[(i * total).div_ceil(r) - 1])).collect()
        })
        .collect();

    let mut grid = StratifiedGrid {
        dim: d,
        k,
        breaks,
        weights: take_cells(cells),
        np: p.len(),
        nq: q.len(),
    };
    for (set, w) in [(p, q.len() as i64), (q, -(p.len() as i64))] {
        for x in set.iter() {
            let c = grid.cell_of(x);
            grid.weights[c] += w;
        }
    }
    Ok(grid)
}

impl StratifiedGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn resolution(&self) -> usize {
        self.breaks[0].len()
    }

    pub fn breaks(&self, axis: usize) -> &[f64] {
        &self.breaks[axis]
    }

    pub fn num_cells(&self) -> usize {
        self.weights.len()
    }

    /// `|Q| · #P − |P| · #Q` for the cell at a flat index.
    pub fn cell_weight(&self, flat: usize) -> i64 {
        self.weights[flat]
    }

    /// Per-axis cell indices of a point: the first break at or above each
    /// coordinate.
    pub fn cell_index(&self, x: &[f64]) -> Vec<usize> {
        (0..self.dim)
            .map(|j| lower_bound(&self.breaks[j], x[j]))
            .collect()
    }

    fn cell_of(&self, x: &[f64]) -> usize {
        let r = self.resolution();
        (0..self.dim).fold(0, |acc, j| acc * r + lower_bound(&self.breaks[j], x[j]))
    }

    /// Flat index for per-axis indices (last axis fastest).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let r = self.resolution();
        idx.iter().fold(0, |acc, &i| acc * r + i)
    }

    /// The corner range at per-axis break indices.
    pub fn corner(&self, idx: &[usize]) -> DominatingRange {
        DominatingRange::new(
            idx.iter()
                .enumerate()
                .map(|(j, &i)| Bound::At(self.breaks[j][i]))
                .collect(),
        )
    }

    /// Signed dominated weight at every grid corner.
    pub fn prefix_weights(&self) -> Vec<i64> {
        let mut w = self.weights.clone();
        self.cumulate(&mut w);
        w
    }

    /// In-place cumulative sums along every axis, `d` passes.
    fn cumulate(&self, a: &mut [i64]) {
        let r = self.resolution();
        let mut stride = 1;
        for _ in 0..self.dim {
            let block = stride * r;
            for chunk in a.chunks_exact_mut(block) {
                for i in stride..block {
                    chunk[i] += chunk[i - stride];
                }
            }
            stride = block;
        }
    }

    /// Largest `|fracP − fracQ|` over all grid corners.
    pub fn estimate(&self) -> GridEstimate {
        self.clone().into_estimate()
    }

    /// [`estimate`](Self::estimate), reusing the cell array. The last
    /// cumulative pass also tracks the maximum, saving a sweep over memory.
    pub fn into_estimate(mut self) -> GridEstimate {
        let mut weights = std::mem::take(&mut self.weights);
        let r = self.resolution();
        let mut stride = 1;
        for _ in 1..self.dim {
            let block = stride * r;
            for chunk in weights.chunks_exact_mut(block) {
                for i in stride..block {
                    chunk[i] += chunk[i - stride];
                }
            }
            stride = block;
        }
        let mut best = 0i64;
        let mut arg = 0usize;
        for (i, &v) in weights[..stride].iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                arg = i;
            }
        }
        let (done, rest) = weights.split_at_mut(stride);
        let mut prev: &[i64] = done;
        for (row, chunk) in rest.chunks_exact_mut(stride).enumerate() {
            for (i, (c, &p)) in chunk.iter_mut().zip(prev).enumerate() {
                *c += p;
                if c.abs() > best {
                    best = c.abs();
                    arg = (row + 1) * stride + i;
                }
            }
            prev = chunk;
        }
        let r = self.resolution();
        let mut idx = vec![0usize; self.dim];
        let mut rem = arg;
        for j in (0..self.dim).rev() {
            idx[j] = rem % r;
            rem /= r;
        }
        return_cells(weights);
        GridEstimate {
            value: best as f64 / (self.np as f64 * self.nq as f64),
            witness: self.corner(&idx),
            k: self.k,
            resolution: r,
        }
    }
}

/// `|estimate − dKS(P, Q)| ≤ eps`, with `estimate ≤ dKS(P, Q)`.
pub fn grid_dks(p: &PointSet, q: &PointSet, eps: f64) -> Result<GridEstimate> {
    Ok(build_grid(p, q, eps)?.into_estimate())
}
