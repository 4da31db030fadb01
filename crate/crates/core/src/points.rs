//! Point sets, dominating ranges and half-open rectangles.
//!
//! A [`PointSet`] is a finite multiset of `d`-dimensional points, each with
//! weight `1/n`. Ranges use a closed comparison on the upper side
//! (`x ⪯ z`) and a strict comparison on the lower side of a [`Rect`]
//! (`lo ≺ x`), so a rectangle count splits exactly into `2^d` corner counts.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{DksError, Result};

/// One coordinate of a range corner. Unbounded sides are kept symbolic so no
/// arithmetic ever touches an infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    NegInf,
    At(f64),
    PosInf,
}

impl Bound {
    /// `x <= self`.
    #[inline]
    pub fn admits(self, x: f64) -> bool {
        match self {
            Bound::NegInf => false,
            Bound::At(b) => x <= b,
            Bound::PosInf => true,
        }
    }

    /// `self < x`.
    #[inline]
    pub fn is_strictly_below(self, x: f64) -> bool {
        match self {
            Bound::NegInf => true,
            Bound::At(b) => b < x,
            Bound::PosInf => false,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Bound::At(b) => Some(b),
            _ => None,
        }
    }

    fn rank(self) -> (i8, f64) {
        match self {
            Bound::NegInf => (-1, 0.0),
            Bound::At(b) => (0, b),
            Bound::PosInf => (1, 0.0),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, x) = self.rank();
        let (b, y) = other.rank();
        match a.cmp(&b) {
            Ordering::Equal => x.partial_cmp(&y),
            ord => Some(ord),
        }
    }
}

impl From<f64> for Bound {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Bound::PosInf
        } else if x == f64::NEG_INFINITY {
            Bound::NegInf
        } else {
            Bound::At(x)
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::At(x) => write!(f, "{x}"),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::At(x) => serializer.serialize_f64(*x),
            Bound::NegInf => serializer.serialize_str("-inf"),
            Bound::PosInf => serializer.serialize_str("+inf"),
        }
    }
}

/// A finite multiset of points in `R^d`, stored row-major.
///
/// Per-axis sort orders are computed on first use and cached; the cache is a
/// `OnceLock`, so a shared `PointSet` can be queried from several threads.
#[derive(Clone)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    order: OnceLock<Vec<Vec<u32>>>,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("dim", &self.dim)
            .field("len", &self.len())
            .finish()
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coords == other.coords
    }
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(DksError::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(DksError::RaggedPoint {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a point set from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(DksError::ZeroDimension);
        }
        if coords.len() % dim != 0 {
            return Err(DksError::RaggedPoint {
                index: coords.len() / dim,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(DksError::NonFinite {
                index: pos / dim,
                axis: pos % dim,
            });
        }
        Ok(Self {
            dim,
            coords,
            order: OnceLock::new(),
        })
    }

    /// One-dimensional convenience constructor.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// Indices of the points sorted by coordinate `axis` (stable on ties).
    pub fn axis_order(&self, axis: usize) -> &[u32] {
        &self.order.get_or_init(|| self.compute_orders())[axis]
    }

    fn compute_orders(&self) -> Vec<Vec<u32>> {
        (0..self.dim)
            .map(|axis| {
                let mut idx: Vec<u32> = (0..self.len() as u32).collect();
                idx.sort_by(|&a, &b| {
                    self.point(a as usize)[axis].total_cmp(&self.point(b as usize)[axis])
                });
                idx
            })
            .collect()
    }

    /// Sorted distinct values of coordinate `axis`.
    pub fn distinct_values(&self, axis: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.iter().map(|p| p[axis]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
            order: OnceLock::new(),
        }
    }

    /// A copy with one more point appended.
    pub fn with_point(&self, p: &[f64]) -> Result<PointSet> {
        check_dim(self.dim, p.len())?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(p);
        PointSet::from_flat(self.dim, coords)
    }

    /// Multiset union, `self` first.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        check_dim(self.dim, other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointSet {
            dim: self.dim,
            coords,
            order: OnceLock::new(),
        })
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(DksError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_pair(p: &PointSet, q: &PointSet) -> Result<()> {
    check_dim(p.dim(), q.dim())?;
    if p.is_empty() || q.is_empty() {
        return Err(DksError::EmptyPointSet);
    }
    Ok(())
}

/// The dominating range `R_z = { x : x ⪯ z }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DominatingRange {
    pub z: Vec<Bound>,
}

impl fmt::Display for DominatingRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, b) in self.z.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

impl DominatingRange {
    pub fn new(z: Vec<Bound>) -> Self {
        Self { z }
    }

    pub fn at(z: &[f64]) -> Self {
        Self {
            z: z.iter().map(|&x| Bound::At(x)).collect(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            z: vec![Bound::PosInf; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        self.z.iter().zip(x).all(|(b, &v)| b.admits(v))
    }
}

/// The half-open box `R_{lo,hi} = { x : lo ≺ x ⪯ hi }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rect {
    lo: Vec<Bound>,
    hi: Vec<Bound>,
}

impl Rect {
    pub fn new(lo: Vec<Bound>, hi: Vec<Bound>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if let Some(axis) = lo
            .iter()
            .zip(&hi)
            .position(|(l, h)| !matches!(l.partial_cmp(h), Some(Ordering::Less | Ordering::Equal)))
        {
            return Err(DksError::InvalidRect { axis });
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Bound] {
        &self.lo
    }

    pub fn hi(&self) -> &[Bound] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .all(|((l, h), &v)| l.is_strictly_below(v) && h.admits(v))
    }

    /// The corner that takes `lo` on the axes set in `mask` and `hi` elsewhere.
    pub fn corner(&self, mask: usize) -> DominatingRange {
        DominatingRange::new(
            (0..self.dim())
                .map(|j| if mask >> j & 1 == 1 { self.lo[j] } else { self.hi[j] })
                .collect(),
        )
    }
}

/// `|{ p in ps : p ⪯ z }|`, ties included.
pub fn count_dominated(ps: &PointSet, z: &DominatingRange) -> Result<usize> {
    check_dim(ps.dim(), z.dim())?;
    Ok(ps.iter().filter(|p| z.contains(p)).count())
}

/// `|{ p in ps : lo ≺ p ⪯ hi }|` by inclusion-exclusion over the `2^d`
/// corners of the box.
pub fn count_rect(ps: &PointSet, r: &Rect) -> Result<usize> {
    check_dim(ps.dim(), r.dim())?;
    let mut total: i64 = 0;
    for mask in 0..(1usize << r.dim()) {
        let c = count_dominated(ps, &r.corner(mask))? as i64;
        if mask.count_ones() % 2 == 0 {
            total += c;
        } else {
            total -= c;
        }
    }
    debug_assert!(total >= 0);
    Ok(total as usize)
}

/// Applies a strictly increasing map to every axis.
///
/// Fails if any map breaks the sorted order of its axis, including merging
/// two distinct values into one or producing a non-finite value.
pub fn apply_monotone(ps: &PointSet, maps: &[&dyn Fn(f64) -> f64]) -> Result<PointSet> {
    let d = ps.dim();
    if maps.len() != d {
        return Err(DksError::MapCount {
            expected: d,
            found: maps.len(),
        });
    }
    let mut coords = ps.coords().to_vec();
    for (k, c) in coords.iter_mut().enumerate() {
        *c = maps[k % d](*c);
    }
    let out = PointSet::from_flat(d, coords).map_err(|e| match e {
        DksError::NonFinite { axis, .. } => DksError::NonMonotoneMap { axis },
        other => other,
    })?;
    let orders: Vec<Vec<u32>> = (0..d).map(|j| ps.axis_order(j).to_vec()).collect();
    for (axis, order) in orders.iter().enumerate() {
        for w in order.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            let (old_a, old_b) = (ps.point(a)[axis], ps.point(b)[axis]);
            let (new_a, new_b) = (out.point(a)[axis], out.point(b)[axis]);
            let ok = if old_a < old_b {
                new_a < new_b
            } else {
                new_a == new_b
            };
            if !ok {
                return Err(DksError::NonMonotoneMap { axis });
            }
        }
    }
    let _ = out.order.set(orders);
    Ok(out)
}
