//! Multidimensional Kolmogorov–Smirnov distance over dominating rectangles.
//!
//! Start with [`PointSet`] and [`exact_dks_fast`]. [`grid::grid_dks`] and
//! [`dual::approx_dks_pipeline`] trade exactness for speed, and
//! [`two_sample::two_sample_test`] turns the distance into a level-δ test.

pub mod cli;
pub mod dominance;
pub mod dual;
pub mod eps_sample;
pub mod error;
pub mod exact;
pub mod grid;
pub mod instability;
pub mod points;
pub mod seed;
pub mod two_sample;

pub use error::{DksError, Result};
pub use exact::{brute_force_dks, exact_dks, exact_dks_fast, range_difference, DksResult};
pub use points::{apply_monotone, count_dominated, count_rect, Bound, DominatingRange, PointSet, Rect};
