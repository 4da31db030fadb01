//! The anchored-quadrant heuristic (mdKS) and two constructions on which it
//! is unstable.
//!
//! mdKS only evaluates quadrants whose corner is a data point. Adding one
//! carefully placed point `p†` can open a quadrant that was previously
//! unavailable and change the statistic by a constant, while dKS moves by at
//! most `1 / (n + 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{DksError, Result};
use crate::points::{check_pair, PointSet};

/// Which quadrant orientations are evaluated at each anchor.
///
/// An orientation is a bit mask: bit `j` set means `x_j ≥ a_j` on axis `j`,
/// clear means `x_j ≤ a_j`. Mask 0 is the dominating range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrants {
    /// Dominating ranges only.
    Single,
    /// All `2^d` orientations.
    All,
    /// One fixed orientation.
    Oriented(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdksResult {
    pub value: f64,
    pub anchor: Vec<f64>,
    pub mask: u32,
}

/// Largest `|fracP − fracQ|` over closed quadrants anchored at points of
/// `P ∪ Q`. `O(2^d d n²)`.
pub fn mdks_with_witness(p: &PointSet, q: &PointSet, quadrants: Quadrants) -> Result<MdksResult> {
    check_pair(p, q)?;
    let d = p.dim();
    let masks: Vec<u32> = match quadrants {
        Quadrants::Single => vec![0],
        Quadrants::All => (0..1u32 << d).collect(),
        Quadrants::Oriented(m) => {
            if m >> d != 0 {
                return Err(DksError::InvalidParameter {
                    name: "mask",
                    value: m as f64,
                    reason: "has bits beyond the dimension",
                });
            }
            vec![m]
        }
    };
    let (np, nq) = (p.len() as i64, q.len() as i64);
    let inside = |x: &[f64], a: &[f64], mask: u32| {
        (0..d).all(|j| if mask >> j & 1 == 1 { x[j] >= a[j] } else { x[j] <= a[j] })
    };
    let mut best = (-1i64, Vec::new(), 0u32);
    for a in p.iter().chain(q.iter()) {
        for &mask in &masks {
            let cp = p.iter().filter(|x| inside(x, a, mask)).count() as i64;
            let cq = q.iter().filter(|x| inside(x, a, mask)).count() as i64;
            let diff = (cp * nq - cq * np).abs();
            if diff > best.0 {
                best = (diff, a.to_vec(), mask);
            }
        }
    }
    Ok(MdksResult {
        value: best.0 as f64 / (np as f64 * nq as f64),
        anchor: best.1,
        mask: best.2,
    })
}

pub fn mdks(p: &PointSet, q: &PointSet, quadrants: Quadrants) -> Result<f64> {
    Ok(mdks_with_witness(p, q, quadrants)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    Diagonal { jitter: f64 },
    Simplex { eta: f64 },
}

#[derive(Debug, Clone)]
pub struct InstabilityCase {
    pub p: PointSet,
    pub q: PointSet,
    pub alpha: f64,
    pub construction: Construction,
    /// The added point, when present (it is also the last point of `p`).
    pub dagger: Option<Vec<f64>>,
    /// The quadrant orientation through which `p†` acts.
    pub dagger_mask: u32,
}

impl InstabilityCase {
    pub fn dagger_present(&self) -> bool {
        self.dagger.is_some()
    }
}

pub const DEFAULT_JITTER: f64 = 1e-6;
pub const DEFAULT_ETA: f64 = 1e-3;

fn exact_count(n: usize, frac: f64, what: &str) -> Result<usize> {
    let v = n as f64 * frac;
    let r = v.round();
    if (v - r).abs() > 1e-9 {
        return Err(DksError::Infeasible(format!(
            "{what} = {v} is not a whole number of points"
        )));
    }
    Ok(r as usize)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(DksError::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must lie in (0, 1)",
        })
    }
}

/// P and Q of `n` points each along `x = y`, positions `t ∈ [0, 1)` with
/// vertical jitter `u ∈ ±jitter`. Along the line: balanced alternating
/// pairs, then `αn/2` points of Q, `αn` of P, `αn/2` of Q, then balanced
/// pairs again. `p† = (a, b)` with `b < a` bracketing the P block sits below
/// the line, so its upper-left quadrant holds exactly that block.
pub fn gen_diagonal_case(n: usize, alpha: f64, with_dagger: bool, jitter: f64, seed: u64) -> Result<InstabilityCase> {
    check_alpha(alpha)?;
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(DksError::InvalidParameter {
            name: "jitter",
            value: jitter,
            reason: "must be finite and non-negative",
        });
    }
    let block = exact_count(n, alpha, "alpha * n")?;
    if block < 2 || block % 2 != 0 {
        return Err(DksError::Infeasible(format!(
            "alpha * n = {block} must be an even count of at least 2"
        )));
    }
    let pairs = n - block;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // the sequence of owners along the line: true = P
    let mut owners = Vec::with_capacity(2 * n);
    let push_pairs = |owners: &mut Vec<bool>, count: usize, rng: &mut ChaCha8Rng| {
        for _ in 0..count {
            let first = rng.gen::<bool>();
            owners.push(first);
            owners.push(!first);
        }
    };
    push_pairs(&mut owners, pairs / 2, &mut rng);
    owners.extend(std::iter::repeat(false).take(block / 2));
    let p_start = owners.len();
    owners.extend(std::iter::repeat(true).take(block));
    let p_end = owners.len();
    owners.extend(std::iter::repeat(false).take(block / 2));
    push_pairs(&mut owners, pairs - pairs / 2, &mut rng);

    let step = 1.0 / owners.len() as f64;
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n);
    for (i, &is_p) in owners.iter().enumerate() {
        let t = i as f64 * step;
        let u = if jitter > 0.0 { rng.gen_range(-jitter..=jitter) } else { 0.0 };
        let pt = vec![t, t + u];
        if is_p {
            p.push(pt);
        } else {
            q.push(pt);
        }
    }

    let line = PointSet::new(2, p.iter().chain(&q).cloned().collect())?;
    check_off_diagonal(&line)?;

    let dagger = with_dagger.then(|| {
        let a = (p_end as f64 - 0.5) * step;
        let b = (p_start as f64 - 0.5) * step;
        vec![a, b]
    });
    if let Some(d) = &dagger {
        p.push(d.clone());
    }
    Ok(InstabilityCase {
        p: PointSet::new(2, p)?,
        q: PointSet::new(2, q)?,
        alpha,
        construction: Construction::Diagonal { jitter },
        dagger,
        dagger_mask: 0b10,
    })
}

/// Every anchor's upper-left and lower-right quadrants hold only the anchor.
fn check_off_diagonal(line: &PointSet) -> Result<()> {
    for a in line.iter() {
        for mask in [0b01u32, 0b10] {
            let held = line
                .iter()
                .filter(|x| (0..2).all(|j| if mask >> j & 1 == 1 { x[j] >= a[j] } else { x[j] <= a[j] }))
                .count();
            if held > 1 {
                return Err(DksError::Infeasible(format!(
                    "jitter too large: an off-diagonal quadrant holds {held} points"
                )));
            }
        }
    }
    Ok(())
}

/// Mass near the simplex `Σ x_j = 1`: P puts `αn/d` points at each vertex
/// `(η/(d−1), …, 1−η, …, η/(d−1))`; Q puts `αn/(d(d−1))` points at each
/// offset `(0, …, −η, …, 1+η, …, 0)` (`−η` on axis `ℓ`, `1+η` on the
/// vertex axis). The remaining `(1−α)n` points are identical in P and Q,
/// far from the simplex in `[10, 11]^d`. `p†` is the origin; its upper
/// orthant holds every P vertex and no Q offset.
pub fn gen_simplex_case(d: usize, n: usize, alpha: f64, eta: f64, with_dagger: bool, seed: u64) -> Result<InstabilityCase> {
    if !(3..=4).contains(&d) {
        return Err(DksError::UnsupportedDimension { dim: d, supported: "3, 4" });
    }
    check_alpha(alpha)?;
    if !(eta > 0.0 && eta < 0.5) {
        return Err(DksError::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "must lie in (0, 0.5)",
        });
    }
    let cluster = exact_count(n, alpha / d as f64, "alpha * n / d")?;
    let offset = exact_count(n, alpha / (d * (d - 1)) as f64, "alpha * n / (d (d - 1))")?;
    if offset == 0 {
        return Err(DksError::Infeasible("no points per offset".into()));
    }
    let rest = n - cluster * d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n);
    for j in 0..d {
        let mut v = vec![eta / (d - 1) as f64; d];
        v[j] = 1.0 - eta;
        p.extend(std::iter::repeat(v).take(cluster));
        for l in (0..d).filter(|&l| l != j) {
            let mut o = vec![0.0; d];
            o[l] = -eta;
            o[j] = 1.0 + eta;
            q.extend(std::iter::repeat(o).take(offset));
        }
    }
    for _ in 0..rest {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(10.0..11.0)).collect();
        p.push(x.clone());
        q.push(x);
    }
    let dagger = with_dagger.then(|| vec![0.0; d]);
    if let Some(o) = &dagger {
        p.push(o.clone());
    }
    Ok(InstabilityCase {
        p: PointSet::new(d, p)?,
        q: PointSet::new(d, q)?,
        alpha,
        construction: Construction::Simplex { eta },
        dagger,
        dagger_mask: (1 << d) - 1,
    })
}
