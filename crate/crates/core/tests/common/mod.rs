#![allow(dead_code)]

use dks::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points uniform in `[0, 1)^d`, the first axis shifted by `shift`.
pub fn uniform(rng: &mut ChaCha8Rng, n: usize, d: usize, shift: f64) -> PointSet {
    PointSet::from_flat(
        d,
        (0..n * d)
            .map(|i| rng.gen::<f64>() + if i % d == 0 { shift } else { 0.0 })
            .collect(),
    )
    .unwrap()
}

/// Coordinates from a small integer grid, so ties and duplicates are common.
pub fn lattice(rng: &mut ChaCha8Rng, n: usize, d: usize, levels: u32) -> PointSet {
    PointSet::from_flat(d, (0..n * d).map(|_| rng.gen_range(0..levels) as f64).collect()).unwrap()
}

/// Either a uniform or a lattice sample, picked at random.
pub fn mixed(rng: &mut ChaCha8Rng, n: usize, d: usize) -> PointSet {
    match rng.gen_range(0..3) {
        0 => lattice(rng, n, d, 4),
        1 => {
            let shift = rng.gen_range(0.0..0.5);
            uniform(rng, n, d, shift)
        }
        _ => uniform(rng, n, d, 0.0),
    }
}
