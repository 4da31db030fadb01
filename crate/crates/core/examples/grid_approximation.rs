//! The stratified grid estimate next to the exact value as eps shrinks.
//!
//! cargo run --release --example grid_approximation

use dks::grid::grid_dks;
use dks::{exact_dks_fast, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dks::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 5000;
    let p = PointSet::from_flat(2, (0..2 * n).map(|_| rng.gen::<f64>()).collect())?;
    // Q leans towards the origin on the first axis
    let q = PointSet::from_flat(
        2,
        (0..2 * n)
            .map(|i| {
                let u: f64 = rng.gen();
                if i % 2 == 0 { u * u.sqrt() } else { u }
            })
            .collect(),
    )?;

    let exact = exact_dks_fast(&p, &q)?.value;
    println!("exact {exact:.5}");
    for eps in [0.5, 0.2, 0.1, 0.05, 0.01] {
        let g = grid_dks(&p, &q, eps)?;
        println!(
            "eps {eps:<5} k {:>5} resolution {:>5}  estimate {:.5}  gap {:.5}",
            g.k,
            g.resolution,
            g.value,
            exact - g.value
        );
        assert!(g.value <= exact && exact - g.value <= eps);
    }
    Ok(())
}
