//! Three-dimensional dKS through the dual maximum-depth problem.
//!
//! cargo run --release --example dual_pipeline

use dks::dual::{approx_dks_pipeline, max_depth_point, to_dual};
use dks::{exact_dks_fast, range_difference, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> dks::Result<PointSet> {
    PointSet::from_flat(3, (0..3 * n).map(|_| rng.gen::<f64>().powf(scale)).collect())
}

fn main() -> dks::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = cloud(&mut rng, 800, 1.0)?;
    let q = cloud(&mut rng, 800, 1.3)?;

    let dual = to_dual(&p, &q)?;
    println!("{} weighted boxes, upper corner {:.3}", dual.len(), dual.xi());
    let deepest = max_depth_point(&dual);
    let witness = dual.to_primal(&deepest.z);
    println!(
        "max |depth| {:.5} (negated weights: {}) at primal corner {}",
        deepest.value, deepest.negated, witness
    );
    println!("primal check {:.5}", range_difference(&p, &q, &witness)?);
    println!("exact        {:.5}", exact_dks_fast(&p, &q)?.value);

    let est = approx_dks_pipeline(&p, &q, 0.15, 9)?;
    println!(
        "pipeline     {:.5} via {:?}, samples {:?} after {:?} halvings",
        est.value, est.route, est.sample_sizes, est.halving_rounds
    );
    Ok(())
}
