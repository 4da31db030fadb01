//! Shrinking a point set by repeated halving while keeping every
//! dominating-range fraction close, and measuring how close.
//!
//! cargo run --release --example eps_sample

use dks::eps_sample::{build_eps_sample, color_self_balancing, eval_discrepancy, RangeFamily};
use dks::{exact_dks_fast, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dks::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 4096;
    let ps = PointSet::from_flat(2, (0..2 * n).map(|_| rng.gen::<f64>()).collect())?;

    let chi = color_self_balancing(&ps, 1)?;
    let disc = eval_discrepancy(&ps, &chi, RangeFamily::Dominating)?;
    println!("one coloring: total {:+}, dominating-range discrepancy {disc}", chi.total());

    for eps in [0.2, 0.1, 0.05] {
        let s = build_eps_sample(&ps, eps, 7)?;
        let measured = exact_dks_fast(&ps, &s.points)?.value;
        println!(
            "eps {eps:<4} target {:>6}  sizes {:?}  bound {:.4}  measured {:.4}",
            s.size_target, s.provenance.sizes, s.error_bound, measured
        );
    }
    Ok(())
}
