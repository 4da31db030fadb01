//! One added point moves the anchored-quadrant heuristic by a constant,
//! while dKS barely moves.
//!
//! cargo run --release --example instability

use dks::exact_dks_fast;
use dks::instability::{gen_diagonal_case, gen_simplex_case, mdks, Quadrants, DEFAULT_ETA, DEFAULT_JITTER};

fn main() -> dks::Result<()> {
    println!("diagonal, n = 400, alpha = 0.5");
    for dagger in [false, true] {
        let c = gen_diagonal_case(400, 0.5, dagger, DEFAULT_JITTER, 1)?;
        println!(
            "  p† {:<5}  mdks single {:.4}  all {:.4}  dks {:.4}",
            dagger,
            mdks(&c.p, &c.q, Quadrants::Single)?,
            mdks(&c.p, &c.q, Quadrants::All)?,
            exact_dks_fast(&c.p, &c.q)?.value
        );
    }

    for d in [3, 4] {
        let n = if d == 3 { 600 } else { 1200 };
        println!("simplex, d = {d}, n = {n}, alpha = 0.6");
        for dagger in [false, true] {
            let c = gen_simplex_case(d, n, 0.6, DEFAULT_ETA, dagger, 1)?;
            println!(
                "  p† {:<5}  mdks upper orthant {:.4}  all {:.4}  dks {:.4}",
                dagger,
                mdks(&c.p, &c.q, Quadrants::Oriented(c.dagger_mask))?,
                mdks(&c.p, &c.q, Quadrants::All)?,
                exact_dks_fast(&c.p, &c.q)?.value
            );
        }
    }
    Ok(())
}
