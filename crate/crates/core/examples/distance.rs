//! Exact dKS three ways on a small example, plus a witness corner.
//!
//! cargo run --example distance

use dks::{brute_force_dks, exact_dks, exact_dks_fast, range_difference, PointSet};

fn main() -> dks::Result<()> {
    let p = PointSet::new(2, vec![vec![1.0, 1.0], vec![2.0, 2.0]])?;
    let q = PointSet::new(2, vec![vec![1.0, 2.0], vec![2.0, 1.0]])?;

    let sweep = exact_dks(&p, &q)?;
    let engine = exact_dks_fast(&p, &q)?;
    let naive = brute_force_dks(&p, &q)?;
    println!("sweep        {:.4} at {}", sweep.value, sweep.witness);
    println!("segment tree {:.4} at {}", engine.value, engine.witness);
    println!("enumeration  {:.4}", naive.value);

    // the witness need not be a data point
    let check = range_difference(&p, &q, &sweep.witness)?;
    assert_eq!(check, sweep.value);

    let line_p = PointSet::from_values(&[1.0, 2.0, 3.0])?;
    let line_q = PointSet::from_values(&[1.5, 2.5, 3.5])?;
    println!("1d example   {:.4}", exact_dks(&line_p, &line_q)?.value);
    Ok(())
}
