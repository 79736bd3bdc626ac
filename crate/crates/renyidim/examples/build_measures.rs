//! Build cascade measures from weight profiles and evaluate them: solved
//! splitting weights, CDF values, interval masses, and a discretization
//! exported as CSV.
//!
//! Run: cargo run --release -p renyidim --example build_measures

use renyidim::csvio::atoms_to_csv;
use renyidim::measure::{build_cascade, solve_omega, WeightProfile};

fn main() -> renyidim::Result<()> {
    // the splitting weight solves ln(w^q + (1-w)^q) = (1-q) ln2 a
    println!("solved splitting weights at q = 2:");
    for a in [0.0, 0.25, 0.5, 30.0 / 47.0, 1.0] {
        println!("  a = {a:<10.6} -> omega = {:.12}", solve_omega(2.0, a)?);
    }

    // a = 1 gives omega = 1/2 at any q: the uniform (Lebesgue) cascade
    let lebesgue = build_cascade(&WeightProfile::Constant { a: 1.0, len: 16 }, 2.0, 16)?;
    println!("\nuniform cascade: F(0.375) = {}", lebesgue.cdf(0.375, 1e-12));

    // a = 0 collapses all mass onto the left edge
    let atom = build_cascade(&WeightProfile::Constant { a: 0.0, len: 16 }, 2.0, 16)?;
    println!("atomic cascade:  F(0.001) = {}", atom.cdf(0.001, 1e-12));

    // an explicit two-level profile, evaluated by hand in the tests
    let two = build_cascade(&WeightProfile::Explicit { values: vec![1.0, 0.0] }, 2.0, 2)?;
    println!("explicit (1,0):  F(0.25)  = {}", two.cdf(0.25, 0.0));

    // interval masses come from CDF differences
    let block = build_cascade(&WeightProfile::Block48 { len: 48 }, 2.0, 48)?;
    let leftmost = block.interval_mass(0.0, (2.0f64).powi(-12), 1e-12)?;
    println!("\nblock-48 cascade, mass of [0, 2^-12) = {leftmost:.12}");
    println!("(the first split keeps 1 - omega_1 = {:.12} on the left,", 1.0 - block.omegas()[0]);
    println!(" and the next eleven levels split 0/1 so nothing else leaves)");

    // discretize to atoms at dyadic left endpoints; CSV is the exchange format
    let dm = two.discretize(2)?;
    println!("\ndepth-2 discretization of the (1,0) cascade as CSV:");
    print!("{}", atoms_to_csv(&dm));
    Ok(())
}
