//! Evaluate the partition function S^q(eps) three ways — closed form on
//! dyadic scales, direct cell enumeration, and bucketing of a
//! discretization — and verify the dyadic jump bounds.
//!
//! Run: cargo run --release -p renyidim --example partition_tables

use renyidim::measure::{build_cascade, WeightProfile};
use renyidim::partition::{
    build_table, check_jump_bounds, partition_bucket, partition_enumerate, partition_exact_dyadic,
};

fn main() -> renyidim::Result<()> {
    let depth = 16;
    let m = build_cascade(&WeightProfile::Block48 { len: depth }, 2.0, depth)?;

    println!("block-48 cascade at q = 2, depth {depth}");
    println!("{:>4} {:>22} {:>22} {:>22}", "n", "closed form", "enumeration", "bucketed");
    let dm = m.discretize(depth)?;
    for n in [0usize, 1, 8, 12, 13, 14] {
        let exact = partition_exact_dyadic(&m, n)?;
        let enumerated = partition_enumerate(&m, n, 2.0)?;
        let bucketed = partition_bucket(&dm, (2.0f64).powi(-(n as i32)), 2.0)?;
        println!("{n:>4} {exact:>22.15} {enumerated:>22.15} {bucketed:>22.15}");
    }

    // the closed form only covers the build exponent; enumeration covers any q
    let off = partition_enumerate(&m, 10, 3.0)?;
    println!("\nln S at q_eval = 3 (enumeration only): {off:.15}");

    // every halving step obeys 0 <= ln S(eps) - ln S(eps/2) <= (q-1) ln 2
    let t = build_table(&m, depth)?;
    let diag = check_jump_bounds(&t, 1)?;
    println!(
        "\njump bounds over {} steps: max violation {:.1e}, largest step {:.6} (bound {:.6})",
        diag.steps,
        diag.max_violation,
        diag.max_step,
        diag.bound_b * std::f64::consts::LN_2
    );
    Ok(())
}
