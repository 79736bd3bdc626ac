//! A measure whose secant slopes converge along eps_n = 4^{-k_n} but not
//! along the full scale net: the geometric-blocks cascade interleaves
//! zero and one blocks between doubly-exponential boundaries, so scales
//! eta_n = 2^{-(k_n + k_{n+1})} see a strictly different limit.
//!
//! Run: cargo run --release -p renyidim --example dichotomy

use renyidim::measure::{build_cascade, WeightProfile};
use renyidim::partition::build_table;
use renyidim::profiles::geometric_blocks;
use renyidim::slopes::{secant_estimate, sequence_estimate};

const LN_2: f64 = std::f64::consts::LN_2;

fn main() -> renyidim::Result<()> {
    let depth = 1 << 18; // the phenomenon needs doubly-exponential room
    let ratio = 2.0;
    let gb = geometric_blocks(ratio, depth, 1)?;
    let m = build_cascade(
        &WeightProfile::GeometricBlocks { ratio, seed: 1, len: depth },
        2.0,
        depth,
    )?;
    let t = build_table(&m, depth)?;

    println!("geometric-blocks cascade, ratio {ratio}, depth 2^18");
    println!("\nsecants along eps_n = 4^(-k_n)  (k doubling): expect 1/2");
    let ln_eps: Vec<f64> = gb
        .boundaries
        .iter()
        .map(|&k| -((2 * k) as f64) * LN_2)
        .filter(|le| -le / LN_2 <= depth as f64)
        .collect();
    let est = sequence_estimate(&t, &ln_eps, 5)?;
    for (row, v) in est.rows.iter().zip(&est.values) {
        println!("  row 2k = {row:>8}  secant = {v:.9}");
    }
    println!("  spacing warning tripped: {}", !est.spacing_ok);

    println!("\nsecants at the interleaved scales eta_n = 2^-(k_n + k_(n+1)):");
    println!("  expect 1/(1 + k_(n+1)/k_n) = 1/3 for ratio 2");
    for w in gb.boundaries.windows(2) {
        let (kl, kn) = (w[0] as usize, w[1] as usize);
        if kl + kn > depth {
            break;
        }
        println!("  row {:>8}  secant = {:.9}", kl + kn, secant_estimate(&t, kl + kn)?);
    }

    println!("\ntwo distinct accumulation points: the subsequence limit 1/2");
    println!("misses the net's excursions down to 1/3.");
    Ok(())
}
