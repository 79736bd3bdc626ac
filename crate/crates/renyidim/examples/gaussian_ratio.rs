//! Gaussian filtering against the partition function: the envelope
//! constant C, the two-sided bound on eps^{q-1} ||g_eps * mu||_q^q / S^q(eps),
//! and the monotonicity of the filtered norm in eps.
//!
//! Run: cargo run --release -p renyidim --example gaussian_ratio

use renyidim::gaussfilter::{
    check_monotonicity, check_ratio_bound, envelope_constants, lq_norm_q, QuadratureSpec,
};
use renyidim::measure::{build_cascade, DiscretizedMeasure, WeightProfile};

fn main() -> renyidim::Result<()> {
    for &q in &[2.0, 0.5] {
        let env = envelope_constants(q, 12)?;
        println!("q = {q}: envelope constant C = {:.9}", env.c);
    }

    // point mass: S = 1 at every scale, so the ratio is eps^{q-1} I itself,
    // which the closed form pins at 1/(2 sqrt(pi)) for q = 2
    let d0 = DiscretizedMeasure::delta(0.0);
    let quad = QuadratureSpec::default();
    let i = lq_norm_q(&d0, 0.25, 2.0, &quad)?;
    println!(
        "\npoint mass, eps = 1/4: eps^(q-1) I = {:.9} (1/(2 sqrt pi) = {:.9})",
        0.25 * i,
        0.5 / std::f64::consts::PI.sqrt()
    );

    let depth = 12;
    let eps: Vec<f64> = (3..=8).map(|n| (2.0f64).powi(-n)).collect();
    for (name, profile) in [
        ("uniform", WeightProfile::Constant { a: 1.0, len: depth }),
        ("a = 1/2", WeightProfile::Constant { a: 0.5, len: depth }),
        ("block-48", WeightProfile::Block48 { len: depth }),
    ] {
        let m = build_cascade(&profile, 2.0, depth)?;
        let rep = check_ratio_bound(&m, 2.0, &eps, depth)?;
        println!("\n{name} cascade, q = 2 (ln C = {:.4}):", rep.c.ln());
        for row in &rep.rows {
            println!("  ln eps = {:>8.4}  ln ratio = {:>8.4}", row.ln_eps, row.ln_ratio);
        }
    }

    // ||g_eps * mu||_q falls as eps grows for q > 1 and rises for q < 1
    let m = build_cascade(&WeightProfile::Constant { a: 0.5, len: depth }, 2.0, depth)?;
    let dm = m.discretize(depth)?;
    let grid: Vec<f64> = (1..=8).rev().map(|n| (2.0f64).powi(-n)).collect();
    let rep = check_monotonicity(&dm, 2.0, &grid)?;
    println!("\nfiltered-norm monotonicity at q = 2 (expect nonincreasing):");
    for (eps, norm) in &rep.norms {
        println!("  eps = {eps:<12.6} ||g_eps * mu||_2 = {norm:.9}");
    }
    Ok(())
}
