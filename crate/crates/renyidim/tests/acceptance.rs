//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line with the measured values and elapsed time.
//!
//! Run with:
//!   cargo test -p renyidim --test acceptance -- --nocapture

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use renyidim::gaussfilter::{check_monotonicity, check_ratio_bound};
use renyidim::measure::{build_cascade, WeightProfile};
use renyidim::partition::{build_table, check_jump_bounds, partition_enumerate};
use renyidim::profiles;
use renyidim::slopes::{
    convolution_bound_check, dimension_report_from_table, lsq_discrete, lsq_gap_check,
    secant_estimate, sequence_estimate, tail_secant_range, ReportConfig,
};

const LN_2: f64 = std::f64::consts::LN_2;

struct Criterion {
    name: &'static str,
    limit: Duration,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, limit_secs: u64) -> Self {
        Criterion { name, limit: Duration::from_secs(limit_secs), start: Instant::now() }
    }

    fn finish(self, ok: bool, detail: &str) {
        let elapsed = self.start.elapsed();
        let verdict = if ok && elapsed < self.limit { "PASS" } else { "FAIL" };
        println!(
            "ACCEPTANCE {}: {verdict} ({detail}; elapsed {elapsed:.2?} / limit {:?})",
            self.name, self.limit
        );
        assert!(ok, "{}: {detail}", self.name);
        assert!(
            elapsed < self.limit,
            "{}: runtime {elapsed:.2?} exceeded {:?}",
            self.name,
            self.limit
        );
    }
}

/// The shared random corpus: 100 explicit profiles, depth <= 16,
/// q cycling over {1/2, 2, 3}.
fn random_corpus() -> Vec<(Vec<f64>, f64)> {
    let mut rng = StdRng::seed_from_u64(0x5EED_CA5C_ADE5_EED5);
    let qs = [0.5, 2.0, 3.0];
    (0..100)
        .map(|i| {
            let depth = rng.gen_range(4..=16usize);
            let values: Vec<f64> = (0..depth).map(|_| rng.gen::<f64>()).collect();
            (values, qs[i % 3])
        })
        .collect()
}

#[test]
fn criterion_01_closed_form_vs_enumeration() {
    let c = Criterion::new("1 (closed form = enumeration)", 10);
    let mut max_err = 0.0f64;
    for (values, q) in random_corpus() {
        let depth = values.len();
        let sum: f64 = values.iter().sum();
        let expect = (1.0 - q) * LN_2 * sum;
        let m = build_cascade(&WeightProfile::Explicit { values }, q, depth).unwrap();
        let got = partition_enumerate(&m, depth, q).unwrap();
        max_err = max_err.max((got - expect).abs());
    }
    c.finish(max_err < 1e-10, &format!("max |enumeration - closed form| = {max_err:.3e}"));
}

#[test]
fn criterion_02_jump_bounds_zero_violations() {
    let c = Criterion::new("2 (dyadic jump bounds)", 5);
    let mut worst = 0.0f64;
    for (values, q) in random_corpus() {
        let depth = values.len();
        let m = build_cascade(&WeightProfile::Explicit { values }, q, depth).unwrap();
        let t = build_table(&m, depth).unwrap();
        let diag = check_jump_bounds(&t, 1).unwrap();
        worst = worst.max(diag.max_violation);
    }
    c.finish(worst <= 1e-12, &format!("max violation = {worst:.3e}"));
}

#[test]
fn criterion_03_gaussian_ratio_bound() {
    let c = Criterion::new("3 (envelope ratio bound)", 60);
    let depth = 16usize;
    let eps: Vec<f64> = (3..=10).map(|n| (2.0f64).powi(-n)).collect();
    let mut worst_margin = f64::INFINITY; // ln C - |ln ratio|, must stay >= 0
    let mut checked = 0usize;
    for &q in &[0.5, 2.0] {
        for profile in [
            WeightProfile::Constant { a: 1.0, len: depth },
            WeightProfile::Constant { a: 0.5, len: depth },
            WeightProfile::Block48 { len: depth },
        ] {
            let m = build_cascade(&profile, q, depth).unwrap();
            let rep = check_ratio_bound(&m, q, &eps, depth).unwrap();
            for row in &rep.rows {
                worst_margin = worst_margin.min(rep.c.ln() - row.ln_ratio.abs());
                checked += 1;
            }
        }
    }
    c.finish(
        worst_margin >= 0.0 && checked == 48,
        &format!("{checked} ratios, min (ln C - |ln ratio|) = {worst_margin:.3}"),
    );
}

#[test]
fn criterion_04_norm_monotonicity() {
    let c = Criterion::new("4 (filtered-norm monotonicity)", 60);
    let depth = 12usize;
    // 16 geometrically spaced scales in [2^-8, 2^-1]
    let grid: Vec<f64> = (0..16)
        .map(|i| (2.0f64).powf(-8.0 + 7.0 * i as f64 / 15.0))
        .collect();
    let mut runs = 0usize;
    for &q in &[0.5, 2.0] {
        for profile in [
            WeightProfile::Constant { a: 1.0, len: depth },
            WeightProfile::Constant { a: 0.5, len: depth },
            WeightProfile::Block48 { len: depth },
        ] {
            let m = build_cascade(&profile, q, depth).unwrap();
            let dm = m.discretize(depth).unwrap();
            check_monotonicity(&dm, q, &grid).unwrap();
            runs += 1;
        }
    }
    c.finish(runs == 6, &format!("{runs} measure/exponent pairs monotone at 1e-8 relative"));
}

#[test]
fn criterion_05_subsequence_dichotomy() {
    let c = Criterion::new("5 (subsequence dichotomy)", 30);
    let depth = 1usize << 22; // ~4.2e6
    let gb = profiles::geometric_blocks(2.0, depth, 1).unwrap();
    let m = build_cascade(
        &WeightProfile::GeometricBlocks { ratio: 2.0, seed: 1, len: depth },
        2.0,
        depth,
    )
    .unwrap();
    let t = build_table(&m, depth).unwrap();

    // along eps_n = 4^{-k_n}: rows 2 k_n, value 1/2
    let ln_eps: Vec<f64> = gb
        .boundaries
        .iter()
        .map(|&k| -((2 * k) as f64) * LN_2)
        .filter(|le| -le / LN_2 <= depth as f64)
        .collect();
    let est = sequence_estimate(&t, &ln_eps, 5).unwrap();
    let mut max_err_half = 0.0f64;
    for v in est.values.iter().rev().take(5) {
        max_err_half = max_err_half.max((v - 0.5).abs());
    }
    assert!(!est.spacing_ok, "doubly-exponential scales must trip the spacing warning");

    // along eta_n = 2^{-(k_n + k_{n+1})}: value 1/(1 + k_{n+1}/k_n)
    let mut max_err_eta = 0.0f64;
    let mut eta_count = 0usize;
    for w in gb.boundaries.windows(2) {
        let (kl, kn) = (w[0] as usize, w[1] as usize);
        if kl + kn > depth {
            break;
        }
        let v = secant_estimate(&t, kl + kn).unwrap();
        let target = 1.0 / (1.0 + kn as f64 / kl as f64);
        max_err_eta = max_err_eta.max((v - target).abs());
        eta_count += 1;
    }
    let distinct = (0.5f64 - 1.0 / 3.0).abs() > 0.02 + max_err_half + max_err_eta;
    c.finish(
        max_err_half <= 0.01 && max_err_eta <= 0.01 && eta_count >= 5 && distinct,
        &format!(
            "last-5 secants at 4^-k off 1/2 by {max_err_half:.2e}; {eta_count} interleaved scales off 1/(1+R) by {max_err_eta:.2e}"
        ),
    );
}

#[test]
fn criterion_06_checkpoint_rationals_exact() {
    let c = Criterion::new("6 (checkpoint rationals exact)", 10);
    let n_max = 36 * 48usize.pow(3);
    let a = profiles::block48(n_max);
    let mut cps = Vec::new();
    for m in 1..=3u32 {
        cps.push((48usize.pow(m), (30i128, 47i128)));
        cps.push((12 * 48usize.pow(m), (5, 94)));
        cps.push((36 * 48usize.pow(m), (193, 282)));
    }
    let indices: Vec<usize> = cps.iter().map(|c| c.0).collect();
    let stats = profiles::running_stats(&a, &indices, true).unwrap();
    let mut all_exact = true;
    for (st, (_, (p, q))) in stats.iter().zip(&cps) {
        if !st.exact.unwrap().average_is(st.n, *p, *q) {
            all_exact = false;
        }
    }
    c.finish(all_exact, &format!("{} checkpoints match their rationals exactly", cps.len()));
}

#[test]
fn criterion_07_bestfit_exceeds_secant_sup() {
    let c = Criterion::new("7 (best-fit vs secant gap)", 60);
    let n4 = 48usize.pow(4);
    let a = profiles::block48(n4);
    let stats = profiles::running_stats(&a, &[n4], false).unwrap();
    let n = n4 as f64;
    let bestfit = 6.0 * stats[0].weighted_sum / (n * n * n);

    let m = build_cascade(&WeightProfile::Block48 { len: n4 }, 2.0, n4).unwrap();
    let t = build_table(&m, n4).unwrap();
    let (_, secant_sup) = tail_secant_range(&t, 0.5).unwrap();
    let cap = 193.0 / 282.0 + 0.005;
    c.finish(
        bestfit > 0.70 && secant_sup <= cap && bestfit - secant_sup > 0.01,
        &format!(
            "best-fit {bestfit:.6} > 0.70, secant sup {secant_sup:.6} <= {cap:.6}, gap {:.4}",
            bestfit - secant_sup
        ),
    );
}

#[test]
fn criterion_08_variant_equivalence_and_gap_decay() {
    let c = Criterion::new("8 (best-fit formula equivalence + O(1/n) gap)", 30);
    // 200 random tables
    let mut rng = StdRng::seed_from_u64(0x0BE5_7F17);
    let mut max_spread = 0.0f64;
    for i in 0..200 {
        let len = rng.gen_range(8..=64usize);
        let q = [0.5, 2.0, 3.0][i % 3];
        let values: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let m = build_cascade(&WeightProfile::Explicit { values }, q, len).unwrap();
        let t = build_table(&m, len).unwrap();
        let n = rng.gen_range(4..=len);
        let fits: Vec<f64> =
            (1..=4u8).map(|v| lsq_discrete(&t, n, 2.0, v).unwrap().slope).collect();
        for a in &fits {
            for b in &fits {
                max_spread = max_spread.max((a - b).abs());
            }
        }
    }

    let n3 = 48usize.pow(3);
    let m = build_cascade(&WeightProfile::Block48 { len: n3 }, 2.0, n3).unwrap();
    let t = build_table(&m, n3).unwrap();
    let gap = lsq_gap_check(&t, 2.0, &[48, 48 * 48, n3]).unwrap();
    let ratio = gap.max_scaled / gap.median_scaled.max(1e-300);
    c.finish(
        max_spread < 1e-9 && gap.bounded,
        &format!(
            "variant spread {max_spread:.2e} < 1e-9; gap*n max/median = {ratio:.3} (max {:.4})",
            gap.max_scaled
        ),
    );
}

#[test]
fn criterion_09_matuszewska_window_estimates() {
    let c = Criterion::new("9 (Matuszewska estimates + ordering)", 120);
    let n4 = 48usize.pow(4);
    let m = build_cascade(&WeightProfile::Block48 { len: n4 }, 2.0, n4).unwrap();
    let t = build_table(&m, n4).unwrap();
    let rep = dimension_report_from_table(&t, ReportConfig::default()).unwrap();
    let ordered = rep.d_lower_mat <= rep.d_minus + 1e-9
        && rep.d_minus <= rep.d_plus + 1e-12
        && rep.d_plus <= rep.d_upper_mat + 1e-9;
    // the sweep: every window up to the report's span/6 (all growing
    // linearly with the table) must keep the estimates pinned at the
    // extremes
    let span = n4 as f64 * LN_2;
    let windows: Vec<f64> = [1.0 / 48.0, 1.0 / 24.0, 1.0 / 12.0, 1.0 / 6.0]
        .iter()
        .map(|f| f * span)
        .collect();
    let sweep = renyidim::slopes::matuszewska_sweep(&t, &windows).unwrap();
    let sweep_ok = sweep.iter().all(|r| r.beta_hat <= 0.06 && r.alpha_hat >= 0.94);
    c.finish(
        rep.d_lower_mat <= 0.06 && rep.d_upper_mat >= 0.94 && ordered && sweep_ok,
        &format!(
            "beta_hat = {:.4} <= 0.06, alpha_hat = {:.4} >= 0.94 across {} windows, D-- <= D- ({:.4}) <= D+ ({:.4}) <= D++",
            rep.d_lower_mat,
            rep.d_upper_mat,
            sweep.len(),
            rep.d_minus,
            rep.d_plus
        ),
    );
}

#[test]
fn criterion_10_convolution_lower_bound() {
    let c = Criterion::new("10 (convolution dimension bound)", 120);
    let depth = 10usize;
    let leb = build_cascade(&WeightProfile::Constant { a: 1.0, len: depth }, 2.0, depth).unwrap();
    let atom = build_cascade(&WeightProfile::Constant { a: 0.0, len: depth }, 2.0, depth).unwrap();
    let half = build_cascade(&WeightProfile::Constant { a: 0.5, len: depth }, 2.0, depth).unwrap();
    let r = 4.0 / 3.0;
    let cases = [
        ("uniform * uniform", convolution_bound_check(&leb, &leb, 2.0, r, r, depth).unwrap()),
        ("point * uniform", convolution_bound_check(&atom, &leb, 2.0, r, r, depth).unwrap()),
        ("cascade * cascade", convolution_bound_check(&half, &half, 2.0, r, r, depth).unwrap()),
    ];
    let mut detail = String::new();
    let mut all_hold = true;
    for (name, chk) in &cases {
        if !chk.holds_within(0.05) {
            all_hold = false;
        }
        detail.push_str(&format!("{name}: margin {:.4}; ", chk.margin));
    }
    c.finish(all_hold, detail.trim_end_matches("; "));
}
