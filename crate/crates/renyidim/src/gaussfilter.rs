//! Gaussian filtering: `I^q(eps) = ||g_eps * mu||_q^q` for the standard
//! Gaussian `g(x) = (2 pi)^{-1/2} exp(-x^2/2)` with the scaling
//! `g_eps(x) = eps^{-1} g(x/eps)` (so `g_eps * g_eta = g_sqrt(eps^2+eta^2)`),
//! the two-sided ratio bound `1/C <= eps^{q-1} I^q(eps) / S^q(eps) <= C`
//! with explicitly computed envelope constants, and the monotonicity of
//! `||g_eps * mu||_q` in eps.

use crate::error::{Error, Result};
use crate::measure::{CascadeMeasure, DiscretizedMeasure};
use crate::partition::partition_bucket;

/// Gaussian tails beyond this many sigmas contribute < 1e-20 relative and
/// are dropped, both in density sums and in quadrature domains.
const PAD_SIGMAS: f64 = 10.0;

/// Slack allowed on mathematically guaranteed inequalities to absorb
/// floating-point noise.
const CHECK_SLACK: f64 = 1e-9;

/// Standard Gaussian density.
pub fn density(x: f64) -> f64 {
    const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_TAU * (-0.5 * x * x).exp()
}

/// Scaled kernel `g_eps(x) = eps^{-1} g(x / eps)`.
pub fn scaled_density(eps: f64, x: f64) -> f64 {
    density(x / eps) / eps
}

/// `(g_eps * mu)(x)` for a discretized measure: the windowed sum
/// `sum_i w_i g_eps(x - x_i)` over atoms within 10 eps of x.
pub fn filtered_density(dm: &DiscretizedMeasure, eps: f64, x: f64) -> f64 {
    let atoms = dm.atoms();
    let lo = x - PAD_SIGMAS * eps;
    let hi = x + PAD_SIGMAS * eps;
    let start = atoms.partition_point(|a| a.position < lo);
    let mut sum = 0.0;
    for a in &atoms[start..] {
        if a.position > hi {
            break;
        }
        if a.weight != 0.0 {
            sum += a.weight * scaled_density(eps, x - a.position);
        }
    }
    sum
}

/// Quadrature controls for [`lq_norm_q`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Step-halving stops when successive composite-Simpson values agree
    /// to this relative tolerance.
    pub rel_tol: f64,
    /// Initial step is `eps / initial_step_divisor`.
    pub initial_step_divisor: f64,
    /// Refinement cap; exceeding it is a quadrature error.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-6, initial_step_divisor: 8.0, max_refinements: 8 }
    }
}

/// `I^q(eps) = ||g_eps * mu||_q^q`: composite Simpson quadrature of the
/// filtered density's q-th power over the support padded by 10 eps,
/// step-halved until stable.
///
/// Requires `eps >= 4 * resolution` so the atomic stand-in's partition
/// sums agree with the underlying measure at the tested scale.
pub fn lq_norm_q(
    dm: &DiscretizedMeasure,
    eps: f64,
    q: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(Error::domain(format!("q must be positive and != 1, got {q}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    if eps < 4.0 * dm.resolution() {
        return Err(Error::Precision(format!(
            "eps = {eps} below 4 x resolution = {}",
            4.0 * dm.resolution()
        )));
    }
    let lo = dm.min_position() - PAD_SIGMAS * eps;
    let hi = dm.max_position() + PAD_SIGMAS * eps;
    let mut intervals = (((hi - lo) / (eps / quad.initial_step_divisor)).ceil() as usize).max(2);
    if intervals % 2 == 1 {
        intervals += 1;
    }
    let f = |x: f64| filtered_density(dm, eps, x).powf(q);
    let mut prev = simpson(f, lo, hi, intervals);
    for _ in 0..quad.max_refinements {
        intervals *= 2;
        let cur = simpson(f, lo, hi, intervals);
        if (cur - prev).abs() <= quad.rel_tol * cur.abs().max(f64::MIN_POSITIVE) {
            if !(cur > 0.0) {
                return Err(Error::Quadrature(format!(
                    "integral collapsed to {cur} (mass {})",
                    dm.total_mass()
                )));
            }
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no convergence after {} refinements (last values {prev:e} at {intervals} intervals)",
        quad.max_refinements,
    )))
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let h = (hi - lo) / intervals as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// Per-cell envelopes of the Gaussian over the shifted open cells n + (-1, 1):
/// `gamma_n = inf g`, `Gamma_n = sup g`, and the ratio-bound constant C
/// assembled from their sequence norms per the q regime.
#[derive(Debug, Clone)]
pub struct EnvelopeConstants {
    pub q: f64,
    pub radius: usize,
    /// gamma_0, gamma_1, ..., gamma_radius (symmetric in the index).
    pub gamma: Vec<f64>,
    /// Gamma_0, Gamma_1, ..., Gamma_radius.
    pub big_gamma: Vec<f64>,
    /// Analytic bound on the truncated part of the Gamma norm, already
    /// folded into `c`.
    pub gamma_tail_bound: f64,
    /// The ratio-bound constant: for q > 1, `max(||Gamma||_1^q, ||gamma||_q^{-q})`;
    /// for q < 1, `max(||Gamma||_q^q, ||gamma||_1^{-q})`.
    pub c: f64,
}

/// Compute the envelope sequences truncated at |n| = radius and the
/// constant C. The inf over n + (-1, 1) sits at the endpoint nearer zero's
/// far side and the sup at the point nearest zero; truncating the gamma
/// norm only lowers it (which loosens C conservatively), while the Gamma
/// tail is covered by a geometric-ratio bound added to the norm.
pub fn envelope_constants(q: f64, radius: usize) -> Result<EnvelopeConstants> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(Error::domain(format!("q must be positive and != 1, got {q}")));
    }
    if radius < 8 {
        return Err(Error::domain("envelope radius must be >= 8"));
    }
    let r = radius;
    let mut gamma = Vec::with_capacity(r + 1);
    let mut big_gamma = Vec::with_capacity(r + 1);
    for n in 0..=r {
        let nf = n as f64;
        if n == 0 {
            gamma.push(density(1.0));
            big_gamma.push(density(0.0));
        } else {
            gamma.push(density(nf - 1.0).min(density(nf + 1.0)));
            big_gamma.push(density(nf - 1.0));
        }
    }
    // tail of sum_{|n| > r} Gamma_n^pow, pow = 1 (q > 1) or q (q < 1)
    let tail = |pow: f64| {
        let a = density(r as f64 - 1.0).powf(pow);
        let ratio = (density(r as f64) / density(r as f64 - 1.0)).powf(pow);
        2.0 * a / (1.0 - ratio)
    };
    let sym_sum = |v: &[f64], pow: f64| -> f64 {
        v[0].powf(pow) + 2.0 * v[1..].iter().map(|x| x.powf(pow)).sum::<f64>()
    };
    let (c, tail_bound) = if q > 1.0 {
        let t = tail(1.0);
        let gamma_norm_1 = sym_sum(&big_gamma, 1.0) + t;
        let small_norm_q_q = sym_sum(&gamma, q);
        (gamma_norm_1.powf(q).max(1.0 / small_norm_q_q), t)
    } else {
        let t = tail(q);
        let gamma_norm_q_q = sym_sum(&big_gamma, q) + t;
        let small_norm_1 = sym_sum(&gamma, 1.0);
        (gamma_norm_q_q.max(small_norm_1.powf(-q)), t)
    };
    Ok(EnvelopeConstants { q, radius, gamma, big_gamma, gamma_tail_bound: tail_bound, c })
}

/// One scale of the ratio check.
#[derive(Debug, Clone, Copy)]
pub struct RatioRow {
    pub ln_eps: f64,
    pub ln_ratio: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Result of [`check_ratio_bound`].
#[derive(Debug, Clone)]
pub struct RatioReport {
    pub c: f64,
    pub rows: Vec<RatioRow>,
}

/// Verify `1/C <= eps^{q-1} I^q(eps) / S^q(eps) <= C` across the given
/// scales, with C from [`envelope_constants`] (radius 12) and S from
/// bucketing the discretization (which matches the cascade's cell masses
/// exactly on dyadic scales). The standard Gaussian is bounded away from
/// zero on the unit cell, so no rescaling step is needed.
pub fn check_ratio_bound(
    m: &CascadeMeasure,
    q: f64,
    eps_list: &[f64],
    depth: usize,
) -> Result<RatioReport> {
    let dm = m.discretize(depth)?;
    check_ratio_bound_discretized(&dm, q, eps_list)
}

/// Same check starting from an already-discretized measure.
pub fn check_ratio_bound_discretized(
    dm: &DiscretizedMeasure,
    q: f64,
    eps_list: &[f64],
) -> Result<RatioReport> {
    let env = envelope_constants(q, 12)?;
    let bound = env.c.ln();
    let quad = QuadratureSpec::default();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if eps < 4.0 * dm.resolution() {
            return Err(Error::Precision(format!(
                "eps = {eps} below 4 x resolution = {}",
                4.0 * dm.resolution()
            )));
        }
        let ln_s = partition_bucket(dm, eps, q)?;
        let ln_i = lq_norm_q(dm, eps, q, &quad)?.ln();
        let ln_ratio = (q - 1.0) * eps.ln() + ln_i - ln_s;
        if ln_ratio.abs() > bound + CHECK_SLACK {
            return Err(Error::invariant(format!(
                "ratio bound violated at eps = {eps}: |ln ratio| = {} > ln C = {bound}",
                ln_ratio.abs()
            )));
        }
        rows.push(RatioRow { ln_eps: eps.ln(), ln_ratio, lower: -bound, upper: bound });
    }
    Ok(RatioReport { c: env.c, rows })
}

/// Result of [`check_monotonicity`].
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// (eps, ||g_eps * mu||_q) along the grid.
    pub norms: Vec<(f64, f64)>,
    /// True when the q regime demands a nonincreasing norm (q > 1).
    pub expect_nonincreasing: bool,
}

/// Verify that `||g_eps * mu||_q` is monotone across an increasing eps
/// grid: nonincreasing for q > 1, nondecreasing for 0 < q < 1 (relative
/// tolerance 1e-8).
pub fn check_monotonicity(
    dm: &DiscretizedMeasure,
    q: f64,
    eps_grid: &[f64],
) -> Result<MonotonicityReport> {
    if eps_grid.len() < 2 {
        return Err(Error::InsufficientData("monotonicity needs >= 2 scales".into()));
    }
    if eps_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("eps grid must be strictly increasing"));
    }
    let quad = QuadratureSpec::default();
    let mut norms = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let i = lq_norm_q(dm, eps, q, &quad)?;
        norms.push((eps, i.powf(1.0 / q)));
    }
    let expect_nonincreasing = q > 1.0;
    for w in norms.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        let ok = if expect_nonincreasing { b <= a * (1.0 + 1e-8) } else { b >= a * (1.0 - 1e-8) };
        if !ok {
            return Err(Error::invariant(format!(
                "norm not monotone (q = {q}): {a} -> {b} as eps {} -> {}",
                w[0].0, w[1].0
            )));
        }
    }
    Ok(MonotonicityReport { norms, expect_nonincreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_cascade, Atom, WeightProfile};

    const INT_G_SQUARED: f64 = 0.282_094_791_773_878_14; // 1 / (2 sqrt(pi))

    #[test]
    fn density_values() {
        assert!((density(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
        assert!((density(1.0) - 0.241_970_724_519_143_37).abs() < 1e-16);
        assert!((scaled_density(2.0, 0.0) - 0.5 * density(0.0)).abs() < 1e-16);
    }

    #[test]
    fn filtered_density_examples() {
        let d0 = DiscretizedMeasure::delta(0.0);
        assert!((filtered_density(&d0, 1.0, 0.0) - density(0.0)).abs() < 1e-15);
        assert!((filtered_density(&d0, 2.0, 0.0) - 0.5 * density(0.0)).abs() < 1e-15);

        let pair = DiscretizedMeasure::from_atoms(
            vec![
                Atom { position: -1.0, weight: 0.5 },
                Atom { position: 1.0, weight: 0.5 },
            ],
            0.0,
        )
        .unwrap();
        assert!((filtered_density(&pair, 1.0, 0.0) - density(1.0)).abs() < 1e-15);
    }

    #[test]
    fn kernel_integrates_to_one() {
        for &eps in &[0.25, 1.0, 3.0] {
            let n = 4000;
            let (lo, hi) = (-PAD_SIGMAS * eps, PAD_SIGMAS * eps);
            let i = simpson(|x| scaled_density(eps, x), lo, hi, n);
            assert!((i - 1.0).abs() < 1e-10, "eps={eps}: {i}");
        }
    }

    #[test]
    fn semigroup_identity_on_grid() {
        // numeric (g_eps * g_eta)(x) against g_sqrt(eps^2 + eta^2)(x)
        let (eps, eta) = (0.6, 0.8);
        let conv = |x: f64| {
            simpson(
                |y| scaled_density(eps, x - y) * scaled_density(eta, y),
                -PAD_SIGMAS,
                PAD_SIGMAS,
                4000,
            )
        };
        let s = (eps * eps + eta * eta).sqrt();
        for i in 0..=20 {
            let x = -2.0 + 0.2 * i as f64;
            assert!((conv(x) - scaled_density(s, x)).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn lq_norm_delta_closed_form() {
        let d0 = DiscretizedMeasure::delta(0.0);
        let quad = QuadratureSpec::default();
        let got = lq_norm_q(&d0, 1.0, 2.0, &quad).unwrap();
        assert!((got - INT_G_SQUARED).abs() < 1e-8 * INT_G_SQUARED, "{got}");
        // general closed form: int g^q = (2 pi)^{(1-q)/2} q^{-1/2}
        for &q in &[0.5, 3.0] {
            let expect = (2.0 * std::f64::consts::PI).powf((1.0 - q) / 2.0) / q.sqrt();
            let got = lq_norm_q(&d0, 1.0, q, &quad).unwrap();
            assert!((got - expect).abs() < 1e-7 * expect, "q={q}: {got} vs {expect}");
        }
    }

    #[test]
    fn lq_norm_delta_scaling_identity() {
        // eps^{q-1} I is eps-independent for a point mass
        let d0 = DiscretizedMeasure::delta(0.0);
        let quad = QuadratureSpec::default();
        let q = 2.0;
        for &eps in &[0.25, 0.5, 1.0, 2.0] {
            let i = lq_norm_q(&d0, eps, q, &quad).unwrap();
            let scaled = eps.powf(q - 1.0) * i;
            assert!(
                (scaled - INT_G_SQUARED).abs() < 1e-8,
                "eps={eps}: {scaled} vs {INT_G_SQUARED}"
            );
        }
    }

    #[test]
    fn quadrature_self_consistency() {
        let m = build_cascade(&WeightProfile::Constant { a: 0.5, len: 8 }, 2.0, 8).unwrap();
        let dm = m.discretize(8).unwrap();
        let coarse = lq_norm_q(&dm, 0.125, 2.0, &QuadratureSpec::default()).unwrap();
        let fine = lq_norm_q(
            &dm,
            0.125,
            2.0,
            &QuadratureSpec { rel_tol: 1e-9, ..QuadratureSpec::default() },
        )
        .unwrap();
        assert!((coarse - fine).abs() <= 1e-6 * fine.abs());
    }

    #[test]
    fn envelope_values_and_summation_oracle() {
        let env = envelope_constants(2.0, 12).unwrap();
        assert_eq!(env.big_gamma[0], density(0.0));
        assert_eq!(env.gamma[0], density(1.0));
        // independent summation oracle
        let mut l1 = env.big_gamma[0];
        for n in 1..=12usize {
            l1 += 2.0 * density(n as f64 - 1.0);
        }
        l1 += env.gamma_tail_bound;
        let mut gq = density(1.0).powi(2);
        for n in 1..=12usize {
            gq += 2.0 * density(n as f64 - 1.0).min(density(n as f64 + 1.0)).powi(2);
        }
        let expect = (l1 * l1).max(1.0 / gq);
        assert!((env.c - expect).abs() < 1e-12);
        // frozen value from the reference computation
        assert!((env.c - 15.523_322_518_729_682).abs() < 1e-9, "{}", env.c);
    }

    #[test]
    fn envelope_low_q_regime() {
        let env = envelope_constants(0.5, 12).unwrap();
        assert!((env.c - 3.502_267_825_332_715_7).abs() < 1e-9, "{}", env.c);
        assert!(envelope_constants(0.5, 4).is_err());
    }

    #[test]
    fn envelope_ordering_and_decay() {
        for &q in &[0.5, 2.0, 3.0] {
            let env = envelope_constants(q, 16).unwrap();
            for (g, big) in env.gamma.iter().zip(&env.big_gamma) {
                assert!(g <= big, "gamma must sit below Gamma");
            }
            for w in env.big_gamma.windows(2) {
                assert!(w[1] <= w[0], "Gamma must decay away from 0");
            }
            assert!(env.c > 1.0);
        }
    }

    #[test]
    fn ratio_bound_lebesgue() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 10 }, 2.0, 10).unwrap();
        let rep = check_ratio_bound(&m, 2.0, &[(2.0f64).powi(-4)], 10).unwrap();
        assert_eq!(rep.rows.len(), 1);
        // the uniform measure's ratio is ~1 (well inside the bounds)
        assert!(rep.rows[0].ln_ratio.abs() < 0.5, "{}", rep.rows[0].ln_ratio);
    }

    #[test]
    fn ratio_bound_atomic_cascade_constant() {
        // all mass at 0: S = 1 at every eps, eps^{q-1} I = int g^2 exactly
        let m = build_cascade(&WeightProfile::Constant { a: 0.0, len: 10 }, 2.0, 10).unwrap();
        let eps: Vec<f64> = (2..=6).map(|n| (2.0f64).powi(-n)).collect();
        let rep = check_ratio_bound(&m, 2.0, &eps, 10).unwrap();
        for row in &rep.rows {
            assert!(
                (row.ln_ratio - INT_G_SQUARED.ln()).abs() < 1e-6,
                "ratio {} vs {}",
                row.ln_ratio.exp(),
                INT_G_SQUARED
            );
        }
    }

    #[test]
    fn ratio_bound_midweight_cascade_q3() {
        let m = build_cascade(&WeightProfile::Constant { a: 0.5, len: 12 }, 3.0, 12).unwrap();
        let eps: Vec<f64> = (3..=8).map(|n| (2.0f64).powi(-n)).collect();
        let rep = check_ratio_bound(&m, 3.0, &eps, 12).unwrap();
        for row in &rep.rows {
            assert!(row.ln_ratio >= row.lower && row.ln_ratio <= row.upper);
        }
    }

    #[test]
    fn monotonicity_delta_and_cascades() {
        let d0 = DiscretizedMeasure::delta(0.0);
        let grid: Vec<f64> = (0..8).map(|i| 0.1 * (1.5f64).powi(i)).collect();
        let rep = check_monotonicity(&d0, 2.0, &grid).unwrap();
        assert!(rep.expect_nonincreasing);
        for w in rep.norms.windows(2) {
            assert!(w[1].1 < w[0].1); // strictly decreasing for the point mass
        }

        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 12 }, 2.0, 12).unwrap();
        let dm = m.discretize(12).unwrap();
        let grid: Vec<f64> = (1..=8).rev().map(|n| (2.0f64).powi(-n)).collect();
        check_monotonicity(&dm, 2.0, &grid).unwrap();
        let rep = check_monotonicity(&dm, 0.5, &grid).unwrap();
        assert!(!rep.expect_nonincreasing);
    }

    #[test]
    fn monotonicity_rejects_bad_grid() {
        let d0 = DiscretizedMeasure::delta(0.0);
        assert!(check_monotonicity(&d0, 2.0, &[0.5, 0.25]).is_err());
        assert!(check_monotonicity(&d0, 2.0, &[0.5]).is_err());
    }
}
