//! Dimension estimators over partition tables: long-secant slopes,
//! subsequence estimates, continuous and discrete least-squares best-fit
//! slopes (four algebraically equivalent discrete formulas), nearly
//! Lipschitz gap diagnostics, Matuszewska-index window estimates, and the
//! aggregate dimension report.
//!
//! Conventions, fixed once to avoid sign bugs: internally t = -ln(eps) >= 0,
//! rho(t) = ln S(e^{-t}). Every `SlopeFit.slope` is the slope of ln S as a
//! function of ln(eps) (nonnegative for q > 1), and `SlopeFit.dimension`
//! is that slope divided by (q - 1).
//!
//! Finite-depth limit proxies use a *geometric* tail: a table over scales
//! eps = 2^-n, n <= n_max keeps rows with n >= n_max^(1 - fraction). The
//! constructions whose limsup/liminf structure matters here place their
//! features at indices growing geometrically (n = 48^m, k_{l+1} = ceil(R k_l)),
//! so halving the number of available *generations* — not the index range —
//! is what preserves the limit structure at desk scale.

use crate::error::{Error, Result};
use crate::measure::CascadeMeasure;
use crate::partition::{build_table, build_table_bucketed, build_table_enumerated, PartitionTable};

const LN_2: f64 = std::f64::consts::LN_2;

/// Which estimator produced a [`SlopeFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeMethod {
    Secant,
    LsqContinuous,
    /// Discrete least-squares, formula variant 1..=4.
    LsqDiscrete(u8),
}

/// A slope estimate with its window and normalization.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub method: SlopeMethod,
    /// Window length on the t = -ln(eps) axis.
    pub window: f64,
    /// Grid base for discrete fits.
    pub grid_base: Option<f64>,
    /// Slope of ln S against ln(eps).
    pub slope: f64,
    /// Fitted value at ln(eps) = 0 where the method defines a line.
    pub intercept: Option<f64>,
    /// slope / (q - 1).
    pub dimension: f64,
}

fn t_of(row: &crate::partition::TableRow) -> f64 {
    -row.ln_eps
}

/// Long secant from eps = 1 to row n: `(1/(q-1)) ln S(eps_n) / ln(eps_n)`.
/// For cascade tables at the build exponent this equals the running
/// average of the weight sequence.
pub fn secant_estimate(t: &PartitionTable, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("secant at row 0 divides by ln(1) = 0"));
    }
    let row = t
        .rows()
        .get(n)
        .ok_or_else(|| Error::MissingRows(format!("row {n} of {}", t.len())))?;
    Ok(row.ln_s / ((t.q() - 1.0) * row.ln_eps))
}

/// Tail inf/sup of secant values along a prescribed scale sequence.
#[derive(Debug, Clone)]
pub struct SequenceEstimate {
    /// Table row index each requested scale mapped to.
    pub rows: Vec<usize>,
    /// Secant value at each mapped row.
    pub values: Vec<f64>,
    pub tail_inf: f64,
    pub tail_sup: f64,
    /// Number of trailing terms the inf/sup ranged over.
    pub tail_len: usize,
    /// Whether consecutive ln-scale ratios stay near 1 (the validity
    /// condition for the subsequence to see every accumulation point).
    /// Checked and reported, never enforced: sequences violating it are
    /// exactly the interesting ones.
    pub spacing_ok: bool,
}

/// Secant values along the scales `eps_n = exp(ln_eps_seq[n])`, mapped to
/// nearest table rows. Scales are passed on the ln scale because the
/// interesting sequences (eps = 4^{-k_n} with doubly-exponential k_n)
/// underflow f64 as raw values.
pub fn sequence_estimate(
    t: &PartitionTable,
    ln_eps_seq: &[f64],
    tail_len: usize,
) -> Result<SequenceEstimate> {
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &le in ln_eps_seq {
        let idx = t.nearest_row(le);
        if t.rows()[idx].ln_eps == 0.0 {
            continue; // eps = 1 carries no slope information
        }
        rows.push(idx);
        values.push(t.rows()[idx].ln_s / ((t.q() - 1.0) * t.rows()[idx].ln_eps));
    }
    if values.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "sequence estimate needs >= 3 usable scales, got {}",
            values.len()
        )));
    }
    let k = tail_len.clamp(1, values.len());
    let tail = &values[values.len() - k..];
    let tail_inf = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_sup = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut spacing_ok = true;
    let checked = ln_eps_seq.len().min(6);
    for w in ln_eps_seq[ln_eps_seq.len() - checked..].windows(2) {
        if w[0] != 0.0 && (w[1] / w[0]) > 1.05 {
            spacing_ok = false;
        }
    }
    Ok(SequenceEstimate { rows, values, tail_inf, tail_sup, tail_len: k, spacing_ok })
}

/// Slope of the least-squares best-fit line to rho(t) = ln S(e^{-t}) over
/// the continuous window [0, x], with rho interpolated piecewise-linearly
/// between table rows (the closest-line slope is `(6/x^3) int_0^x (2t - x)
/// rho(t) dt`, reported against ln eps).
pub fn lsq_continuous(t: &PartitionTable, x: f64) -> Result<SlopeFit> {
    let rows = t.rows();
    if rows.len() < 2 {
        return Err(Error::InsufficientData("continuous fit needs >= 2 rows".into()));
    }
    let t1 = t_of(&rows[1]);
    let t_last = t_of(rows.last().unwrap());
    if !(x >= t1 - 1e-12) {
        return Err(Error::domain(format!("window x = {x} shorter than the first scale {t1}")));
    }
    if x > t_last + 1e-9 {
        return Err(Error::MissingRows(format!("window x = {x} beyond table range {t_last}")));
    }
    let x = x.min(t_last);
    let mut kernel_int = 0.0f64; // int (2t - x) rho dt
    let mut kc = 0.0f64;
    let mut mean_int = 0.0f64; // int rho dt
    for w in rows.windows(2) {
        let (a, b) = (t_of(&w[0]), t_of(&w[1]));
        if a >= x {
            break;
        }
        let b_clip = b.min(x);
        let (ra, rb) = (w[0].ln_s, w[1].ln_s);
        let s = (rb - ra) / (b - a);
        let rb_clip = ra + s * (b_clip - a);
        let seg = {
            let i1 = ra * ((b_clip * b_clip - a * a) - x * (b_clip - a));
            let i2 = s
                * ((2.0 / 3.0) * (b_clip * b_clip * b_clip - a * a * a)
                    - ((x + 2.0 * a) / 2.0) * (b_clip * b_clip - a * a)
                    + x * a * (b_clip - a));
            i1 + i2
        };
        let y = seg - kc;
        let tt = kernel_int + y;
        kc = (tt - kernel_int) - y;
        kernel_int = tt;
        mean_int += 0.5 * (ra + rb_clip) * (b_clip - a);
    }
    let slope_vs_t = 6.0 / (x * x * x) * kernel_int;
    let slope = -slope_vs_t;
    let intercept = mean_int / x - slope_vs_t * (x / 2.0);
    Ok(SlopeFit {
        method: SlopeMethod::LsqContinuous,
        window: x,
        grid_base: None,
        slope,
        intercept: Some(intercept),
        dimension: slope / (t.q() - 1.0),
    })
}

fn kahan_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in it {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Gather rho_k = ln S(v^{-k}) for k = 0..n-1 from the table.
fn grid_values(t: &PartitionTable, n: usize, v: f64) -> Result<Vec<f64>> {
    if !(v > 1.0) {
        return Err(Error::domain(format!("grid base must exceed 1, got {v}")));
    }
    let ln_v = v.ln();
    // fast path: dyadic table, v an exact power of 2
    let steps = ln_v / LN_2;
    let step = steps.round() as usize;
    if t.is_dyadic() && step >= 1 && (steps - step as f64).abs() < 1e-12 {
        if (n - 1) * step >= t.len() {
            return Err(Error::MissingRows(format!(
                "grid needs row at v^-{} = 2^-{}, table has {} rows",
                n - 1,
                (n - 1) * step,
                t.len()
            )));
        }
        return Ok((0..n).map(|k| t.rows()[k * step].ln_s).collect());
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let target = -(k as f64) * ln_v;
        let idx = t.nearest_row(target);
        let got = t.rows()[idx].ln_eps;
        if (got - target).abs() > 1e-9 * (1.0 + target.abs()) {
            return Err(Error::MissingRows(format!(
                "no row at ln eps = {target} (nearest {got})"
            )));
        }
        out.push(t.rows()[idx].ln_s);
    }
    Ok(out)
}

/// Discrete least-squares best-fit slope over the geometric grid
/// eps = v^{-k}, k = 0..n-1, by one of the four equivalent formulas:
///
/// 1. `-6/((n^3-n) ln v) sum (2k+1-n) rho_k`
/// 2. `sum (2k+1-n) rho_k / sum (2k+1-n) ln(v^{-k})`
/// 3. `6/((n^3-n) ln v) sum k(n-k) (rho_{k-1} - rho_k)`
/// 4. `sum k(n-k)(rho_k - rho_{k-1}) / (sum k(n-k) ln(v^{-1}))`
pub fn lsq_discrete(t: &PartitionTable, n: usize, v: f64, variant: u8) -> Result<SlopeFit> {
    if n < 2 {
        return Err(Error::domain("discrete fit needs n >= 2 grid points"));
    }
    let rho = grid_values(t, n, v)?;
    let ln_v = v.ln();
    let nf = n as f64;
    let cubic = nf * nf * nf - nf;
    let slope = match variant {
        1 => {
            let s = kahan_sum((0..n).map(|k| (2.0 * k as f64 + 1.0 - nf) * rho[k]));
            -6.0 / (cubic * ln_v) * s
        }
        2 => {
            let num = kahan_sum((0..n).map(|k| (2.0 * k as f64 + 1.0 - nf) * rho[k]));
            let den = kahan_sum((0..n).map(|k| (2.0 * k as f64 + 1.0 - nf) * (-(k as f64) * ln_v)));
            num / den
        }
        3 => {
            let s = kahan_sum(
                (1..n).map(|k| (k as f64) * (nf - k as f64) * (rho[k - 1] - rho[k])),
            );
            6.0 / (cubic * ln_v) * s
        }
        4 => {
            let num = kahan_sum(
                (1..n).map(|k| (k as f64) * (nf - k as f64) * (rho[k] - rho[k - 1])),
            );
            let den = kahan_sum((1..n).map(|k| (k as f64) * (nf - k as f64) * (-ln_v)));
            num / den
        }
        other => return Err(Error::domain(format!("lsq variant must be 1..=4, got {other}"))),
    };
    let mean_rho = kahan_sum(rho.iter().copied()) / nf;
    let mean_x = -ln_v * (nf - 1.0) / 2.0; // mean of ln(v^{-k})
    Ok(SlopeFit {
        method: SlopeMethod::LsqDiscrete(variant),
        window: (nf - 1.0) * ln_v,
        grid_base: Some(v),
        slope,
        intercept: Some(mean_rho - slope * mean_x),
        dimension: slope / (t.q() - 1.0),
    })
}

/// One row of the continuous-vs-discrete gap report.
#[derive(Debug, Clone, Copy)]
pub struct GapEntry {
    pub n: usize,
    pub m_continuous: f64,
    pub m_discrete: f64,
    pub gap: f64,
    /// gap * n; bounded when the gap decays like C/n.
    pub scaled: f64,
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub entries: Vec<GapEntry>,
    pub max_scaled: f64,
    pub median_scaled: f64,
    /// True when gap * n is flat: all entries negligible, or
    /// max/median < 10.
    pub bounded: bool,
}

/// Compare the continuous best-fit slope over [0, n ln v] with the
/// discrete n-point fit and check that their gap decays at rate O(1/n).
pub fn lsq_gap_check(t: &PartitionTable, v: f64, n_list: &[usize]) -> Result<GapReport> {
    if n_list.len() < 3 {
        return Err(Error::InsufficientData("gap check needs >= 3 window sizes".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("gap-check windows must be increasing"));
    }
    let ln_v = v.ln();
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mc = lsq_continuous(t, n as f64 * ln_v)?.slope;
        let md = lsq_discrete(t, n, v, 1)?.slope;
        let gap = (mc - md).abs();
        entries.push(GapEntry { n, m_continuous: mc, m_discrete: md, gap, scaled: gap * n as f64 });
    }
    let mut scaled: Vec<f64> = entries.iter().map(|e| e.scaled).collect();
    scaled.sort_by(f64::total_cmp);
    let max_scaled = *scaled.last().unwrap();
    let median_scaled = scaled[scaled.len() / 2];
    let bounded = max_scaled < 1e-6 || max_scaled / median_scaled.max(1e-300) < 10.0;
    Ok(GapReport { entries, max_scaled, median_scaled, bounded })
}

/// Smallest A such that `|rho(x) - rho(y)| <= A + B |x - y|` holds over
/// all row pairs with the theoretical B = d |q - 1| (per unit of ln eps),
/// plus the empirical per-step slope bound actually needed.
///
/// Returns `(a_hat, b_hat)`: `a_hat` certifies the table is nearly
/// Lipschitz at the theoretical B; `b_hat` is the largest consecutive-row
/// slope magnitude (0 for a flat table, (q-1) when the dyadic jump bound
/// is achieved).
pub fn nearly_lipschitz_constants(t: &PartitionTable) -> Result<(f64, f64)> {
    let rows = t.rows();
    if rows.len() < 2 {
        return Err(Error::InsufficientData("need >= 2 rows".into()));
    }
    let b = (t.q() - 1.0).abs();
    // max over i<j of (rho_i - rho_j) - B (t_j - t_i) = prefix-max(rho + B t) - (rho_j + B t_j);
    // the mirrored direction is (rho_j - B t_j) - prefix-min(rho - B t). Both one-pass.
    let mut a_hat = 0.0f64;
    let mut max_u = f64::NEG_INFINITY; // running max of rho_i + B t_i
    let mut min_v = f64::INFINITY; // running min of rho_i - B t_i
    for row in rows {
        let tt = t_of(row);
        let rho = row.ln_s;
        if max_u > f64::NEG_INFINITY {
            a_hat = a_hat.max(max_u - (rho + b * tt));
            a_hat = a_hat.max((rho - b * tt) - min_v);
        }
        max_u = max_u.max(rho + b * tt);
        min_v = min_v.min(rho - b * tt);
    }
    let mut b_hat = 0.0f64;
    for w in rows.windows(2) {
        let dt = t_of(&w[1]) - t_of(&w[0]);
        if dt > 0.0 {
            b_hat = b_hat.max((w[1].ln_s - w[0].ln_s).abs() / dt);
        }
    }
    Ok((a_hat.max(0.0), b_hat))
}

/// One window of a Matuszewska sweep.
#[derive(Debug, Clone, Copy)]
pub struct MatuszewskaRow {
    /// Minimum ln-scale separation of the secants.
    pub window: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
}

/// Long-secant estimates of the Matuszewska indices of
/// `f(x) = S(x^{-1})^{1/(1-q)}`: the sup (`alpha_hat`) and inf
/// (`beta_hat`) of secant slopes of ln f against ln x over row pairs
/// separated by at least `window` on the ln scale, with the right
/// endpoint in the geometric tail of the table.
///
/// The slopes are already dimension-normalized (the 1/(1-q) transform
/// cancels the (q-1) factor), so on cascade tables they are window
/// averages of the weight sequence.
pub fn matuszewska_estimate(t: &PartitionTable, window: f64) -> Result<(f64, f64)> {
    let rows = t.rows();
    if rows.len() < 3 {
        return Err(Error::InsufficientData("need >= 3 rows".into()));
    }
    if !(window > 0.0) {
        return Err(Error::domain("window must be positive"));
    }
    let span = t_of(rows.last().unwrap()) - t_of(&rows[0]);
    if span < 3.0 * window {
        return Err(Error::InsufficientData(format!(
            "table spans {span:.3} on the ln scale; need >= 3 x window = {:.3}",
            3.0 * window
        )));
    }
    let q = t.q();
    let xs: Vec<f64> = rows.iter().map(t_of).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ln_s / (1.0 - q)).collect();
    // right endpoints restricted to the geometric tail
    let x_last = *xs.last().unwrap();
    let x_unit = xs.iter().find(|&&x| x > 0.0).copied().unwrap_or(x_last);
    let threshold = (x_last * x_unit).sqrt();

    // bracket: every pair slope is a weighted average of consecutive slopes
    let mut lo_slope = f64::INFINITY;
    let mut hi_slope = f64::NEG_INFINITY;
    for i in 1..xs.len() {
        let s = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        lo_slope = lo_slope.min(s);
        hi_slope = hi_slope.max(s);
    }

    // feasibility: exists pair (i, j), x_j >= threshold, x_j - x_i >= window,
    // with slope >= g  (resp. <= g)
    let feasible = |g: f64, want_ge: bool| -> bool {
        let mut i = 0usize;
        let mut best = f64::NAN; // running min (for >=) or max (for <=) of y - g x over eligible i
        for j in 0..xs.len() {
            if xs[j] < threshold {
                continue;
            }
            while i < xs.len() && xs[i] <= xs[j] - window {
                let z = ys[i] - g * xs[i];
                best = if best.is_nan() {
                    z
                } else if want_ge {
                    best.min(z)
                } else {
                    best.max(z)
                };
                i += 1;
            }
            if !best.is_nan() {
                let zj = ys[j] - g * xs[j];
                if want_ge && zj >= best {
                    return true;
                }
                if !want_ge && zj <= best {
                    return true;
                }
            }
        }
        false
    };

    if !feasible(lo_slope - 1.0, true) {
        return Err(Error::InsufficientData(
            "no row pair satisfies the window and tail constraints".into(),
        ));
    }
    let bisect = |want_ge: bool| -> f64 {
        // sup of feasible g for want_ge; inf for !want_ge
        let (mut ok, mut bad) = if want_ge {
            (lo_slope - 1.0, hi_slope + 1.0)
        } else {
            (hi_slope + 1.0, lo_slope - 1.0)
        };
        for _ in 0..60 {
            let mid = 0.5 * (ok + bad);
            if mid == ok || mid == bad {
                break;
            }
            if feasible(mid, want_ge) {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        ok
    };
    let alpha_hat = bisect(true);
    let beta_hat = bisect(false);
    Ok((alpha_hat, beta_hat))
}

/// [`matuszewska_estimate`] across a list of windows.
pub fn matuszewska_sweep(t: &PartitionTable, windows: &[f64]) -> Result<Vec<MatuszewskaRow>> {
    windows
        .iter()
        .map(|&w| {
            matuszewska_estimate(t, w)
                .map(|(alpha_hat, beta_hat)| MatuszewskaRow { window: w, alpha_hat, beta_hat })
        })
        .collect()
}

/// Fractions of the table span used by the default window sweep.
pub const DEFAULT_WINDOW_FRACTIONS: [f64; 6] =
    [1.0 / 48.0, 1.0 / 24.0, 1.0 / 12.0, 1.0 / 6.0, 1.0 / 4.0, 1.0 / 3.0];

/// First row index of the geometric tail: rows n >= n_max^(1 - fraction).
pub fn geometric_tail_start(n_max: usize, fraction: f64) -> usize {
    let f = fraction.clamp(0.0, 1.0);
    ((n_max as f64).powf(1.0 - f).ceil() as usize).clamp(1, n_max)
}

/// Tail inf and sup of the secant values over the geometric tail.
pub fn tail_secant_range(t: &PartitionTable, fraction: f64) -> Result<(f64, f64)> {
    let n_max = t.len() - 1;
    if n_max < 1 {
        return Err(Error::InsufficientData("need >= 2 rows".into()));
    }
    let start = geometric_tail_start(n_max, fraction);
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    for n in start..=n_max {
        let v = secant_estimate(t, n)?;
        inf = inf.min(v);
        sup = sup.max(v);
    }
    Ok((inf, sup))
}

/// Controls for [`dimension_report`].
#[derive(Debug, Clone, Copy)]
pub struct ReportConfig {
    /// Geometric tail fraction for limit proxies.
    pub tail_fraction: f64,
    /// Grid base for the discrete best-fit sweep.
    pub lsq_grid_base: f64,
    /// Number of window sizes in the best-fit sweep.
    pub lsq_sweep_points: usize,
    /// Matuszewska window as a fraction of the table's ln-scale span
    /// (must be <= 1/3).
    pub matuszewska_window_fraction: f64,
    /// Slack allowed on the ordering invariant
    /// `0 <= D-- <= D- <= D+ <= D++ <= d` before the report is rejected.
    pub ordering_tol: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            tail_fraction: 0.5,
            lsq_grid_base: 2.0,
            lsq_sweep_points: 25,
            matuszewska_window_fraction: 1.0 / 6.0,
            ordering_tol: 0.05,
        }
    }
}

/// Constants observed while assembling a report.
#[derive(Debug, Clone)]
pub struct ReportDiagnostics {
    /// Nearly-Lipschitz constant at the theoretical slope bound.
    pub lipschitz_a: f64,
    /// The slope bound B = d |q - 1|.
    pub slope_bound_b: f64,
    /// Largest single-halving jump (the bounded-step constant E).
    pub single_step_e: f64,
    /// First row of the geometric tail used for limit proxies.
    pub tail_start_row: usize,
    /// Matuszewska window actually used (ln scale).
    pub matuszewska_window: f64,
    /// Description of the measure/table source.
    pub source: String,
}

/// Per-q dimension estimates.
#[derive(Debug, Clone)]
pub struct DimensionReport {
    pub q: f64,
    pub depth: usize,
    /// Tail-inf of secants (lower Rényi-dimension proxy).
    pub d_minus: f64,
    /// Tail-sup of secants (upper proxy).
    pub d_plus: f64,
    /// Lower Matuszewska-dimension proxy (beta_hat).
    pub d_lower_mat: f64,
    /// Upper Matuszewska-dimension proxy (alpha_hat).
    pub d_upper_mat: f64,
    pub bestfit_liminf: f64,
    pub bestfit_limsup: f64,
    pub diagnostics: ReportDiagnostics,
    pub config: ReportConfig,
}

/// Build the table for `m` at exponent `q` (closed form when q is the
/// build exponent, enumeration otherwise) and aggregate every estimator,
/// enforcing the ordering invariant before returning.
pub fn dimension_report(
    m: &CascadeMeasure,
    q: f64,
    depth: usize,
    config: ReportConfig,
) -> Result<DimensionReport> {
    let table = if q == m.build_q() {
        build_table(m, depth)?
    } else {
        build_table_enumerated(m, depth, q)?
    };
    dimension_report_from_table(&table, config)
}

/// Same aggregation over an existing table.
pub fn dimension_report_from_table(
    table: &PartitionTable,
    config: ReportConfig,
) -> Result<DimensionReport> {
    let n_max = table.len() - 1;
    let (d_minus, d_plus) = tail_secant_range(table, config.tail_fraction)?;
    let tail_start = geometric_tail_start(n_max, config.tail_fraction);

    // best-fit sweep over geometrically spaced window sizes in the tail
    let mut ns: Vec<usize> = Vec::new();
    let lo = (1.0 - config.tail_fraction) * (n_max as f64).ln();
    let hi = (n_max as f64).ln();
    let pts = config.lsq_sweep_points.max(2);
    for i in 0..pts {
        let ln_n = lo + (hi - lo) * i as f64 / (pts - 1) as f64;
        let n = ln_n.exp().round() as usize;
        if n >= 2 && n <= n_max {
            ns.push(n);
        }
    }
    ns.push(n_max.max(2));
    ns.sort_unstable();
    ns.dedup();
    let mut bf_inf = f64::INFINITY;
    let mut bf_sup = f64::NEG_INFINITY;
    for &n in &ns {
        let fit = lsq_discrete(table, n, config.lsq_grid_base, 1)?;
        bf_inf = bf_inf.min(fit.dimension);
        bf_sup = bf_sup.max(fit.dimension);
    }

    let span = -table.rows().last().unwrap().ln_eps;
    if !(config.matuszewska_window_fraction > 0.0 && config.matuszewska_window_fraction <= 1.0 / 3.0)
    {
        return Err(Error::domain("matuszewska window fraction must be in (0, 1/3]"));
    }
    let window = span * config.matuszewska_window_fraction;
    let (alpha_hat, beta_hat) = matuszewska_estimate(table, window)?;

    let (a_hat, _) = nearly_lipschitz_constants(table)?;
    let single_step_e = table
        .rows()
        .windows(2)
        .map(|w| (w[0].ln_s - w[1].ln_s).abs())
        .fold(0.0f64, f64::max);

    let report = DimensionReport {
        q: table.q(),
        depth: n_max,
        d_minus,
        d_plus,
        d_lower_mat: beta_hat,
        d_upper_mat: alpha_hat,
        bestfit_liminf: bf_inf,
        bestfit_limsup: bf_sup,
        diagnostics: ReportDiagnostics {
            lipschitz_a: a_hat,
            slope_bound_b: (table.q() - 1.0).abs(),
            single_step_e,
            tail_start_row: tail_start,
            matuszewska_window: window,
            source: table.source().to_string(),
        },
        config,
    };
    let tol = config.ordering_tol;
    let ordered = -tol <= report.d_lower_mat
        && report.d_lower_mat <= report.d_minus + tol
        && report.d_minus <= report.d_plus + 1e-12
        && report.d_plus <= report.d_upper_mat + tol
        && report.d_upper_mat <= 1.0 + tol;
    if !ordered {
        return Err(Error::invariant(format!(
            "dimension ordering violated beyond tol {tol}: D-- = {}, D- = {}, D+ = {}, D++ = {}",
            report.d_lower_mat, report.d_minus, report.d_plus, report.d_upper_mat
        )));
    }
    Ok(report)
}

/// Result of the convolution dimension-bound check.
#[derive(Debug, Clone)]
pub struct ConvolutionCheck {
    /// Dimension proxy of the convolution at exponent q (lower for q > 1,
    /// upper for q < 1).
    pub d_conv: f64,
    /// Dimension proxy of the first factor at exponent r.
    pub d_first: f64,
    /// Dimension proxy of the second factor at exponent s.
    pub d_second: f64,
    pub weight_r: f64,
    pub weight_s: f64,
    /// `weight_r * d_first + weight_s * d_second`.
    pub combined: f64,
    /// `d_conv - combined` for q > 1 (the inequality holds when this is
    /// not too negative); `combined - d_conv` for q < 1.
    pub margin: f64,
}

impl ConvolutionCheck {
    pub fn holds_within(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

/// Numeric check of the convolution dimension inequality at exponents
/// `1/q + 1 = 1/r + 1/s`: for q > 1 the (lower-)dimension of `mu * nu` at
/// q dominates the weighted combination of the factors' dimensions at r
/// and s, with weights `q(r-1)/(r(q-1))` and `q(s-1)/(s(q-1))` summing
/// to 1. Estimated from bucketed tables of the convolved discretizations;
/// indicative at finite depth, not proof-grade.
pub fn convolution_bound_check(
    m1: &CascadeMeasure,
    m2: &CascadeMeasure,
    q: f64,
    r: f64,
    s: f64,
    depth: usize,
) -> Result<ConvolutionCheck> {
    for &(name, e) in &[("q", q), ("r", r), ("s", s)] {
        if !(e > 0.0) || e == 1.0 || !e.is_finite() {
            return Err(Error::domain(format!("{name} must be positive and != 1, got {e}")));
        }
    }
    if ((1.0 / q + 1.0) - (1.0 / r + 1.0 / s)).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "exponents must satisfy 1/q + 1 = 1/r + 1/s (got {} vs {})",
            1.0 / q + 1.0,
            1.0 / r + 1.0 / s
        )));
    }
    if q > 1.0 && !(r > 1.0 && s > 1.0) {
        return Err(Error::domain("for q > 1 both r and s must exceed 1"));
    }
    if q < 1.0 && !(r < 1.0 && s < 1.0) {
        return Err(Error::domain("for q < 1 both r and s must lie in (0, 1)"));
    }
    if depth > 12 {
        return Err(Error::Resource("convolution check capped at depth 12".into()));
    }
    let tail = 0.5;
    let conv = m1.discretize(depth)?.convolve(&m2.discretize(depth)?)?;
    // the convolution's effective cell width is the sum of the inputs',
    // so the bucketing guard admits one level less than depth - 2
    let mut conv_levels = 1usize;
    while conv_levels < depth
        && (2.0f64).powi(-(conv_levels as i32 + 1)) >= 4.0 * conv.resolution()
    {
        conv_levels += 1;
    }
    let conv_table = build_table_bucketed(&conv, conv_levels, q, "convolution")?;
    let t1 = build_table_enumerated(m1, depth, r)?;
    let t2 = build_table_enumerated(m2, depth, s)?;
    let (conv_inf, conv_sup) = tail_secant_range(&conv_table, tail)?;
    let (f_inf, f_sup) = tail_secant_range(&t1, tail)?;
    let (s_inf, s_sup) = tail_secant_range(&t2, tail)?;
    let weight_r = q * (r - 1.0) / (r * (q - 1.0));
    let weight_s = q * (s - 1.0) / (s * (q - 1.0));
    let (d_conv, d_first, d_second) =
        if q > 1.0 { (conv_inf, f_inf, s_inf) } else { (conv_sup, f_sup, s_sup) };
    let combined = weight_r * d_first + weight_s * d_second;
    let margin = if q > 1.0 { d_conv - combined } else { combined - d_conv };
    Ok(ConvolutionCheck { d_conv, d_first, d_second, weight_r, weight_s, combined, margin })
}
