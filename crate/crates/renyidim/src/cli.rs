//! Command-line front end. The binary is a thin dispatcher over the
//! library; every verb reads a measure config/artifact, runs module
//! functions, and writes deterministic CSV (plus a summary on stdout).
//!
//! Exit codes: 0 success, 2 usage or missing input, 3 reproduction
//! criterion failure, 4 internal invariant failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_measure_spec, MeasureSpec};
use crate::csvio::{
    atoms_to_csv, dimension_report_to_csv, dimension_report_to_kv, fmt17, gap_report_to_csv,
    gnuplot_script, matuszewska_to_csv, monotonicity_to_csv, profile_to_csv, ratio_report_to_csv,
    stats_to_csv, table_to_csv,
};
use crate::error::{Error, Result};
use crate::gaussfilter::{check_monotonicity, check_ratio_bound};
use crate::measure::{CascadeMeasure, WeightProfile};
use crate::partition::{build_table, build_table_enumerated, PartitionTable};
use crate::profiles;
use crate::slopes::{
    dimension_report_from_table, lsq_continuous, lsq_discrete, lsq_gap_check,
    matuszewska_sweep, nearly_lipschitz_constants, secant_estimate, sequence_estimate,
    tail_secant_range, ReportConfig, DEFAULT_WINDOW_FRACTIONS,
};

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Parser)]
#[command(name = "renyidim", version, about = "Cascade measures, partition functions, and dimension estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a measure artifact from a flat key/value config
    Build {
        /// Config file (kind, q, depth, per-kind parameters)
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the config's q
        #[arg(long)]
        q: Option<f64>,
        /// Override the config's depth
        #[arg(long)]
        depth: Option<usize>,
        /// Also write the generated weight sequence as CSV (large at deep builds)
        #[arg(long)]
        dump_profile: bool,
    },
    /// Emit the log-log partition table as CSV
    Table {
        artifact: PathBuf,
        /// Deepest dyadic level (default: the artifact's depth)
        #[arg(long)]
        n_max: Option<usize>,
        /// Evaluate at an exponent other than the build q (enumeration; capped)
        #[arg(long)]
        q_eval: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write a gnuplot script for the log-log view
        #[arg(long)]
        plot_script: bool,
    },
    /// Gaussian-filter checks: ratio bound and norm monotonicity
    Filter {
        artifact: PathBuf,
        /// Discretization depth (default: min(artifact depth, 12))
        #[arg(long)]
        depth: Option<usize>,
        /// Comma-separated eps values (default 2^-3..2^-8)
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Slope-estimator suite: secants, best-fit variants, gap check, dimension report
    Fit {
        artifact: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
        /// Geometric grid base for discrete fits
        #[arg(long, default_value_t = 2.0)]
        base: f64,
        /// Comma-separated window sizes n for the fits and gap check
        #[arg(long)]
        n_list: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Matuszewska index window sweep
    Matuszewska {
        artifact: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
        /// Comma-separated window lengths on the ln scale (default: span-fraction sweep)
        #[arg(long)]
        windows: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Re-run a named reproduction recipe: thm5.2 | sec8 | lemma2.3 | sec9
    Reproduce {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Parse arguments from the process environment, run, and return the exit
/// code.
pub fn run() -> i32 {
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invariant(_) => 4,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Build { config, out, q, depth, dump_profile } => {
            cmd_build(&config, &out, q, depth, dump_profile)
        }
        Command::Table { artifact, n_max, q_eval, out, plot_script } => {
            cmd_table(&artifact, n_max, q_eval, &out, plot_script)
        }
        Command::Filter { artifact, depth, eps, out } => cmd_filter(&artifact, depth, eps, &out),
        Command::Fit { artifact, n_max, base, n_list, out } => {
            cmd_fit(&artifact, n_max, base, n_list, &out)
        }
        Command::Matuszewska { artifact, n_max, windows, out } => {
            cmd_matuszewska(&artifact, n_max, windows, &out)
        }
        Command::Reproduce { name, out } => cmd_reproduce(&name, &out),
    }
}

fn load_spec(path: &Path) -> Result<MeasureSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config { line: 0, msg: format!("cannot read {}: {e}", path.display()) })?;
    parse_measure_spec(&text)
}

fn write_out(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("{what}: '{}' is not a number", p.trim())))
        })
        .collect()
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::domain(format!("{what}: '{}' is not an integer", p.trim())))
        })
        .collect()
}

fn cmd_build(
    config: &Path,
    out: &Path,
    q: Option<f64>,
    depth: Option<usize>,
    dump_profile: bool,
) -> Result<i32> {
    let mut spec = load_spec(config)?;
    if let Some(q) = q {
        spec.q = q;
    }
    if let Some(d) = depth {
        spec.depth = d;
        spec.profile = match spec.profile {
            WeightProfile::Constant { a, .. } => WeightProfile::Constant { a, len: d },
            WeightProfile::Block48 { .. } => WeightProfile::Block48 { len: d },
            WeightProfile::GeometricBlocks { ratio, seed, .. } => {
                WeightProfile::GeometricBlocks { ratio, seed, len: d }
            }
            explicit => explicit,
        };
    }
    let m = spec.build()?;
    let mass_depth = spec.depth.min(12);
    let mass: f64 = m.level_masses(mass_depth)?.iter().sum();
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("measure");
    let path = write_out(out, &format!("{stem}.measure"), &spec.to_config_string())?;
    println!("artifact: {}", path.display());
    println!("depth = {}", spec.depth);
    println!("mass check (depth {mass_depth}) = {}", fmt17(mass));
    let shown = m.omegas().iter().take(8).map(|&w| fmt17(w)).collect::<Vec<_>>();
    println!("omega[1..={}] = {}", shown.len(), shown.join(", "));
    if dump_profile {
        let path = write_out(out, &format!("{stem}.profile.csv"), &profile_to_csv(m.weight_sequence()))?;
        println!("profile: {}", path.display());
    }
    Ok(0)
}

fn table_for(
    m: &CascadeMeasure,
    n_max: usize,
    q_eval: Option<f64>,
) -> Result<PartitionTable> {
    match q_eval {
        Some(q) if q != m.build_q() => build_table_enumerated(m, n_max, q),
        _ => build_table(m, n_max),
    }
}

fn cmd_table(
    artifact: &Path,
    n_max: Option<usize>,
    q_eval: Option<f64>,
    out: &Path,
    plot_script: bool,
) -> Result<i32> {
    let spec = load_spec(artifact)?;
    let m = spec.build()?;
    let n_max = n_max.unwrap_or(spec.depth);
    let t = table_for(&m, n_max, q_eval)?;
    let path = write_out(out, "table.csv", &table_to_csv(&t))?;
    println!("table: {} ({} rows, q = {})", path.display(), t.len(), fmt17(t.q()));
    println!("ln_S range: {} .. {}", fmt17(t.rows()[0].ln_s), fmt17(t.rows().last().unwrap().ln_s));
    if plot_script {
        let gp = write_out(out, "table.gp", &gnuplot_script("table.csv", "log-log partition table"))?;
        println!("plot script: {}", gp.display());
    }
    Ok(0)
}

fn cmd_filter(
    artifact: &Path,
    depth: Option<usize>,
    eps: Option<String>,
    out: &Path,
) -> Result<i32> {
    let spec = load_spec(artifact)?;
    let m = spec.build()?;
    let depth = depth.unwrap_or(spec.depth.min(12));
    let eps_list = match eps {
        Some(s) => parse_f64_list(&s, "--eps")?,
        None => (3..=8).map(|n| (2.0f64).powi(-n)).collect(),
    };
    let rep = check_ratio_bound(&m, spec.q, &eps_list, depth)?;
    let path = write_out(out, "ratio.csv", &ratio_report_to_csv(&rep))?;
    println!("ratio report: {} (C = {})", path.display(), fmt17(rep.c));
    println!("all {} ratios inside [1/C, C]", rep.rows.len());

    let mut grid = eps_list.clone();
    grid.sort_by(f64::total_cmp);
    let dm = m.discretize(depth)?;
    let path = write_out(out, "atoms.csv", &atoms_to_csv(&dm))?;
    println!("discretization: {} ({} atoms)", path.display(), dm.atoms().len());
    let mono = check_monotonicity(&dm, spec.q, &grid)?;
    let path = write_out(out, "monotonicity.csv", &monotonicity_to_csv(&mono))?;
    println!(
        "monotonicity: {} ({})",
        path.display(),
        if mono.expect_nonincreasing { "nonincreasing, as q > 1 demands" } else { "nondecreasing, as q < 1 demands" }
    );
    Ok(0)
}

fn cmd_fit(
    artifact: &Path,
    n_max: Option<usize>,
    base: f64,
    n_list: Option<String>,
    out: &Path,
) -> Result<i32> {
    let spec = load_spec(artifact)?;
    let m = spec.build()?;
    let n_max = n_max.unwrap_or(spec.depth);
    let t = build_table(&m, n_max)?;
    let ns = match n_list {
        Some(s) => parse_usize_list(&s, "--n-list")?,
        None => {
            // geometric sweep: powers of 4 up to n_max
            let mut ns = Vec::new();
            let mut n = 4usize;
            while n <= n_max {
                ns.push(n);
                n *= 4;
            }
            if ns.last() != Some(&n_max) && n_max >= 4 {
                ns.push(n_max);
            }
            ns
        }
    };
    let mut csv = String::from("n,secant,lsq_v1,lsq_v2,lsq_v3,lsq_v4,lsq_continuous\n");
    for &n in &ns {
        let sec = secant_estimate(&t, n)?;
        let fits: Vec<f64> = (1..=4u8)
            .map(|v| lsq_discrete(&t, n, base, v).map(|f| f.slope))
            .collect::<Result<_>>()?;
        let cont = lsq_continuous(&t, n as f64 * base.ln())?.slope;
        csv.push_str(&format!(
            "{n},{},{},{},{},{},{}\n",
            fmt17(sec),
            fmt17(fits[0]),
            fmt17(fits[1]),
            fmt17(fits[2]),
            fmt17(fits[3]),
            fmt17(cont)
        ));
    }
    let path = write_out(out, "bestfit.csv", &csv)?;
    println!("best-fit table: {}", path.display());

    if ns.len() >= 3 {
        let gap = lsq_gap_check(&t, base, &ns)?;
        let path = write_out(out, "gap.csv", &gap_report_to_csv(&gap))?;
        println!(
            "gap check: {} (max gap*n = {}, bounded = {})",
            path.display(),
            fmt17(gap.max_scaled),
            gap.bounded
        );
    }

    let (a_hat, b_hat) = nearly_lipschitz_constants(&t)?;
    println!("nearly-Lipschitz: A = {}, empirical slope bound = {}", fmt17(a_hat), fmt17(b_hat));

    let rep = dimension_report_from_table(&t, ReportConfig::default())?;
    let kv = write_out(out, "dimensions.kv", &dimension_report_to_kv(&rep))?;
    let csvp = write_out(out, "dimensions.csv", &dimension_report_to_csv(&rep))?;
    println!("dimension report: {} and {}", kv.display(), csvp.display());
    println!(
        "D- = {}, D+ = {}, D-- = {}, D++ = {}",
        fmt17(rep.d_minus),
        fmt17(rep.d_plus),
        fmt17(rep.d_lower_mat),
        fmt17(rep.d_upper_mat)
    );
    Ok(0)
}

fn cmd_matuszewska(
    artifact: &Path,
    n_max: Option<usize>,
    windows: Option<String>,
    out: &Path,
) -> Result<i32> {
    let spec = load_spec(artifact)?;
    let m = spec.build()?;
    let n_max = n_max.unwrap_or(spec.depth);
    let t = build_table(&m, n_max)?;
    let span = n_max as f64 * LN_2;
    let ws = match windows {
        Some(s) => parse_f64_list(&s, "--windows")?,
        None => DEFAULT_WINDOW_FRACTIONS.iter().map(|f| f * span).collect(),
    };
    let rows = matuszewska_sweep(&t, &ws)?;
    let path = write_out(out, "matuszewska.csv", &matuszewska_to_csv(&rows))?;
    println!("matuszewska sweep: {}", path.display());
    for r in &rows {
        println!(
            "window {} -> alpha_hat = {}, beta_hat = {}",
            fmt17(r.window),
            fmt17(r.alpha_hat),
            fmt17(r.beta_hat)
        );
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// reproduction recipes

struct Checker {
    failures: usize,
}

impl Checker {
    fn new() -> Self {
        Checker { failures: 0 }
    }

    fn check(&mut self, name: &str, pass: bool, measured: &str, target: &str) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict}  {name}: measured {measured} (target {target})");
        if !pass {
            self.failures += 1;
        }
    }

    fn exit_code(&self) -> i32 {
        if self.failures == 0 {
            0
        } else {
            3
        }
    }
}

fn cmd_reproduce(name: &str, out: &Path) -> Result<i32> {
    match name.to_ascii_lowercase().as_str() {
        "thm5.2" | "thm52" => reproduce_dichotomy(out),
        "sec8" => reproduce_bestfit_gap(out),
        "lemma2.3" | "lemma23" => reproduce_ratio_bound(out),
        "sec9" => reproduce_matuszewska(out),
        other => Err(Error::domain(format!(
            "unknown reproduction '{other}' (expected thm5.2, sec8, lemma2.3, sec9)"
        ))),
    }
}

/// Distinct accumulation points along eps_n = 4^{-k_n} versus the
/// interleaved scales eta_n = 2^{-(k_n + k_{n+1})} on the geometric-blocks
/// measure with ratio 2.
fn reproduce_dichotomy(out: &Path) -> Result<i32> {
    let depth = 1usize << 22;
    let gb = profiles::geometric_blocks(2.0, depth, 1)?;
    let m = crate::measure::build_cascade(
        &WeightProfile::GeometricBlocks { ratio: 2.0, seed: 1, len: depth },
        2.0,
        depth,
    )?;
    let t = build_table(&m, depth)?;
    let ks = &gb.boundaries;
    let eps_rows: Vec<f64> = ks
        .iter()
        .map(|&k| -((2 * k) as f64) * LN_2)
        .filter(|le| -le / LN_2 <= depth as f64)
        .collect();
    let est = sequence_estimate(&t, &eps_rows, 5)?;
    let mut ck = Checker::new();
    for (i, v) in est.values.iter().rev().take(5).enumerate() {
        ck.check(
            &format!("secant along eps_n, term -{i}"),
            (v - 0.5).abs() <= 0.01,
            &fmt17(*v),
            "1/2 within 0.01",
        );
    }
    let mut csv = String::from("ln_eps,secant\n");
    for (r, v) in est.rows.iter().zip(&est.values) {
        csv.push_str(&format!("{},{}\n", fmt17(t.rows()[*r].ln_eps), fmt17(*v)));
    }
    for w in ks.windows(2) {
        let (kl, kn) = (w[0] as usize, w[1] as usize);
        if kl + kn > depth {
            break;
        }
        let v = secant_estimate(&t, kl + kn)?;
        let target = 1.0 / (1.0 + kn as f64 / kl as f64);
        if kl >= 1 << 16 {
            ck.check(
                &format!("secant at eta (k = {kl})"),
                (v - target).abs() <= 0.01,
                &fmt17(v),
                &format!("{} within 0.01", fmt17(target)),
            );
        }
        csv.push_str(&format!("{},{}\n", fmt17(-((kl + kn) as f64) * LN_2), fmt17(v)));
    }
    let path = write_out(out, "dichotomy.csv", &csv)?;
    println!("wrote {}", path.display());
    Ok(ck.exit_code())
}

/// Exact checkpoint averages plus the strict gap between the secant
/// limsup and the best-fit limsup on the block-48 measure.
fn reproduce_bestfit_gap(out: &Path) -> Result<i32> {
    let n4 = 48usize.pow(4);
    let a = profiles::block48(n4);
    let mut ck = Checker::new();
    let mut cps = Vec::new();
    for m in 1..=3u32 {
        cps.push(48usize.pow(m));
        cps.push(12 * 48usize.pow(m));
        cps.push(36 * 48usize.pow(m));
    }
    cps.push(n4);
    let stats = profiles::running_stats(&a, &cps, true)?;
    for st in &stats[..stats.len() - 1] {
        let ex = st.exact.unwrap();
        // identify the target by the checkpoint form
        let mut pow = 1usize;
        while pow * 48 <= st.n {
            pow *= 48;
        }
        let (tp, tq, form) = if st.n == pow {
            (30, 47, "48^m")
        } else if st.n == 12 * pow {
            (5, 94, "12*48^m")
        } else {
            (193, 282, "36*48^m")
        };
        ck.check(
            &format!("running average at {} ({form})", st.n),
            ex.average_is(st.n, tp, tq),
            &fmt17(st.running_average()),
            &format!("{tp}/{tq} exactly"),
        );
    }
    let final_stat = stats.last().unwrap();
    let n = n4 as f64;
    let bestfit = 6.0 * final_stat.weighted_sum / (n * n * n);
    ck.check("best-fit weighted value at 48^4", bestfit > 0.70, &fmt17(bestfit), "> 0.70");

    let m = crate::measure::build_cascade(&WeightProfile::Block48 { len: n4 }, 2.0, n4)?;
    let t = build_table(&m, n4)?;
    let (_, sup) = tail_secant_range(&t, 0.5)?;
    let cap = 193.0 / 282.0 + 0.005;
    ck.check("secant tail-sup", sup <= cap, &fmt17(sup), &format!("<= {}", fmt17(cap)));
    ck.check(
        "best-fit minus secant-sup gap",
        bestfit - sup > 0.01,
        &fmt17(bestfit - sup),
        "> 0.01",
    );
    let path = write_out(out, "bestfit_gap.csv", &stats_to_csv(&stats))?;
    println!("wrote {}", path.display());
    Ok(ck.exit_code())
}

/// Two-sided envelope ratio bound across measures, exponents and scales.
fn reproduce_ratio_bound(out: &Path) -> Result<i32> {
    let depth = 16usize;
    let eps: Vec<f64> = (3..=10).map(|n| (2.0f64).powi(-n)).collect();
    let mut ck = Checker::new();
    let mut csv = String::from("measure,q,ln_eps,ln_ratio,lower_bound,upper_bound\n");
    for &q in &[0.5, 2.0] {
        for (name, profile) in [
            ("lebesgue", WeightProfile::Constant { a: 1.0, len: depth }),
            ("half", WeightProfile::Constant { a: 0.5, len: depth }),
            ("block48", WeightProfile::Block48 { len: depth }),
        ] {
            let m = crate::measure::build_cascade(&profile, q, depth)?;
            let rep = check_ratio_bound(&m, q, &eps, depth)?;
            let worst = rep
                .rows
                .iter()
                .map(|r| r.ln_ratio.abs())
                .fold(0.0f64, f64::max);
            ck.check(
                &format!("{name} q={q}: ratios within [1/C, C]"),
                worst <= rep.c.ln(),
                &format!("max |ln ratio| = {}", fmt17(worst)),
                &format!("ln C = {}", fmt17(rep.c.ln())),
            );
            for r in &rep.rows {
                csv.push_str(&format!(
                    "{name},{},{},{},{},{}\n",
                    fmt17(q),
                    fmt17(r.ln_eps),
                    fmt17(r.ln_ratio),
                    fmt17(r.lower),
                    fmt17(r.upper)
                ));
            }
        }
    }
    let path = write_out(out, "ratio_bound.csv", &csv)?;
    println!("wrote {}", path.display());
    Ok(ck.exit_code())
}

/// Matuszewska window estimates and the dimension ordering on block-48.
fn reproduce_matuszewska(out: &Path) -> Result<i32> {
    let n4 = 48usize.pow(4);
    let m = crate::measure::build_cascade(&WeightProfile::Block48 { len: n4 }, 2.0, n4)?;
    let t = build_table(&m, n4)?;
    let rep = dimension_report_from_table(&t, ReportConfig::default())?;
    let mut ck = Checker::new();
    ck.check("beta_hat (lower Matuszewska)", rep.d_lower_mat <= 0.06, &fmt17(rep.d_lower_mat), "<= 0.06");
    ck.check("alpha_hat (upper Matuszewska)", rep.d_upper_mat >= 0.94, &fmt17(rep.d_upper_mat), ">= 0.94");
    let ordered = rep.d_lower_mat <= rep.d_minus + 1e-9
        && rep.d_minus <= rep.d_plus + 1e-12
        && rep.d_plus <= rep.d_upper_mat + 1e-9;
    ck.check(
        "ordering D-- <= D- <= D+ <= D++",
        ordered,
        &format!(
            "{}, {}, {}, {}",
            fmt17(rep.d_lower_mat),
            fmt17(rep.d_minus),
            fmt17(rep.d_plus),
            fmt17(rep.d_upper_mat)
        ),
        "monotone",
    );
    let span = n4 as f64 * LN_2;
    let ws: Vec<f64> = DEFAULT_WINDOW_FRACTIONS.iter().map(|f| f * span).collect();
    let rows = matuszewska_sweep(&t, &ws)?;
    let kv = write_out(out, "dimensions.kv", &dimension_report_to_kv(&rep))?;
    let path = write_out(out, "matuszewska.csv", &matuszewska_to_csv(&rows))?;
    println!("wrote {} and {}", kv.display(), path.display());
    Ok(ck.exit_code())
}
