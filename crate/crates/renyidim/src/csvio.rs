//! CSV and key/value serialization. All floating-point output uses 17
//! significant digits so values round-trip bit-exactly and repeated runs
//! produce byte-identical files.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gaussfilter::{MonotonicityReport, RatioReport};
use crate::measure::DiscretizedMeasure;
use crate::partition::{PartitionTable, TableRow};
use crate::profiles::ProfileStats;
use crate::slopes::{DimensionReport, GapReport, MatuszewskaRow};

/// 17-significant-digit decimal form of an f64 (enough to reproduce the
/// exact bit pattern on parse).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn table_to_csv(t: &PartitionTable) -> String {
    let mut out = String::from("ln_eps,ln_S\n");
    for r in t.rows() {
        let _ = writeln!(out, "{},{}", fmt17(r.ln_eps), fmt17(r.ln_s));
    }
    out
}

pub fn table_from_csv(q: f64, text: &str) -> Result<PartitionTable> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "ln_eps,ln_S" => {}
        other => {
            return Err(Error::Config {
                line: 1,
                msg: format!("expected header 'ln_eps,ln_S', got '{}'", other.map(|o| o.1).unwrap_or("")),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or(Error::Config {
            line: i + 1,
            msg: "expected two comma-separated columns".into(),
        })?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config { line: i + 1, msg: format!("bad number '{s}'") })
        };
        rows.push(TableRow { ln_eps: parse(a)?, ln_s: parse(b)? });
    }
    PartitionTable::from_rows(q, rows, "csv-import")
}

pub fn atoms_to_csv(dm: &DiscretizedMeasure) -> String {
    let mut out = String::from("position,weight\n");
    for a in dm.atoms() {
        let _ = writeln!(out, "{},{}", fmt17(a.position), fmt17(a.weight));
    }
    out
}

pub fn profile_to_csv(values: &[f64]) -> String {
    let mut out = String::from("k,a_k\n");
    for (i, &v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, fmt17(v));
    }
    out
}

pub fn ratio_report_to_csv(rep: &RatioReport) -> String {
    let mut out = String::from("ln_eps,ln_ratio,lower_bound,upper_bound\n");
    for r in &rep.rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt17(r.ln_eps),
            fmt17(r.ln_ratio),
            fmt17(r.lower),
            fmt17(r.upper)
        );
    }
    out
}

pub fn monotonicity_to_csv(rep: &MonotonicityReport) -> String {
    let mut out = String::from("eps,lq_norm\n");
    for &(eps, norm) in &rep.norms {
        let _ = writeln!(out, "{},{}", fmt17(eps), fmt17(norm));
    }
    out
}

pub fn matuszewska_to_csv(rows: &[MatuszewskaRow]) -> String {
    let mut out = String::from("window,alpha_hat,beta_hat\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", fmt17(r.window), fmt17(r.alpha_hat), fmt17(r.beta_hat));
    }
    out
}

pub fn gap_report_to_csv(rep: &GapReport) -> String {
    let mut out = String::from("n,m_continuous,m_discrete,gap,gap_times_n\n");
    for e in &rep.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.n,
            fmt17(e.m_continuous),
            fmt17(e.m_discrete),
            fmt17(e.gap),
            fmt17(e.scaled)
        );
    }
    out
}

pub fn stats_to_csv(stats: &[ProfileStats]) -> String {
    let mut out = String::from("n,running_sum,running_average,weighted_sum,bestfit_normalized\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.n,
            fmt17(s.running_sum),
            fmt17(s.running_average()),
            fmt17(s.weighted_sum),
            fmt17(s.bestfit_normalized())
        );
    }
    out
}

/// Flat key/value block: the report plus the full config that produced it.
pub fn dimension_report_to_kv(rep: &DimensionReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("q", fmt17(rep.q));
    kv("depth", rep.depth.to_string());
    kv("d_minus", fmt17(rep.d_minus));
    kv("d_plus", fmt17(rep.d_plus));
    kv("d_lower_matuszewska", fmt17(rep.d_lower_mat));
    kv("d_upper_matuszewska", fmt17(rep.d_upper_mat));
    kv("bestfit_liminf", fmt17(rep.bestfit_liminf));
    kv("bestfit_limsup", fmt17(rep.bestfit_limsup));
    kv("lipschitz_a", fmt17(rep.diagnostics.lipschitz_a));
    kv("slope_bound_b", fmt17(rep.diagnostics.slope_bound_b));
    kv("single_step_e", fmt17(rep.diagnostics.single_step_e));
    kv("tail_start_row", rep.diagnostics.tail_start_row.to_string());
    kv("matuszewska_window", fmt17(rep.diagnostics.matuszewska_window));
    kv("config_tail_fraction", fmt17(rep.config.tail_fraction));
    kv("config_lsq_grid_base", fmt17(rep.config.lsq_grid_base));
    kv("config_lsq_sweep_points", rep.config.lsq_sweep_points.to_string());
    kv("config_matuszewska_window_fraction", fmt17(rep.config.matuszewska_window_fraction));
    kv("config_ordering_tol", fmt17(rep.config.ordering_tol));
    kv("source", rep.diagnostics.source.clone());
    out
}

pub fn dimension_report_to_csv(rep: &DimensionReport) -> String {
    let mut out = String::from(
        "q,depth,d_minus,d_plus,d_lower_matuszewska,d_upper_matuszewska,bestfit_liminf,bestfit_limsup\n",
    );
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        fmt17(rep.q),
        rep.depth,
        fmt17(rep.d_minus),
        fmt17(rep.d_plus),
        fmt17(rep.d_lower_mat),
        fmt17(rep.d_upper_mat),
        fmt17(rep.bestfit_liminf),
        fmt17(rep.bestfit_limsup)
    );
    out
}

/// A small gnuplot script for log-log views of a table CSV.
pub fn gnuplot_script(csv_name: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key off\n\
         set title '{title}'\n\
         set xlabel 'ln eps'\n\
         set ylabel 'ln S'\n\
         plot '{csv_name}' using 1:2 skip 1 with linespoints\n"
    )
}
