//! The partition function `S^q(eps)`: sum over width-eps grid cells of the
//! q-th powers of their masses, evaluated exactly on dyadic grids for
//! cascade measures (closed form in the weight sequence), by direct leaf
//! enumeration, and by bucketing for discretized measures; log-log tables
//! and the dyadic-refinement jump bounds.
//!
//! Two independent evaluation paths are kept on purpose: the closed form
//! is O(n) and reaches multi-million-row tables, while enumeration and
//! bucketing serve as its oracle (and support evaluation exponents other
//! than the build exponent).

use crate::error::{Error, Result};
use crate::measure::{CascadeMeasure, DiscretizedMeasure};

const LN_2: f64 = std::f64::consts::LN_2;

/// Enumeration cap: at most 2^24 cells are walked directly.
const ENUMERATE_MAX_LEVEL: usize = 24;

/// Tolerance beyond which a jump-bound violation is treated as a bug.
const JUMP_VIOLATION_TOL: f64 = 1e-9;

/// One row of a log-log partition table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub ln_eps: f64,
    pub ln_s: f64,
}

/// Rows `(ln eps, ln S^q(eps))` with `ln_eps` strictly decreasing.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    q: f64,
    rows: Vec<TableRow>,
    source: String,
}

impl PartitionTable {
    /// Assemble a table from raw rows, checking ordering only. Used by the
    /// CSV importer and synthetic-table tests; the invariant-checked path
    /// is [`build_table`].
    pub fn from_rows(q: f64, rows: Vec<TableRow>, source: impl Into<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData("partition table needs rows".into()));
        }
        for w in rows.windows(2) {
            if !(w[1].ln_eps < w[0].ln_eps) {
                return Err(Error::domain("table rows must have strictly decreasing ln_eps"));
            }
        }
        Ok(PartitionTable { q, rows, source: source.into() })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rows(&self) -> &[TableRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when rows sit at consecutive dyadic scales eps = 2^-n starting
    /// from eps = 1.
    pub fn is_dyadic(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(n, r)| (r.ln_eps + n as f64 * LN_2).abs() <= 1e-9 * (1.0 + n as f64))
    }

    /// Index of the row whose ln_eps is nearest to the requested value.
    pub fn nearest_row(&self, ln_eps: f64) -> usize {
        // rows are sorted by decreasing ln_eps
        let pos = self
            .rows
            .partition_point(|r| r.ln_eps > ln_eps);
        let mut best = pos.min(self.rows.len() - 1);
        if pos > 0 {
            let before = pos - 1;
            if (self.rows[before].ln_eps - ln_eps).abs() < (self.rows[best].ln_eps - ln_eps).abs()
            {
                best = before;
            }
        }
        best
    }
}

/// Closed form on dyadic scales: `ln S^q(2^-n) = (1-q) ln(2) sum_{j<=n} a_j`
/// for the cascade's build exponent. `n = 0` gives 0 (S(1) = 1 for a
/// probability measure).
pub fn partition_exact_dyadic(m: &CascadeMeasure, n: usize) -> Result<f64> {
    if n > m.depth() {
        return Err(Error::Depth { requested: n, available: m.depth() });
    }
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for &a in &m.weight_sequence()[..n] {
        let y = a - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    Ok((1.0 - m.build_q()) * LN_2 * sum)
}

/// Direct enumeration of the 2^n level-n cells: `ln` of the sum over
/// nonzero cell masses raised to `q_eval` (zero-mass cells contribute 0
/// for every q). `q_eval` may differ from the build exponent.
pub fn partition_enumerate(m: &CascadeMeasure, n: usize, q_eval: f64) -> Result<f64> {
    if !(q_eval > 0.0) || q_eval == 1.0 || !q_eval.is_finite() {
        return Err(Error::domain(format!("q must be positive and != 1, got {q_eval}")));
    }
    if n > m.depth() {
        return Err(Error::Depth { requested: n, available: m.depth() });
    }
    if n > ENUMERATE_MAX_LEVEL {
        return Err(Error::Resource(format!(
            "enumeration of 2^{n} cells exceeds the 2^{ENUMERATE_MAX_LEVEL} cap; use the closed form"
        )));
    }
    let omegas = &m.omegas()[..n];
    // depth-first walk, pruning zero-mass subtrees
    fn walk(omegas: &[f64], mass: f64, q: f64) -> f64 {
        if mass == 0.0 {
            return 0.0;
        }
        match omegas.split_first() {
            None => mass.powf(q),
            Some((&w, rest)) => walk(rest, mass * (1.0 - w), q) + walk(rest, mass * w, q),
        }
    }
    let s = walk(omegas, 1.0, q_eval);
    Ok(s.ln())
}

/// Bucketed partition sum for a discretized measure: atom weights grouped
/// by `floor(position / eps)` (half-open cells; a position exactly on a
/// boundary belongs to the cell on its right), q-th powers summed.
///
/// Requires `eps >= 4 * resolution` so discretization error stays
/// subdominant.
pub fn partition_bucket(dm: &DiscretizedMeasure, eps: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(Error::domain(format!("q must be positive and != 1, got {q}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    if eps < 4.0 * dm.resolution() {
        return Err(Error::Precision(format!(
            "eps = {eps} is below 4 x resolution = {}; bucket masses would not be trustworthy",
            4.0 * dm.resolution()
        )));
    }
    let mut sum = 0.0f64;
    let mut current_cell = f64::NEG_INFINITY;
    let mut bucket = 0.0f64;
    for atom in dm.atoms() {
        if atom.weight == 0.0 {
            continue;
        }
        let cell = (atom.position / eps).floor();
        if cell != current_cell {
            if bucket > 0.0 {
                sum += bucket.powf(q);
            }
            bucket = 0.0;
            current_cell = cell;
        }
        bucket += atom.weight;
    }
    if bucket > 0.0 {
        sum += bucket.powf(q);
    }
    if sum <= 0.0 {
        return Err(Error::domain("measure has no mass; partition sum is empty"));
    }
    Ok(sum.ln())
}

/// Log-log table of the cascade's partition function at its build
/// exponent, rows at eps = 2^-n for n = 0..=n_max. Jump-bound invariants
/// are verified before the table is returned.
pub fn build_table(m: &CascadeMeasure, n_max: usize) -> Result<PartitionTable> {
    if n_max > m.depth() {
        return Err(Error::Depth { requested: n_max, available: m.depth() });
    }
    let q = m.build_q();
    let factor = (1.0 - q) * LN_2;
    let mut rows = Vec::with_capacity(n_max + 1);
    rows.push(TableRow { ln_eps: 0.0, ln_s: 0.0 });
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for (i, &a) in m.weight_sequence()[..n_max].iter().enumerate() {
        let y = a - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
        rows.push(TableRow { ln_eps: -((i + 1) as f64) * LN_2, ln_s: factor * sum });
    }
    let table = PartitionTable { q, rows, source: m.describe() };
    check_jump_bounds(&table, 1)?;
    Ok(table)
}

/// Table built by enumeration at an exponent that may differ from the
/// build exponent (2^n cells per row; n_max capped accordingly).
pub fn build_table_enumerated(
    m: &CascadeMeasure,
    n_max: usize,
    q_eval: f64,
) -> Result<PartitionTable> {
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        rows.push(TableRow {
            ln_eps: -(n as f64) * LN_2,
            ln_s: partition_enumerate(m, n, q_eval)?,
        });
    }
    let table = PartitionTable {
        q: q_eval,
        rows,
        source: format!("{} enumerated at q={q_eval}", m.describe()),
    };
    check_jump_bounds(&table, 1)?;
    Ok(table)
}

/// Table built by bucketing a discretized measure on dyadic scales
/// eps = 2^-n, n = 0..=n_max (n_max limited by the bucketing guard).
pub fn build_table_bucketed(
    dm: &DiscretizedMeasure,
    n_max: usize,
    q: f64,
    source: impl Into<String>,
) -> Result<PartitionTable> {
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let eps = (2.0f64).powi(-(n as i32));
        rows.push(TableRow { ln_eps: -(n as f64) * LN_2, ln_s: partition_bucket(dm, eps, q)? });
    }
    let table = PartitionTable { q, rows, source: source.into() };
    check_jump_bounds(&table, 1)?;
    Ok(table)
}

/// Diagnostics from the dyadic jump-bound check.
#[derive(Debug, Clone, Copy)]
pub struct JumpDiagnostics {
    /// Largest observed violation of either bound (0 when all jumps conform).
    pub max_violation: f64,
    /// Largest deviation from the monotone side (the empirical constant A).
    pub observed_a: f64,
    /// The slope bound B = d (q - 1) per unit of ln eps.
    pub bound_b: f64,
    /// Largest single-halving jump magnitude observed.
    pub max_step: f64,
    /// Number of consecutive-row jumps examined.
    pub steps: usize,
}

/// Verify the dyadic-refinement jump bounds on a table with rows at
/// consecutive dyadic scales. For q > 1 every halving step satisfies
/// `0 <= ln S(eps) - ln S(eps/2) <= d (q-1) ln 2` (bounds over wider
/// pairs follow by summing steps); mirrored for 0 < q < 1.
///
/// Violations beyond 1e-9 return an invariant-failure error (they signal
/// a bug upstream, not user error).
pub fn check_jump_bounds(t: &PartitionTable, d: usize) -> Result<JumpDiagnostics> {
    if t.rows().len() < 2 {
        return Err(Error::InsufficientData("jump check needs at least 2 rows".into()));
    }
    if !t.is_dyadic() {
        return Err(Error::domain("jump bounds require rows at consecutive dyadic scales"));
    }
    let q = t.q();
    let step_bound = d as f64 * (q - 1.0) * LN_2; // signed: negative for q < 1
    let mut max_violation = 0.0f64;
    let mut observed_a = 0.0f64;
    let mut max_step = 0.0f64;
    for w in t.rows().windows(2) {
        let jump = w[0].ln_s - w[1].ln_s; // ln S(eps) - ln S(eps/2)
        let (below, above) = if q > 1.0 {
            (-jump, jump - step_bound)
        } else {
            (jump, step_bound - jump)
        };
        max_violation = max_violation.max(below).max(above);
        observed_a = observed_a.max(below.max(0.0));
        max_step = max_step.max(jump.abs());
    }
    if max_violation > JUMP_VIOLATION_TOL {
        return Err(Error::invariant(format!(
            "dyadic jump bound violated by {max_violation:.3e} (bound {step_bound:.6} per step, q={q})"
        )));
    }
    Ok(JumpDiagnostics {
        // + 0.0 normalizes a negative zero from the signed-max chain
        max_violation: max_violation.max(0.0) + 0.0,
        observed_a: observed_a.max(0.0) + 0.0,
        bound_b: d as f64 * (q - 1.0),
        max_step,
        steps: t.rows().len() - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_cascade, WeightProfile};

    fn cascade(values: Vec<f64>, q: f64) -> CascadeMeasure {
        let depth = values.len();
        build_cascade(&WeightProfile::Explicit { values }, q, depth).unwrap()
    }

    #[test]
    fn exact_lebesgue_and_zero_level() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 10 }, 2.0, 10).unwrap();
        assert!((partition_exact_dyadic(&m, 10).unwrap() + 10.0 * LN_2).abs() < 1e-12);
        assert_eq!(partition_exact_dyadic(&m, 0).unwrap(), 0.0);
        assert!(partition_exact_dyadic(&m, 11).is_err());
    }

    #[test]
    fn exact_matches_hand_value_and_enumeration() {
        let m = cascade(vec![1.0, 0.0, 1.0], 3.0);
        let exact = partition_exact_dyadic(&m, 3).unwrap();
        assert!((exact + 4.0 * LN_2).abs() < 1e-12, "{exact}");
        let en = partition_enumerate(&m, 3, 3.0).unwrap();
        assert!((en - exact).abs() < 1e-12, "{en} vs {exact}");
    }

    #[test]
    fn enumerate_examples() {
        let leb = build_cascade(&WeightProfile::Constant { a: 1.0, len: 4 }, 2.0, 4).unwrap();
        assert!((partition_enumerate(&leb, 4, 2.0).unwrap() + 4.0 * LN_2).abs() < 1e-12);

        let atom = build_cascade(&WeightProfile::Constant { a: 0.0, len: 6 }, 2.0, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(partition_enumerate(&atom, n, 3.0).unwrap(), 0.0);
        }
        for n in 0..=6 {
            assert_eq!(partition_enumerate(&atom, n, 0.5).unwrap(), 0.0);
        }
    }

    #[test]
    fn enumerate_off_build_q_binomial_oracle() {
        // constant-omega cascade: sum over leaves of mass^qe collapses to
        // (w^qe + (1-w)^qe)^n by the binomial theorem
        let m = build_cascade(&WeightProfile::Constant { a: 0.5, len: 8 }, 2.0, 8).unwrap();
        let w = m.omegas()[0];
        let expect = 8.0 * (w.powf(3.0) + (1.0 - w).powf(3.0)).ln();
        let got = partition_enumerate(&m, 8, 3.0).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        // frozen from the bisection + closed-form oracle
        assert!((got - (-4.629_122_491_247_477)).abs() < 1e-12);
    }

    #[test]
    fn enumerate_caps() {
        let m = build_cascade(&WeightProfile::Constant { a: 0.5, len: 30 }, 2.0, 30).unwrap();
        assert!(partition_enumerate(&m, 25, 2.0).is_err());
        assert!(partition_enumerate(&m, 31, 2.0).is_err());
    }

    #[test]
    fn bucket_two_atoms() {
        use crate::measure::Atom;
        let dm = DiscretizedMeasure::from_atoms(
            vec![
                Atom { position: 0.25, weight: 0.5 },
                Atom { position: 0.75, weight: 0.5 },
            ],
            0.0,
        )
        .unwrap();
        let got = partition_bucket(&dm, 0.5, 2.0).unwrap();
        assert!((got - 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn bucket_boundary_atom_goes_right() {
        use crate::measure::Atom;
        // an atom exactly on a cell boundary belongs to the cell on its
        // right, so these two atoms land in distinct cells
        let dm = DiscretizedMeasure::from_atoms(
            vec![Atom { position: 0.0, weight: 0.5 }, Atom { position: 0.5, weight: 0.5 }],
            0.0,
        )
        .unwrap();
        let got = partition_bucket(&dm, 0.5, 2.0).unwrap();
        assert!((got - 0.5f64.ln()).abs() < 1e-14, "merged buckets would give 0, got {got}");
    }

    #[test]
    fn bucket_delta_is_zero() {
        let d = DiscretizedMeasure::delta(0.0);
        for &eps in &[0.1, 1.0, 3.0] {
            for &q in &[0.5, 2.0, 5.0] {
                assert_eq!(partition_bucket(&d, eps, q).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn bucket_uniform_nondyadic_eps() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 12 }, 2.0, 12).unwrap();
        let dm = m.discretize(12).unwrap();
        let eps = 0.01;
        let got = partition_bucket(&dm, eps, 2.0).unwrap();
        let slack = 2.0 * dm.resolution() / eps;
        assert!(
            (got - eps.ln()).abs() <= slack,
            "lnS = {got}, ln(eps) = {}, slack {slack}",
            eps.ln()
        );
    }

    #[test]
    fn bucket_resolution_guard() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 6 }, 2.0, 6).unwrap();
        let dm = m.discretize(6).unwrap();
        let err = partition_bucket(&dm, 2.0 * dm.resolution(), 2.0).unwrap_err();
        assert!(matches!(err, Error::Precision(_)));
    }

    #[test]
    fn bucket_matches_exact_on_dyadic_grid() {
        let vals = vec![0.3, 0.9, 0.1, 0.7, 0.5, 0.2, 0.8, 0.4, 0.6, 1.0];
        for &q in &[0.5, 2.0] {
            let m = cascade(vals.clone(), q);
            let dm = m.discretize(10).unwrap();
            for n in 0..=8usize {
                let eps = (2.0f64).powi(-(n as i32));
                let b = partition_bucket(&dm, eps, q).unwrap();
                let e = partition_exact_dyadic(&m, n).unwrap();
                assert!((b - e).abs() < 1e-10, "q={q} n={n}: {b} vs {e}");
            }
        }
    }

    #[test]
    fn table_lebesgue_rows() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 3 }, 2.0, 3).unwrap();
        let t = build_table(&m, 3).unwrap();
        let expect = [0.0, -LN_2, -2.0 * LN_2, -3.0 * LN_2];
        for (row, e) in t.rows().iter().zip(expect) {
            assert!((row.ln_s - e).abs() < 1e-14);
        }
        assert!(t.is_dyadic());
    }

    #[test]
    fn table_atomic_all_zero() {
        let m = build_cascade(&WeightProfile::Constant { a: 0.0, len: 5 }, 2.0, 5).unwrap();
        let t = build_table(&m, 5).unwrap();
        assert!(t.rows().iter().all(|r| r.ln_s == 0.0));
    }

    #[test]
    fn table_block48_row_at_generation() {
        let m = build_cascade(&WeightProfile::Block48 { len: 2304 }, 2.0, 2304).unwrap();
        let t = build_table(&m, 2304).unwrap();
        // ln S(2^-48) = -ln2 * 48 * (30/47) at q = 2
        let expect = -LN_2 * 48.0 * (30.0 / 47.0);
        assert!((t.rows()[48].ln_s - expect).abs() < 1e-10);
        let expect2 = -LN_2 * 2304.0 * (30.0 / 47.0);
        assert!((t.rows()[2304].ln_s - expect2).abs() < 1e-9);
    }

    #[test]
    fn jump_bounds_clean_on_cascades() {
        let vals = vec![0.2, 0.7, 1.0, 0.0, 0.5, 0.9, 0.3, 0.6];
        for &q in &[0.5, 2.0, 3.0] {
            let m = cascade(vals.clone(), q);
            let t = build_table(&m, 8).unwrap();
            let d = check_jump_bounds(&t, 1).unwrap();
            assert!(d.max_violation <= 1e-12, "q={q}: violation {}", d.max_violation);
            assert_eq!(d.observed_a, 0.0);
        }
    }

    #[test]
    fn jump_bounds_lebesgue_achieves_upper() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 6 }, 2.0, 6).unwrap();
        let t = build_table(&m, 6).unwrap();
        let d = check_jump_bounds(&t, 1).unwrap();
        assert!((d.max_step - LN_2).abs() < 1e-12); // (q-1) ln 2 with q = 2
    }

    #[test]
    fn jump_bounds_block48_alternation() {
        let m = build_cascade(&WeightProfile::Block48 { len: 48 }, 2.0, 48).unwrap();
        let t = build_table(&m, 48).unwrap();
        // jump at level j equals (q-1) ln2 * a_j
        for (j, w) in t.rows().windows(2).enumerate() {
            let jump = w[0].ln_s - w[1].ln_s;
            let expect = LN_2 * m.weight_sequence()[j];
            assert!((jump - expect).abs() < 1e-12, "level {}", j + 1);
        }
    }

    #[test]
    fn jump_bounds_detect_corruption() {
        let rows = vec![
            TableRow { ln_eps: 0.0, ln_s: 0.0 },
            TableRow { ln_eps: -LN_2, ln_s: 0.5 }, // rises for q > 1: violation
        ];
        let t = PartitionTable::from_rows(2.0, rows, "corrupt").unwrap();
        assert!(check_jump_bounds(&t, 1).is_err());
    }

    #[test]
    fn finite_upper_bound_for_q_above_one() {
        // S^q(eps) <= mu(R)^q = 1, so every ln_s <= 0
        let vals = vec![0.9, 0.2, 0.6, 0.1, 0.8];
        for &q in &[1.5, 2.0, 4.0] {
            let t = build_table(&cascade(vals.clone(), q), 5).unwrap();
            assert!(t.rows().iter().all(|r| r.ln_s <= 1e-12));
        }
    }

    #[test]
    fn nearest_row_lookup() {
        let m = build_cascade(&WeightProfile::Constant { a: 1.0, len: 8 }, 2.0, 8).unwrap();
        let t = build_table(&m, 8).unwrap();
        assert_eq!(t.nearest_row(0.0), 0);
        assert_eq!(t.nearest_row(-3.0 * LN_2), 3);
        assert_eq!(t.nearest_row(-3.4 * LN_2), 3);
        assert_eq!(t.nearest_row(-3.6 * LN_2), 4);
        assert_eq!(t.nearest_row(-100.0), 8);
    }
}
