//! Measures on \[0,1\]: dyadic multiplicative cascades built from weight
//! profiles, their CDFs and interval masses, finite discretizations, and
//! convolutions of discretized measures.
//!
//! A cascade at level n splits every level-(n-1) cell's mass between its
//! halves: the left half receives the fraction `1 - omega_n`, the right
//! half `omega_n`, with `omega_n` in [0, 1/2] chosen so that
//! `ln(omega_n^q + (1 - omega_n)^q) = (1 - q) ln(2) a_n`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::profiles;

const LN_2: f64 = std::f64::consts::LN_2;

/// Width tolerance at which the omega bisection stops (the 200-iteration
/// cap drives the bracket to one ulp well before this, which the steep
/// q < 1 branch needs to keep the log-residual under 1e-12).
const OMEGA_BISECT_ITERS: usize = 200;

/// Absolute coordinate tolerance when merging convolution atoms.
const MERGE_TOL: f64 = 1e-12;

/// Default cap on convolution output atoms.
pub const CONVOLVE_ATOM_CAP: usize = 1 << 22;

/// Cap on pairwise products materialized during convolution.
const CONVOLVE_PAIR_CAP: usize = 1 << 24;

/// Rule generating the weight sequence a_n in \[0,1\] that drives the
/// cascade construction. Generation is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightProfile {
    /// a_n = a for all n.
    Constant { a: f64, len: usize },
    /// The 0/1/(1/2) blocks on the 48^n scale with a_1 = 30/47.
    Block48 { len: usize },
    /// 0/1 blocks between doubly-exponential boundaries k_{l+1} = ceil(ratio k_l),
    /// 1/2 elsewhere.
    GeometricBlocks { ratio: f64, seed: u64, len: usize },
    /// An explicit finite sequence.
    Explicit { values: Vec<f64> },
}

impl WeightProfile {
    pub fn len(&self) -> usize {
        match self {
            WeightProfile::Constant { len, .. } => *len,
            WeightProfile::Block48 { len } => *len,
            WeightProfile::GeometricBlocks { len, .. } => *len,
            WeightProfile::Explicit { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Generate the full weight sequence, validating every entry is in \[0,1\].
    pub fn values(&self) -> Result<Vec<f64>> {
        let vals = match self {
            WeightProfile::Constant { a, len } => vec![*a; *len],
            WeightProfile::Block48 { len } => profiles::block48(*len),
            WeightProfile::GeometricBlocks { ratio, seed, len } => {
                profiles::geometric_blocks(*ratio, *len, *seed)?.values
            }
            WeightProfile::Explicit { values } => values.clone(),
        };
        for (i, &a) in vals.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) || !a.is_finite() {
                return Err(Error::domain(format!(
                    "weight a_{} = {a} outside [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(vals)
    }

    pub fn describe(&self) -> String {
        match self {
            WeightProfile::Constant { a, len } => format!("constant a={a} len={len}"),
            WeightProfile::Block48 { len } => format!("block48 len={len}"),
            WeightProfile::GeometricBlocks { ratio, seed, len } => {
                format!("geometric-blocks ratio={ratio} seed={seed} len={len}")
            }
            WeightProfile::Explicit { values } => format!("explicit len={}", values.len()),
        }
    }
}

/// Solve `ln(w^q + (1-w)^q) = (1-q) ln(2) a` for `w` in [0, 1/2].
///
/// The left side is strictly monotone in `w` on [0, 1/2] for either q
/// regime (decreasing for q > 1, increasing for 0 < q < 1), running from 0
/// at w = 0 to (1-q) ln 2 at w = 1/2, so the solution exists and is unique
/// exactly when 0 <= a <= 1.
pub fn solve_omega(q: f64, a: f64) -> Result<f64> {
    check_q(q)?;
    if !(0.0..=1.0).contains(&a) || !a.is_finite() {
        return Err(Error::domain(format!(
            "weight a = {a} outside [0, 1]: target lies outside the range of ln(w^q + (1-w)^q)"
        )));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    if a == 1.0 {
        return Ok(0.5);
    }
    let target = (1.0 - q) * LN_2 * a;
    let h = |w: f64| (w.powf(q) + (1.0 - w).powf(q)).ln();
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..OMEGA_BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let above = h(mid) > target;
        // q > 1: h decreasing, solution right of mid when h(mid) > target
        if above == (q > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(Error::domain(format!("q must be positive and != 1, got {q}")));
    }
    Ok(())
}

/// Dyadic multiplicative cascade on \[0,1\] at finite depth.
///
/// Immutable after construction; all evaluation methods are pure.
#[derive(Debug, Clone)]
pub struct CascadeMeasure {
    q: f64,
    omegas: Vec<f64>,
    weights: Vec<f64>,
    profile: String,
}

/// Construct a cascade from a profile: `omega_n = solve_omega(q, a_n)`.
pub fn build_cascade(profile: &WeightProfile, q: f64, depth: usize) -> Result<CascadeMeasure> {
    check_q(q)?;
    if depth < 1 {
        return Err(Error::domain("cascade depth must be >= 1"));
    }
    if profile.len() < depth {
        return Err(Error::Depth { requested: depth, available: profile.len() });
    }
    let mut weights = profile.values()?;
    weights.truncate(depth);
    // profiles take few distinct values; memoize the solves
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut omegas = Vec::with_capacity(depth);
    for &a in &weights {
        let w = match cache.get(&a.to_bits()) {
            Some(&w) => w,
            None => {
                let w = solve_omega(q, a)?;
                cache.insert(a.to_bits(), w);
                w
            }
        };
        omegas.push(w);
    }
    Ok(CascadeMeasure { q, omegas, weights, profile: profile.describe() })
}

impl CascadeMeasure {
    pub fn build_q(&self) -> f64 {
        self.q
    }

    pub fn depth(&self) -> usize {
        self.omegas.len()
    }

    /// The per-level splitting weights omega_1..omega_N.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// The weight sequence a_1..a_N the cascade was built from.
    pub fn weight_sequence(&self) -> &[f64] {
        &self.weights
    }

    pub fn profile_description(&self) -> &str {
        &self.profile
    }

    pub fn describe(&self) -> String {
        format!("cascade q={} depth={} profile[{}]", self.q, self.depth(), self.profile)
    }

    /// Cumulative distribution function, within `tol` of the exact value.
    ///
    /// Descends the dyadic tree with exactly-computed node masses until the
    /// containing node's mass drops below `tol` or build depth is reached;
    /// the remaining node mass is spread linearly (the finite-depth
    /// convention), so dyadic points of level <= depth evaluate exactly.
    /// Saturates to 0 for x <= 0 and 1 for x >= 1.
    pub fn cdf(&self, x: f64, tol: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let mut acc = 0.0f64; // mass strictly left of the current node
        let mut mass = 1.0f64; // mass of the current node
        let mut lo = 0.0f64;
        let mut width = 1.0f64;
        for &omega in &self.omegas {
            if x <= lo {
                return acc.clamp(0.0, 1.0);
            }
            if mass < tol {
                break;
            }
            let mid = lo + 0.5 * width;
            if x >= mid {
                acc += (1.0 - omega) * mass;
                mass *= omega;
                lo = mid;
            } else {
                mass *= 1.0 - omega;
            }
            width *= 0.5;
        }
        if x <= lo {
            return acc.clamp(0.0, 1.0);
        }
        let frac = if width > 0.0 { (x - lo) / width } else { 0.5 };
        (acc + mass * frac.clamp(0.0, 1.0)).clamp(0.0, 1.0)
    }

    /// mu([a, b)) = F(b) - F(a), with combined error <= 2 tol. Dyadic
    /// endpoints of level <= depth are evaluated exactly (tolerance
    /// unused on that path).
    pub fn interval_mass(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        if a > b {
            return Err(Error::domain(format!("interval [{a}, {b}) has a > b")));
        }
        let t = if self.is_exact_dyadic(a) && self.is_exact_dyadic(b) { 0.0 } else { tol };
        Ok((self.cdf(b, t) - self.cdf(a, t)).max(0.0))
    }

    fn is_exact_dyadic(&self, x: f64) -> bool {
        if x <= 0.0 || x >= 1.0 {
            return true;
        }
        let depth = self.depth().min(1070) as i32;
        let scaled = x * (2.0f64).powi(depth);
        scaled == scaled.trunc()
    }

    /// All 2^depth level-`depth` cell masses, cell k covering
    /// [k 2^-depth, (k+1) 2^-depth).
    pub fn level_masses(&self, depth: usize) -> Result<Vec<f64>> {
        if depth > self.depth() {
            return Err(Error::Depth { requested: depth, available: self.depth() });
        }
        if depth > 26 {
            return Err(Error::Resource(format!(
                "2^{depth} cells exceed the enumeration cap; use the closed-form path"
            )));
        }
        let mut masses = vec![1.0f64];
        for &omega in &self.omegas[..depth] {
            let mut next = Vec::with_capacity(masses.len() * 2);
            for &m in &masses {
                next.push(m * (1.0 - omega));
                next.push(m * omega);
            }
            masses = next;
        }
        Ok(masses)
    }

    /// Atomize at the given depth: one atom per level-`depth` cell, placed
    /// at the cell's left endpoint.
    pub fn discretize(&self, depth: usize) -> Result<DiscretizedMeasure> {
        if depth < 1 {
            return Err(Error::domain("discretize depth must be >= 1"));
        }
        let masses = self.level_masses(depth)?;
        let res = (2.0f64).powi(-(depth as i32));
        let atoms = masses
            .into_iter()
            .enumerate()
            .map(|(k, w)| Atom { position: k as f64 * res, weight: w })
            .collect();
        DiscretizedMeasure::from_atoms(atoms, res)
    }
}

/// A weighted point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// Finite list of weighted point masses approximating a measure at a
/// stated resolution. Positions are strictly increasing and weights sum
/// to `total_mass`.
#[derive(Debug, Clone)]
pub struct DiscretizedMeasure {
    atoms: Vec<Atom>,
    resolution: f64,
    total_mass: f64,
}

impl DiscretizedMeasure {
    pub fn from_atoms(atoms: Vec<Atom>, resolution: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("discretized measure needs at least one atom"));
        }
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if !(a.weight >= 0.0) || !a.weight.is_finite() {
                return Err(Error::domain(format!("atom {i} has negative weight {}", a.weight)));
            }
            if i > 0 && !(a.position > atoms[i - 1].position) {
                return Err(Error::domain(format!(
                    "atom positions must be strictly increasing (index {i})"
                )));
            }
            total += a.weight;
        }
        Ok(DiscretizedMeasure { atoms, resolution, total_mass: total })
    }

    /// A unit point mass at the given position (resolution 0).
    pub fn delta(position: f64) -> Self {
        DiscretizedMeasure {
            atoms: vec![Atom { position, weight: 1.0 }],
            resolution: 0.0,
            total_mass: 1.0,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn min_position(&self) -> f64 {
        self.atoms.first().unwrap().position
    }

    pub fn max_position(&self) -> f64 {
        self.atoms.last().unwrap().position
    }

    /// Convolution: atoms at all pairwise position sums with product
    /// weights, merged when positions coincide within 1e-12. The effective
    /// resolution is the sum of the inputs' cell widths.
    pub fn convolve(&self, other: &DiscretizedMeasure) -> Result<DiscretizedMeasure> {
        let pairs = self.atoms.len().checked_mul(other.atoms.len());
        match pairs {
            Some(p) if p <= CONVOLVE_PAIR_CAP => {}
            _ => {
                return Err(Error::Resource(format!(
                    "convolution of {} x {} atoms exceeds the pair cap {}; discretize at a coarser depth",
                    self.atoms.len(),
                    other.atoms.len(),
                    CONVOLVE_PAIR_CAP
                )))
            }
        }
        let mut sums: Vec<Atom> = Vec::with_capacity(pairs.unwrap());
        for a in &self.atoms {
            for b in &other.atoms {
                sums.push(Atom { position: a.position + b.position, weight: a.weight * b.weight });
            }
        }
        sums.sort_by(|x, y| x.position.total_cmp(&y.position));
        let mut merged: Vec<Atom> = Vec::new();
        for atom in sums {
            match merged.last_mut() {
                Some(last) if atom.position - last.position <= MERGE_TOL => {
                    last.weight += atom.weight;
                }
                _ => merged.push(atom),
            }
        }
        if merged.len() > CONVOLVE_ATOM_CAP {
            return Err(Error::Resource(format!(
                "convolution produced {} atoms (cap {}); discretize at a coarser depth",
                merged.len(),
                CONVOLVE_ATOM_CAP
            )));
        }
        let total: f64 = merged.iter().map(|a| a.weight).sum();
        Ok(DiscretizedMeasure {
            atoms: merged,
            resolution: self.resolution + other.resolution,
            total_mass: total,
        })
    }
}
