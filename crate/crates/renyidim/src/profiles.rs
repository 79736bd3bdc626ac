//! Generators for the named weight-profile constructions and their exact
//! combinatorial statistics (running averages, best-fit weighted sums) in
//! O(n) streaming form.
//!
//! Weight sequences here always satisfy `0 <= a_k <= 1`. The `block48`
//! profile takes values in `{0, 1/2, 1, 30/47}`, all representable as
//! integer numerators over the common denominator 94, which is what the
//! exact (rational) statistics mode uses.

use crate::error::{Error, Result};

/// Common denominator for exact rational statistics: covers 1/2, 1, 0 and
/// 30/47 (as 60/94).
pub const RATIONAL_DEN: i128 = 94;

/// First entry of the block-48 profile.
pub const BLOCK48_HEAD: f64 = 30.0 / 47.0;

/// Weight sequence with 0/1/(1/2) blocks laid out on the geometric scale
/// 48^n. Index k = 1 carries 30/47; for every n >= 0 the stretches
/// `(48^n, 12*48^n]`, `(12*48^n, 36*48^n]`, `(36*48^n, 48^{n+1}]` carry
/// 0, 1 and 1/2 respectively. With this layout the running average
/// returns to 30/47 exactly at every index 48^m.
///
/// Returned vector is 1-indexed in spirit: `out[i]` is `a_{i+1}`.
pub fn block48(n_max: usize) -> Vec<f64> {
    block48_num94(n_max)
        .into_iter()
        .map(|n| n as f64 / RATIONAL_DEN as f64)
        .collect()
}

/// Same sequence as [`block48`] but as integer numerators over 94
/// (0 -> 0, 1/2 -> 47, 1 -> 94, 30/47 -> 60).
pub fn block48_num94(n_max: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return out;
    }
    out.push(60); // a_1 = 30/47
    let mut pow = 1u64; // 48^n for the block generation currently covering (pow, 48*pow]
    let mut k = 2u64;
    while (k as usize) <= n_max {
        let hi = pow * 48;
        let b1 = 12 * pow;
        let b2 = 36 * pow;
        let stop = (n_max as u64).min(hi);
        while k <= stop {
            out.push(if k <= b1 {
                0
            } else if k <= b2 {
                94
            } else {
                47
            });
            k += 1;
        }
        pow = hi;
    }
    out
}

/// Weight sequence realizing distinct accumulation points along a
/// doubly-exponential subsequence: 1/2 by default, with 0 on
/// `(2 k_l, k_l + k_{l+1}]` and 1 on `(k_l + k_{l+1}, 2 k_{l+1}]` for the
/// boundary sequence `k_{l+1} = ceil(ratio * k_l)`.
#[derive(Debug, Clone)]
pub struct GeometricBlocks {
    /// `values[i]` is `a_{i+1}`.
    pub values: Vec<f64>,
    /// The boundary indices k_0 = seed, k_1, k_2, ... while 2*k_l fits
    /// inside the generated range (plus one extra for the final block).
    pub boundaries: Vec<u64>,
}

pub fn geometric_blocks(ratio: f64, n_max: usize, k_seed: u64) -> Result<GeometricBlocks> {
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(Error::domain(format!("geometric-blocks ratio must be > 1, got {ratio}")));
    }
    if k_seed < 1 {
        return Err(Error::domain("geometric-blocks seed index must be >= 1"));
    }
    let mut values = vec![0.5f64; n_max];
    let mut boundaries = vec![k_seed];
    let mut k = k_seed;
    while (2 * k as usize) <= n_max {
        // clamp so k + next and 2 * next stay inside u64 for any ratio
        let next = (ratio * k as f64).ceil().min((1u64 << 62) as f64) as u64;
        boundaries.push(next);
        // zeros on (2k, k+next], ones on (k+next, 2*next], clipped to n_max
        let zero_hi = (k + next).min(n_max as u64);
        for j in (2 * k + 1)..=zero_hi {
            values[(j - 1) as usize] = 0.0;
        }
        let one_hi = (2 * next).min(n_max as u64);
        for j in (k + next + 1).max(1)..=one_hi {
            values[(j - 1) as usize] = 1.0;
        }
        k = next;
    }
    Ok(GeometricBlocks { values, boundaries })
}

/// Running statistics of a weight sequence at one checkpoint index.
#[derive(Debug, Clone)]
pub struct ProfileStats {
    /// Checkpoint index n (1-based; statistics cover a_1..a_n).
    pub n: usize,
    /// Sum of a_j for j <= n.
    pub running_sum: f64,
    /// Sum of k (n-k) a_k for 1 <= k <= n-1 (the best-fit kernel sum).
    pub weighted_sum: f64,
    /// Exact integer payload when rational mode was requested.
    pub exact: Option<ExactStats>,
}

/// Exact counterparts over the common denominator 94.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactStats {
    /// 94 * sum of a_j, j <= n.
    pub running_sum_num: i128,
    /// 94 * sum of k (n-k) a_k, 1 <= k <= n-1.
    pub weighted_sum_num: i128,
}

impl ExactStats {
    /// Whether the running average at checkpoint n equals p/q exactly.
    pub fn average_is(&self, n: usize, p: i128, q: i128) -> bool {
        // running_sum_num / (94 n) == p / q
        self.running_sum_num * q == RATIONAL_DEN * (n as i128) * p
    }
}

impl ProfileStats {
    pub fn running_average(&self) -> f64 {
        self.running_sum / self.n as f64
    }

    /// `6/(n^3 - n) * weighted_sum`, the normalized discrete best-fit value.
    pub fn bestfit_normalized(&self) -> f64 {
        let n = self.n as f64;
        6.0 * self.weighted_sum / (n * n * n - n)
    }
}

fn to_num94(v: f64) -> Option<i128> {
    if v == 0.0 {
        Some(0)
    } else if v == 0.5 {
        Some(47)
    } else if v == 1.0 {
        Some(94)
    } else if v == BLOCK48_HEAD {
        Some(60)
    } else {
        None
    }
}

/// Streaming evaluation of running and kernel-weighted sums at the given
/// checkpoints. One pass over the sequence; O(n_max) time regardless of
/// the number of checkpoints.
///
/// In rational mode every value must be one of {0, 1/2, 1, 30/47}; other
/// values (or an i128 overflow, unreachable below ~1e12 terms) produce an
/// advisory error suggesting float mode.
pub fn running_stats(
    values: &[f64],
    checkpoints: &[usize],
    rational: bool,
) -> Result<Vec<ProfileStats>> {
    for &n in checkpoints {
        if n < 1 || n > values.len() {
            return Err(Error::domain(format!(
                "checkpoint {n} outside profile length {}",
                values.len()
            )));
        }
    }
    let mut sorted: Vec<usize> = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    // float accumulators (Kahan on the plain sum; the weighted sums are
    // reconstructed from first and second moments)
    let mut s0 = 0.0f64;
    let mut s0c = 0.0f64;
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    // exact accumulators
    let mut e0: i128 = 0;
    let mut e1: i128 = 0;
    let mut e2: i128 = 0;

    // snapshots: for checkpoint n we need (s1, s2) after k = n-1 and s0 after k = n
    use std::collections::HashMap;
    let mut want_moments: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut want_sum: HashMap<usize, Vec<usize>> = HashMap::new();
    for (ci, &n) in sorted.iter().enumerate() {
        want_moments.entry(n - 1).or_default().push(ci);
        want_sum.entry(n).or_default().push(ci);
    }
    let mut moments: Vec<(f64, f64, i128, i128)> = vec![(0.0, 0.0, 0, 0); sorted.len()];
    let mut sums: Vec<(f64, i128)> = vec![(0.0, 0); sorted.len()];
    if let Some(cis) = want_moments.get(&0) {
        for &ci in cis {
            moments[ci] = (0.0, 0.0, 0, 0);
        }
    }

    let n_used = *sorted.last().unwrap_or(&0);
    for (idx, &v) in values.iter().take(n_used).enumerate() {
        let k = idx + 1;
        // Kahan update of s0
        let y = v - s0c;
        let t = s0 + y;
        s0c = (t - s0) - y;
        s0 = t;
        let kf = k as f64;
        s1 += kf * v;
        s2 += kf * kf * v;
        if rational {
            let num = to_num94(v).ok_or_else(|| {
                Error::domain(format!(
                    "value {v} at index {k} has no exact form over denominator 94; use float mode"
                ))
            })?;
            let ki = k as i128;
            e0 = e0
                .checked_add(num)
                .ok_or_else(|| Error::Resource("rational sum overflow; use float mode".into()))?;
            e1 = e1
                .checked_add(ki.checked_mul(num).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            e2 = e2
                .checked_add(ki.checked_mul(ki).and_then(|x| x.checked_mul(num)).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        if let Some(cis) = want_moments.get(&k) {
            for &ci in cis {
                moments[ci] = (s1, s2, e1, e2);
            }
        }
        if let Some(cis) = want_sum.get(&k) {
            for &ci in cis {
                sums[ci] = (s0, e0);
            }
        }
    }

    let stats_by_n: HashMap<usize, ProfileStats> = sorted
        .iter()
        .enumerate()
        .map(|(ci, &n)| {
            let (m1, m2, x1, x2) = moments[ci];
            let (sum, esum) = sums[ci];
            let weighted = (n as f64) * m1 - m2;
            let exact = if rational {
                let nw = (n as i128) * x1 - x2;
                Some(ExactStats { running_sum_num: esum, weighted_sum_num: nw })
            } else {
                None
            };
            (n, ProfileStats { n, running_sum: sum, weighted_sum: weighted, exact })
        })
        .collect();

    Ok(checkpoints.iter().map(|n| stats_by_n[n].clone()).collect())
}

fn overflow() -> Error {
    Error::Resource("rational weighted sum overflow; use float mode".into())
}
