use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Path counts are kept as exact integers up to this `m`.
pub const EXACT_M_LIMIT: u64 = 32;
/// The floating-point recurrence is run up to this `m`; beyond it only the closed form is used.
pub const RECURRENCE_M_LIMIT: u64 = 50_000;

/// Statistics of the symmetric walk over `n = 2m - 1` steps.
#[derive(Clone, Debug)]
pub struct WalkStats {
    pub n: u64,
    pub m: u64,
    /// `N_x` for `x > 0`: walks ending at `x` that never went negative. Only for `m <= 32`.
    pub path_counts: Option<BTreeMap<u64, BigUint>>,
    /// `N_+`, the sum of the path counts.
    pub never_negative: Option<BigUint>,
    /// `2^n`.
    pub total_paths: Option<BigUint>,
    /// `(2m-1)!! / (2m)!!` from the log-gamma form.
    pub probability: f64,
    pub ln_probability: f64,
    /// The same probability from the path-count recurrence, when it was run.
    pub recurrence_probability: Option<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WalkJson {
    pub n: u64,
    pub m: u64,
    pub probability: f64,
    pub ln_probability: f64,
    pub recurrence_probability: Option<f64>,
    pub never_negative: Option<String>,
    pub total_paths: Option<String>,
    pub path_counts: Option<BTreeMap<String, String>>,
    pub asymptotic: f64,
}

impl WalkStats {
    /// Exact `N_+ / 2^n` as (numerator, denominator) in lowest terms.
    pub fn exact_fraction(&self) -> Option<(BigUint, BigUint)> {
        let (num, den) = (self.never_negative.clone()?, self.total_paths.clone()?);
        let g = gcd(num.clone(), den.clone());
        Some((num / &g, den / g))
    }

    /// `sqrt(2 / (pi n))`.
    pub fn asymptotic(&self) -> f64 {
        (2.0 / (std::f64::consts::PI * self.n as f64)).sqrt()
    }

    pub fn to_json(&self) -> WalkJson {
        WalkJson {
            n: self.n,
            m: self.m,
            probability: self.probability,
            ln_probability: self.ln_probability,
            recurrence_probability: self.recurrence_probability,
            never_negative: self.never_negative.as_ref().map(|x| x.to_string()),
            total_paths: self.total_paths.as_ref().map(|x| x.to_string()),
            path_counts: self
                .path_counts
                .as_ref()
                .map(|pc| pc.iter().map(|(x, c)| (x.to_string(), c.to_string())).collect()),
            asymptotic: self.asymptotic(),
        }
    }
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// `ln((2m-1)!! / (2m)!!) = ln Gamma(m + 1/2) - ln Gamma(m + 1) - ln(pi)/2`.
pub fn ln_never_negative(m: u64) -> f64 {
    let m = m as f64;
    ln_gamma(m + 0.5) - ln_gamma(m + 1.0) - 0.5 * std::f64::consts::PI.ln()
}

/// `n!! / (n + 1)!!` for odd `n`.
pub fn odd_double_factorial_ratio(n: u64) -> Result<f64> {
    check_odd(n)?;
    Ok(ln_never_negative(n.div_ceil(2)).exp())
}

fn check_odd(n: u64) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::Invalid(format!("walk length must be odd, got {n}")));
    }
    Ok(())
}

/// Exact path counts `N_x^{(m)}` for `x = 1, 3, ..., 2m - 1` (index `i` holds `x = 2i + 1`).
pub fn path_counts(m: u64) -> Vec<BigUint> {
    let mut counts = vec![BigUint::one()];
    for _ in 1..m {
        let len = counts.len() + 1;
        let next: Vec<BigUint> = (0..len)
            .map(|i| {
                let mut s = BigUint::zero();
                if i >= 1 {
                    s += &counts[i - 1];
                }
                if i < counts.len() {
                    s += &counts[i] * 2u32;
                }
                if i + 1 < counts.len() {
                    s += &counts[i + 1];
                }
                s
            })
            .collect();
        counts = next;
    }
    counts
}

/// Never-negative probability from the recurrence in floating point, with the
/// negligible far tail truncated.
fn recurrence_probability(m: u64) -> f64 {
    let width = ((80.0 * (m as f64).sqrt()) as usize + 64).min(m as usize + 1);
    let mut p = vec![0.0f64; width + 1];
    let mut q = p.clone();
    p[0] = 0.5;
    for _ in 1..m {
        for i in 0..width {
            let left = if i >= 1 { p[i - 1] } else { 0.0 };
            q[i] = (left + 2.0 * p[i] + p[i + 1]) * 0.25;
        }
        std::mem::swap(&mut p, &mut q);
    }
    p.iter().sum()
}

/// Probability that a symmetric +-1 walk from 0 never goes negative within `n` (odd) steps.
pub fn walk_exact(n: u64) -> Result<WalkStats> {
    check_odd(n)?;
    let m = n.div_ceil(2);
    let ln_p = ln_never_negative(m);
    let (path_counts_map, never_negative, total_paths) = if m <= EXACT_M_LIMIT {
        let counts = path_counts(m);
        let plus: BigUint = counts.iter().sum();
        let map = counts.into_iter().enumerate().map(|(i, c)| (2 * i as u64 + 1, c)).collect();
        (Some(map), Some(plus), Some(BigUint::one() << n as usize))
    } else {
        (None, None, None)
    };
    let recurrence = match (&never_negative, &total_paths) {
        (Some(num), Some(den)) => Some(big_ratio(num, den)),
        _ if m <= RECURRENCE_M_LIMIT => Some(recurrence_probability(m)),
        _ => None,
    };
    Ok(WalkStats {
        n,
        m,
        path_counts: path_counts_map,
        never_negative,
        total_paths,
        probability: ln_p.exp(),
        ln_probability: ln_p,
        recurrence_probability: recurrence,
    })
}

fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let shift = den.bits().saturating_sub(60);
    let n = (num >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Empirical never-positive frequency.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarlo {
    pub n: u64,
    pub trials: u64,
    pub never_positive: u64,
    pub fraction: f64,
    /// Binomial standard error at the exact probability.
    pub sigma: f64,
}

/// Trials per RNG stream. Stream `s` covers trials `s * CHUNK .. (s + 1) * CHUNK`.
pub const MC_CHUNK: u64 = 4096;

/// Simulates `trials` walks of `n` steps. Trial chunks use independent ChaCha
/// streams of `seed`, so the result does not depend on the thread count.
pub fn walk_monte_carlo(n: u64, trials: u64, seed: u64) -> Result<MonteCarlo> {
    if n == 0 {
        return Err(Error::Invalid("walk length must be positive".into()));
    }
    let chunks = trials.div_ceil(MC_CHUNK);
    let never_positive: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            (0..count).filter(|_| never_positive(n, &mut rng)).count() as u64
        })
        .sum();
    let p = if n % 2 == 1 { odd_double_factorial_ratio(n)? } else { odd_double_factorial_ratio(n - 1)? };
    Ok(MonteCarlo {
        n,
        trials,
        never_positive,
        fraction: never_positive as f64 / trials.max(1) as f64,
        sigma: (p * (1.0 - p) / trials.max(1) as f64).sqrt(),
    })
}

fn never_positive(n: u64, rng: &mut impl RngCore) -> bool {
    let mut x: i64 = 0;
    let mut bits = 0u64;
    for step in 0..n {
        if step % 64 == 0 {
            bits = rng.next_u64();
        }
        x += if bits & 1 == 1 { 1 } else { -1 };
        bits >>= 1;
        if x > 0 {
            return false;
        }
    }
    true
}

/// Largest odd integer not above `k^2`, the per-gate step budget for `k` K gates.
pub fn bqp_budget(k: u64) -> u64 {
    let n = k * k;
    if n % 2 == 0 {
        n.saturating_sub(1).max(1)
    } else {
        n
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BqpRow {
    pub k: u64,
    pub budget: u64,
    pub p_fail: f64,
    /// `(1 - p_fail)^k`.
    pub success: f64,
    /// `success / limit - 1`.
    pub relative_to_limit: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BqpReport {
    /// `e^{-sqrt(2/pi)}`.
    pub limit: f64,
    pub rows: Vec<BqpRow>,
}

pub fn bqp_limit_constant() -> f64 {
    (-(2.0 / std::f64::consts::PI).sqrt()).exp()
}

/// Success probability of `k` random-walk K gates, each cut off after `k^2` steps.
pub fn bqp_limit(ks: &[u64]) -> Result<BqpReport> {
    let limit = bqp_limit_constant();
    let rows = ks
        .iter()
        .map(|&k| {
            if k == 0 {
                return Err(Error::Invalid("k must be at least 1".into()));
            }
            let budget = bqp_budget(k);
            let p_fail = odd_double_factorial_ratio(budget)?;
            let success = (k as f64 * (-p_fail).ln_1p()).exp();
            Ok(BqpRow {
                k,
                budget,
                p_fail,
                success,
                relative_to_limit: success / limit - 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BqpReport { limit, rows })
}
