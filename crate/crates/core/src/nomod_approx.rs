//! Moments of the pre-modular value `b~ = A s + e`, candidate unwrapping and
//! inlier-rate prediction.

use log::warn;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use statrs::function::factorial::ln_binomial;

use crate::error::{param, Result};
use crate::instances::{ErrorSpec, SecretFamily, SecretSpec};

/// Default half-width of the candidate window, in standard deviations.
pub const DEFAULT_T_SIGMA: f64 = 4.0;

/// Exact row sums `S1 = sum a_j` and `S2 = sum a_j^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowStats {
    pub s1: i128,
    pub s2: i128,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub var: f64,
}

impl MomentEstimate {
    pub fn sigma(&self) -> f64 {
        self.var.max(0.0).sqrt()
    }
}

impl std::ops::Add for MomentEstimate {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self { mean: self.mean + o.mean, var: self.var + o.var }
    }
}

pub fn row_stats(row: &[i64]) -> RowStats {
    RowStats {
        s1: row.iter().map(|&x| x as i128).sum(),
        s2: row.iter().map(|&x| x as i128 * x as i128).sum(),
    }
}

/// Probability that a CBD(eta) draw is zero: `C(2 eta, eta) / 4^eta`.
pub fn cbd_zero_prob(eta: u32) -> f64 {
    (ln_binomial(2 * eta as u64, eta as u64) - 2.0 * eta as f64 * 2f64.ln()).exp()
}

/// Probability that a fixed nonzero coordinate survives truncation of a raw CBD vector
/// of length `n` to `h` nonzeros.
pub fn retention_alpha(n: usize, h: usize, eta: u32) -> Result<f64> {
    if h == 0 || h > n {
        return param(format!("retention needs 1 <= h <= n, got h={h}, n={n}"));
    }
    let qz = 1.0 - cbd_zero_prob(eta);
    if qz <= 0.0 {
        return Ok(1.0);
    }
    let others = (n - 1) as u64;
    let mut alpha = 0.0;
    for m in 0..=others {
        let ln_pmf = ln_binomial(others, m)
            + m as f64 * qz.ln()
            + if others > m { (others - m) as f64 * (1.0 - qz).ln() } else { 0.0 };
        let pmf = if qz >= 1.0 {
            (m == others) as u8 as f64
        } else {
            ln_pmf.exp()
        };
        let keep = if (m as usize) < h { 1.0 } else { h as f64 / (m as f64 + 1.0) };
        alpha += pmf * keep;
    }
    Ok(alpha.min(1.0))
}

/// Mean and variance of `<a, s>` for a secret drawn from `spec`.
pub fn as_moments(stats: RowStats, spec: &SecretSpec) -> MomentEstimate {
    let n = spec.dim as f64;
    let s1 = stats.s1 as f64;
    let s2 = stats.s2 as f64;
    let (mean, var) = match spec.family {
        SecretFamily::BinaryBernoulli { p } => (p * s1, p * (1.0 - p) * s2),
        SecretFamily::BinaryFixedHw { h } => {
            let h = h as f64;
            let var = if spec.dim <= 1 {
                0.0
            } else {
                h * (n - h) / (n * (n - 1.0)) * (s2 - s1 * s1 / n)
            };
            (h / n * s1, var)
        }
        SecretFamily::TernaryBalanced => (0.0, 2.0 / 3.0 * s2),
        SecretFamily::TernaryFixedHw { h } => (0.0, h as f64 / n * s2),
        SecretFamily::Cbd { eta } => (0.0, eta as f64 / 2.0 * s2),
        SecretFamily::CbdFixedHw { eta, h } => {
            let alpha = if h == 0 { 0.0 } else { retention_alpha(spec.dim, h, eta).unwrap_or(1.0) };
            (0.0, eta as f64 / 2.0 * alpha * s2)
        }
    };
    MomentEstimate { mean, var: var.max(0.0) }
}

pub fn error_moments(spec: &ErrorSpec) -> MomentEstimate {
    MomentEstimate { mean: 0.0, var: spec.variance() }
}

/// Moments of `b~_i = (A s)_i + e_i`.
pub fn btilde_moments(row: &[i64], secret: &SecretSpec, error: &ErrorSpec) -> MomentEstimate {
    as_moments(row_stats(row), secret) + error_moments(error)
}

/// Moments of `x . s + r . e` for a transformed sample with `|r|^2 = r_norm_sq`.
pub fn sample_moments(x: &[i64], r_norm_sq: f64, secret: &SecretSpec, error: &ErrorSpec) -> MomentEstimate {
    let e = error_moments(error);
    as_moments(row_stats(x), secret) + MomentEstimate { mean: 0.0, var: r_norm_sq * e.var }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub shift: i64,
    pub value: i64,
    pub log_likelihood: f64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub t_sigma: f64,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn most_likely(&self) -> &Candidate {
        self.candidates
            .iter()
            .max_by(|a, b| a.probability.total_cmp(&b.probability))
            .expect("candidate sets are never empty")
    }
}

/// Pre-images `b + k q` inside `[mu - t sigma, mu + t sigma]`, scored by a Gaussian.
pub fn candidates(b: i64, moments: MomentEstimate, q: i64, t_sigma: f64) -> Result<CandidateSet> {
    let sigma = moments.sigma();
    if !(sigma > 0.0) || !(t_sigma > 0.0) || q < 2 {
        return param("candidate window needs sigma > 0, t_sigma > 0 and q >= 2");
    }
    let (mu, qf, bf) = (moments.mean, q as f64, b as f64);
    let k_lo = ((mu - t_sigma * sigma - bf) / qf).ceil() as i64;
    let k_hi = ((mu + t_sigma * sigma - bf) / qf).floor() as i64;
    let shifts: Vec<i64> = if k_lo <= k_hi {
        (k_lo..=k_hi).collect()
    } else {
        warn!("no pre-image of {b} within {t_sigma} sigma; using the nearest one");
        vec![((mu - bf) / qf).round() as i64]
    };
    let ll: Vec<f64> = shifts
        .iter()
        .map(|&k| {
            let v = bf + k as f64 * qf - mu;
            -v * v / (2.0 * sigma * sigma)
        })
        .collect();
    let top = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = ll.iter().map(|l| (l - top).exp()).sum();
    let candidates = shifts
        .iter()
        .zip(&ll)
        .map(|(&k, &l)| Candidate {
            shift: k,
            value: b + k * q,
            log_likelihood: l,
            probability: (l - top).exp() / z,
        })
        .collect();
    Ok(CandidateSet { t_sigma, candidates })
}

/// Probability that `b~ ~ N(0, sigma^2)` needs no modular shift: `erf(q / (2 sqrt 2 sigma))`.
pub fn inlier_prob(q: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 1.0;
    }
    erf(q / (2.0 * std::f64::consts::SQRT_2 * sigma))
}

/// Expected number of inliers among samples with the given standard deviations.
pub fn expected_inliers(sigmas: &[f64], q: f64) -> f64 {
    sigmas.iter().map(|&s| inlier_prob(q, s)).sum()
}
