//! Quantization of real-valued estimates and residual-based verification.

use serde::{Deserialize, Serialize};

use crate::instances::{ErrorSpec, LweInstance, SecretSpec};

/// Default ratio between accepted residual spread and the error standard deviation.
pub const DEFAULT_TAU: f64 = 1.5;

fn nonzero_value(x: f64, lo: i64, hi: i64) -> i64 {
    let v = (x.round() as i64).clamp(lo, hi);
    if v != 0 {
        v
    } else if lo == 0 || x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Rounds to the family's support; fixed-weight families keep exactly the `h`
/// strongest coordinates (largest value for binary families, largest magnitude
/// otherwise; ties by lower index).
pub fn normalize_round_clip(estimate: &[f64], spec: &SecretSpec) -> Vec<i64> {
    let (lo, hi) = spec.family.support();
    let mut s: Vec<i64> = estimate
        .iter()
        .map(|&x| (x.round() as i64).clamp(lo, hi))
        .collect();
    if let Some(h) = spec.family.hamming_weight() {
        let strength = |x: f64| if spec.family.is_binary() { x } else { x.abs() };
        let mut order: Vec<usize> = (0..estimate.len()).collect();
        order.sort_by(|&a, &b| {
            strength(estimate[b])
                .total_cmp(&strength(estimate[a]))
                .then(a.cmp(&b))
        });
        for (rank, &i) in order.iter().enumerate() {
            s[i] = if rank < h { nonzero_value(estimate[i], lo, hi) } else { 0 };
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residuals: Vec<i64>,
    /// Root mean square of the centered residuals.
    pub sigma_r: f64,
    pub max_abs_residual: i64,
    pub threshold: f64,
    pub support_bound: Option<f64>,
    pub accept: bool,
}

/// Accepts `s` when the residuals `b - A s (mod q)` look like fresh errors: RMS at most
/// `tau * sigma_e`, and for bounded error families max |r| at most `bound + 3 sigma_e`.
pub fn verify_secret(inst: &LweInstance, s: &[i64], error: &ErrorSpec, tau: f64) -> VerificationReport {
    let threshold = tau * error.sigma();
    let support_bound = error.support_bound().map(|b| b as f64 + 3.0 * error.sigma());
    if s.len() != inst.n || inst.m == 0 {
        return VerificationReport {
            residuals: Vec::new(),
            sigma_r: f64::INFINITY,
            max_abs_residual: i64::MAX,
            threshold,
            support_bound,
            accept: false,
        };
    }
    let residuals = inst.residuals(s);
    let sigma_r =
        (residuals.iter().map(|&r| (r * r) as f64).sum::<f64>() / residuals.len() as f64).sqrt();
    let max_abs_residual = residuals.iter().map(|r| r.abs()).max().unwrap_or(0);
    let accept = sigma_r <= threshold
        && support_bound.is_none_or(|b| max_abs_residual as f64 <= b);
    VerificationReport { residuals, sigma_r, max_abs_residual, threshold, support_bound, accept }
}
