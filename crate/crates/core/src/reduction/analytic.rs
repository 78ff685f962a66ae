//! Closed-form reduction estimates: root-Hermite factor, Gaussian heuristic,
//! optimal sample count and the BKZ cost model.

use std::f64::consts::{E, PI};

use log::warn;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{param, Result};

/// Root-Hermite factor predicted for BKZ with block size `beta >= 2`.
pub fn root_hermite(beta: f64) -> Result<f64> {
    if !(beta >= 2.0) {
        return param(format!("block size must be >= 2, got {beta}"));
    }
    let base = beta / (2.0 * PI * E) * (PI * beta).powf(1.0 / beta);
    Ok(base.powf(1.0 / (2.0 * (beta - 1.0))))
}

/// Expected shortest-vector length `delta0^d * vol^(1/d)`.
pub fn gaussian_heuristic(d: usize, volume: f64, delta0: f64) -> f64 {
    delta0.powi(d as i32) * volume.powf(1.0 / d as f64)
}

/// Natural log of [`gaussian_heuristic`], taking `ln(volume)`.
pub fn log_gaussian_heuristic(d: usize, log_volume: f64, delta0: f64) -> f64 {
    d as f64 * delta0.ln() + log_volume / d as f64
}

/// Radius of the `d`-ball whose volume equals the lattice volume `exp(log_volume)`.
pub fn ball_gaussian_heuristic(d: usize, log_volume: f64) -> f64 {
    let d = d as f64;
    ((ln_gamma(d / 2.0 + 1.0) + log_volume) / d).exp() / PI.sqrt()
}

/// Log of the Gaussian-heuristic estimate for the dual embedding with `m` rows.
pub fn embedding_objective(n: usize, k: usize, q: f64, omega: f64, m: usize, delta0: f64) -> f64 {
    let nk = (n * k) as f64;
    let d = m + n * k;
    log_gaussian_heuristic(d, m as f64 * omega.ln() + nk * q.ln(), delta0)
}

/// Unclamped minimizer `sqrt(nk (ln q - ln omega) / ln delta0) - nk`.
pub fn optimal_sample_count_raw(n: usize, k: usize, q: f64, omega: f64, beta: f64) -> Result<f64> {
    if !(q > omega && omega >= 1.0) {
        return param(format!("need q > omega >= 1, got q={q}, omega={omega}"));
    }
    let g = root_hermite(beta)?;
    if g <= 1.0 {
        return param(format!("root-Hermite estimate {g:.5} at block size {beta} is not above 1"));
    }
    let nk = (n * k) as f64;
    Ok((nk * (q.ln() - omega.ln()) / g.ln()).sqrt() - nk)
}

/// Number of embedding rows minimizing the Gaussian-heuristic estimate, at least 1.
///
/// Degenerate inputs (`omega >= q`) are clamped to 1 with a warning.
pub fn optimal_sample_count(n: usize, k: usize, q: f64, omega: f64, beta: f64) -> Result<usize> {
    root_hermite(beta)?;
    if omega >= q {
        warn!("omega >= q leaves no room for reduction; using one sample");
        return Ok(1);
    }
    let raw = optimal_sample_count_raw(n, k, q, omega, beta)?;
    let m = raw.round();
    if m < 1.0 {
        warn!("optimal sample count {raw:.2} is not positive; clamped to 1");
        return Ok(1);
    }
    Ok(m as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub beta: f64,
    pub dim: usize,
    pub delta0: f64,
    /// Gaussian-heuristic length of the shortest vector when a volume was supplied.
    pub expected_shortest: Option<f64>,
    pub log2_t_beta_classical: f64,
    pub log2_t_beta_quantum: f64,
    pub log2_rop_classical: f64,
    pub log2_rop_quantum: f64,
}

/// BKZ cost model `T = 16 d t_beta` with the classical and quantum sieving exponents.
pub fn bkz_cost(beta: f64, dim: usize, log_volume: Option<f64>) -> Result<CostReport> {
    let delta0 = root_hermite(beta)?;
    if dim == 0 {
        return param("dimension must be >= 1");
    }
    let classical = 0.292 * beta + 16.4;
    let quantum = 0.265 * beta + 16.4;
    let overhead = (16.0 * dim as f64).log2();
    Ok(CostReport {
        beta,
        dim,
        delta0,
        expected_shortest: log_volume.map(|lv| log_gaussian_heuristic(dim, lv, delta0).exp()),
        log2_t_beta_classical: classical,
        log2_t_beta_quantum: quantum,
        log2_rop_classical: overhead + classical,
        log2_rop_quantum: overhead + quantum,
    })
}
