use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::{streams, EstimatorConfig, EstimatorKind, PipelineConfig};
use super::samples::Sample;
use crate::error::{param, Result};
use crate::estimators::{
    fit_huber, fit_ols, fit_ransac, fit_tukey, normalize_round_clip, verify_secret, FitResult,
    RegressionProblem, VerificationReport,
};
use crate::instances::{derive_seed, ErrorSpec, LweInstance, SecretSpec};
use crate::nomod_approx::{candidates, sample_moments};

/// Nested training-set sizes over `total` samples ordered by increasing `sigma`.
///
/// The first rung is at least `2n`, the last is `train_fraction * total`. With fewer than
/// `2n` usable samples a single subset of everything is returned.
pub fn ladder_sizes(total: usize, n: usize, fractions: &[f64], train_fraction: f64) -> Vec<usize> {
    let cap = (train_fraction * total as f64).floor() as usize;
    if cap < 2 * n {
        warn!("only {total} samples for {n} unknowns; training on all of them");
        return if total == 0 { Vec::new() } else { vec![total] };
    }
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|&f| ((f * total as f64).ceil() as usize).clamp(2 * n, cap))
        .collect();
    sizes.push(cap);
    sizes.sort_unstable();
    sizes.dedup();
    sizes
}

/// Regression targets: the centered sample targets, or for binary secrets the most
/// likely pre-image under the non-modular moment model.
pub fn regression_targets(
    samples: &[Sample],
    q: i64,
    secret: &SecretSpec,
    error: &ErrorSpec,
    window: f64,
) -> Result<Vec<i64>> {
    if !secret.family.is_binary() {
        return Ok(samples.iter().map(|s| s.target).collect());
    }
    samples
        .iter()
        .map(|s| {
            let mom = sample_moments(&s.x, s.r_norm_sq as f64, secret, error);
            Ok(candidates(s.target, mom, q, window)?.most_likely().value)
        })
        .collect()
}

pub fn fit_estimator(p: &RegressionProblem, cfg: &EstimatorConfig, seed: u64) -> Result<FitResult> {
    match cfg.kind {
        EstimatorKind::Ols => fit_ols(p),
        EstimatorKind::Huber => fit_huber(p, &cfg.huber),
        EstimatorKind::Tukey => fit_tukey(p, &cfg.tukey, &cfg.huber),
        EstimatorKind::Ransac => {
            let mut params = cfg.ransac.clone();
            params.seed = seed;
            fit_ransac(p, &params)
        }
    }
}

/// Fits the secret on `samples` and rounds it to the secret family.
pub fn fit_secret(
    samples: &[Sample],
    q: i64,
    secret: &SecretSpec,
    error: &ErrorSpec,
    estimator: &EstimatorConfig,
    window: f64,
    seed: u64,
) -> Result<(Vec<i64>, FitResult)> {
    if samples.is_empty() {
        return param("no samples to fit");
    }
    let y = regression_targets(samples, q, secret, error, window)?;
    let x: Vec<Vec<i64>> = samples.iter().map(|s| s.x.clone()).collect();
    let p = RegressionProblem::from_integers(&x, &y)?;
    let fit = fit_estimator(&p, estimator, seed)?;
    let s = normalize_round_clip(&fit.coefficients_f64(), secret);
    Ok((s, fit))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub sigma_r: f64,
    pub max_abs_residual: i64,
    pub threshold: f64,
    pub support_bound: Option<f64>,
    pub accept: bool,
}

impl From<&VerificationReport> for VerificationSummary {
    fn from(v: &VerificationReport) -> Self {
        Self {
            sigma_r: v.sigma_r,
            max_abs_residual: v.max_abs_residual,
            threshold: v.threshold,
            support_bound: v.support_bound,
            accept: v.accept,
        }
    }
}

/// Serialized output of a standalone fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecretCandidate {
    pub secret: Vec<i64>,
    pub estimator: EstimatorKind,
    pub subset_size: usize,
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub fallback: bool,
    pub verification: Option<VerificationSummary>,
}

/// One fit on one rung of the ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    /// Matrices whose samples were available.
    pub matrices: usize,
    pub available: usize,
    pub subset_size: usize,
    pub estimator: EstimatorKind,
    pub iterations: usize,
    pub converged: bool,
    pub ridge: bool,
    pub fallback: bool,
    pub verification: VerificationSummary,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    /// First secret accepted by verification.
    pub secret: Option<Vec<i64>>,
    /// Candidate with the smallest residual spread, accepted or not.
    pub best: Option<Vec<i64>>,
    pub best_verification: Option<VerificationSummary>,
    pub attempts: Vec<Attempt>,
}

impl TrainOutcome {
    fn record(&mut self, s: Vec<i64>, attempt: Attempt) {
        let better = self
            .best_verification
            .as_ref()
            .is_none_or(|b| attempt.verification.sigma_r < b.sigma_r);
        if attempt.verification.accept && self.secret.is_none() {
            self.secret = Some(s.clone());
        }
        if better {
            self.best = Some(s);
            self.best_verification = Some(attempt.verification.clone());
        }
        self.attempts.push(attempt);
    }
}

/// Walks the subset ladder over `sorted` (increasing sigma) until a candidate verifies
/// against the public instance. Attempts are appended to `outcome`.
pub fn train_ladder(
    inst: &LweInstance,
    sorted: &[Sample],
    cfg: &PipelineConfig,
    matrices: usize,
    outcome: &mut TrainOutcome,
) -> Result<bool> {
    let sizes = ladder_sizes(sorted.len(), inst.n, &cfg.ladder, cfg.train_fraction);
    for size in sizes {
        let seed = derive_seed(cfg.seed, streams::RANSAC, outcome.attempts.len() as u64);
        let (s, fit) = fit_secret(
            &sorted[..size],
            inst.q.value(),
            &inst.secret_spec,
            &inst.error_spec,
            &cfg.estimator,
            cfg.candidate_window,
            seed,
        )?;
        let report = verify_secret(inst, &s, &inst.error_spec, cfg.verify_tau);
        let verification = VerificationSummary::from(&report);
        info!(
            "fit on {size}/{} samples: sigma_r {:.2} (threshold {:.2}) accept {}",
            sorted.len(),
            verification.sigma_r,
            verification.threshold,
            verification.accept
        );
        let accept = verification.accept;
        outcome.record(
            s,
            Attempt {
                matrices,
                available: sorted.len(),
                subset_size: size,
                estimator: cfg.estimator.kind,
                iterations: fit.iterations,
                converged: fit.converged,
                ridge: fit.ridge,
                fallback: fit.fallback,
                verification,
            },
        );
        if accept {
            return Ok(true);
        }
    }
    Ok(false)
}
