use serde::{Deserialize, Serialize};

use super::samples::Sample;
use super::train::ladder_sizes;
use crate::error::{param, Result};
use crate::instances::{ErrorSpec, SecretFamily};
use crate::nomod_approx::{inlier_prob, sample_moments};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RungEstimate {
    pub size: usize,
    pub mean_sigma: f64,
    pub predicted_inlier_rate: f64,
}

/// Moment-based quality estimate of a sample store.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreEstimate {
    pub samples: usize,
    pub mean_sigma: f64,
    pub predicted_inlier_rate: f64,
    pub expected_inliers: f64,
    /// Nested training subsets ordered by increasing sigma.
    pub rungs: Vec<RungEstimate>,
}

/// Recomputes every sample's sigma from the given secret and error families and
/// summarizes the training ladder.
pub fn estimate_store(
    samples: &[Sample],
    q: i64,
    secret: &SecretFamily,
    error: &ErrorSpec,
    fractions: &[f64],
    train_fraction: f64,
) -> Result<StoreEstimate> {
    let Some(first) = samples.first() else {
        return param("empty sample store");
    };
    let n = first.x.len();
    let spec = secret.clone().with_dim(n);
    spec.validate()?;
    let mut sigmas: Vec<f64> = samples
        .iter()
        .map(|s| sample_moments(&s.x, s.r_norm_sq as f64, &spec, error).sigma())
        .collect();
    sigmas.sort_by(f64::total_cmp);
    let probs: Vec<f64> = sigmas.iter().map(|&s| inlier_prob(q as f64, s)).collect();
    let summary = |k: usize| RungEstimate {
        size: k,
        mean_sigma: sigmas[..k].iter().sum::<f64>() / k as f64,
        predicted_inlier_rate: probs[..k].iter().sum::<f64>() / k as f64,
    };
    let all = summary(sigmas.len());
    Ok(StoreEstimate {
        samples: sigmas.len(),
        mean_sigma: all.mean_sigma,
        predicted_inlier_rate: all.predicted_inlier_rate,
        expected_inliers: probs.iter().sum(),
        rungs: ladder_sizes(sigmas.len(), n, fractions, train_fraction).into_iter().map(summary).collect(),
    })
}
