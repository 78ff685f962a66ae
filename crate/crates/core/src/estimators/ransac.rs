use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::ols::solve_weighted;
use super::problem::{FitResult, RegressionProblem};
use crate::error::{param, Result};
use crate::instances::seeded_rng;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RansacParams {
    /// Minimal subset size; the number of unknowns when `None`.
    pub subset_size: Option<usize>,
    pub n_trials: usize,
    /// Absolute residual bound for inliers; `3 * MAD scale` of the best trial by median
    /// residual when `None`.
    pub residual_tol: Option<f64>,
    pub seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self { subset_size: None, n_trials: 200, residual_tol: None, seed: 0 }
    }
}

struct Consensus<R: Real> {
    coef: Vec<R>,
    mask: Vec<bool>,
    count: usize,
    spread: R,
}

fn consensus<R: Real>(p: &RegressionProblem<R>, coef: Vec<R>, tol: R) -> Consensus<R> {
    let res = p.residuals(&coef);
    let mask: Vec<bool> = res.iter().map(|r| r.abs() <= tol).collect();
    let inl: Vec<R> = res.iter().zip(&mask).filter(|(_, &m)| m).map(|(&r, _)| r).collect();
    let count = inl.len();
    let spread = if count == 0 {
        R::infinity()
    } else {
        let k = R::of(count as f64);
        let mean = inl.iter().copied().fold(R::zero(), |a, b| a + b) / k;
        inl.iter().map(|&r| (r - mean) * (r - mean)).fold(R::zero(), |a, b| a + b) / k
    };
    Consensus { coef, mask, count, spread }
}

/// `3 * MAD scale` of the trial model with the smallest median absolute residual, floored
/// relative to the target magnitude so that exact fits still admit rounding noise.
fn default_tolerance<R: Real>(p: &RegressionProblem<R>, models: &[Vec<R>]) -> R {
    let ymax = p.y.iter().fold(R::one(), |a, &b| if b.abs() > a { b.abs() } else { a });
    let floor = R::of(1e-9) * ymax;
    let best = models
        .iter()
        .map(|c| super::irls::mad_scale(&p.residuals(c)))
        .fold(R::infinity(), |a, b| if b < a { b } else { a });
    if best.is_finite() && R::of(3.0) * best > floor {
        R::of(3.0) * best
    } else {
        floor
    }
}

/// Random-sample consensus: fit OLS on random subsets, keep the model with the most
/// inliers (ties: smaller inlier residual variance), then refit on its inliers.
pub fn fit_ransac<R: Real>(p: &RegressionProblem<R>, params: &RansacParams) -> Result<FitResult<R>> {
    p.validate()?;
    let (m, n) = (p.samples(), p.features());
    if params.n_trials == 0 {
        return param("RANSAC needs at least one trial");
    }
    let k = params.subset_size.unwrap_or(n);
    if k < n || k > m {
        return param(format!("subset size {k} must lie in [{n}, {m}]"));
    }
    let mut rng = seeded_rng(params.seed);
    let models: Vec<Vec<R>> = (0..params.n_trials)
        .filter_map(|_| {
            let mut idx = index::sample(&mut rng, m, k).into_vec();
            idx.sort_unstable();
            match solve_weighted(&p.subset(&idx), &vec![R::one(); k]) {
                Ok((coef, false)) => Some(coef),
                _ => None,
            }
        })
        .collect();
    let tol = match params.residual_tol {
        Some(t) if !(t > 0.0) => return param("residual tolerance must be positive"),
        Some(t) => R::of(t),
        None => default_tolerance(p, &models),
    };
    let mut best: Option<Consensus<R>> = None;
    for coef in models {
        let c = consensus(p, coef, tol);
        let better = match &best {
            None => true,
            Some(b) => c.count > b.count || (c.count == b.count && c.spread < b.spread),
        };
        if better {
            best = Some(c);
        }
    }
    let fail = |coef: Vec<R>, mask: Vec<bool>| FitResult {
        coefficients: coef,
        weights: mask.iter().map(|&b| if b { R::one() } else { R::zero() }).collect(),
        inliers: Some(mask),
        iterations: params.n_trials,
        converged: false,
        ridge: false,
        fallback: false,
        scale: tol,
        loss_history: Vec::new(),
    };
    let Some(best) = best.filter(|b| b.count >= n) else {
        return Ok(fail(vec![R::zero(); n], vec![false; m]));
    };
    let inl: Vec<usize> = (0..m).filter(|&i| best.mask[i]).collect();
    let (refit, ridge) = solve_weighted(&p.subset(&inl), &vec![R::one(); inl.len()])?;
    let refined = consensus(p, refit, tol);
    let chosen = if refined.count >= best.count { refined } else { best };
    Ok(FitResult {
        weights: chosen.mask.iter().map(|&b| if b { R::one() } else { R::zero() }).collect(),
        coefficients: chosen.coef,
        inliers: Some(chosen.mask),
        iterations: params.n_trials,
        converged: true,
        ridge,
        fallback: false,
        scale: tol,
        loss_history: Vec::new(),
    })
}
