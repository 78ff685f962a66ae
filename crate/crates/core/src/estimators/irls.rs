//! Huber and Tukey biweight regression by iteratively reweighted least squares.

use log::warn;
use serde::{Deserialize, Serialize};

use super::ols::solve_weighted;
use super::problem::{FitResult, RegressionProblem};
use crate::error::{param, Result};
use crate::scalar::Real;

pub const HUBER_K: f64 = 1.345;
pub const TUKEY_C: f64 = 4.685;
const MAD_NORMAL: f64 = 0.6745;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IrlsParams {
    /// Absolute threshold (`epsilon` for Huber, `c` for Tukey); when `None` it is
    /// the tuning constant times the MAD scale of the warm-start residuals.
    pub threshold: Option<f64>,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for IrlsParams {
    fn default() -> Self {
        Self { threshold: None, max_iter: 50, tol: 1e-8 }
    }
}

/// `median(|r|) / 0.6745`.
pub fn mad_scale<R: Real>(residuals: &[R]) -> R {
    let mut a: Vec<R> = residuals.iter().map(|r| r.abs()).collect();
    if a.is_empty() {
        return R::zero();
    }
    a.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mid = a.len() / 2;
    let med = if a.len() % 2 == 1 { a[mid] } else { (a[mid - 1] + a[mid]) / R::of(2.0) };
    med / R::of(MAD_NORMAL)
}

pub fn huber_loss<R: Real>(r: R, eps: R) -> R {
    let a = r.abs();
    let half = R::of(0.5);
    if a <= eps {
        half * r * r
    } else {
        eps * a - half * eps * eps
    }
}

pub fn huber_weight<R: Real>(r: R, eps: R) -> R {
    let a = r.abs();
    if a <= eps {
        R::one()
    } else {
        eps / a
    }
}

/// Biweight loss `c^2/6 (1 - (1 - (r/c)^2)^3)`, saturating at `c^2/6`.
pub fn tukey_loss<R: Real>(r: R, c: R) -> R {
    let sat = c * c / R::of(6.0);
    if r.abs() >= c {
        return sat;
    }
    let u = R::one() - (r / c) * (r / c);
    sat * (R::one() - u * u * u)
}

pub fn tukey_weight<R: Real>(r: R, c: R) -> R {
    if r.abs() > c {
        return R::zero();
    }
    let u = R::one() - (r / c) * (r / c);
    u * u
}

fn total_loss<R: Real>(p: &RegressionProblem<R>, res: &[R], f: impl Fn(R) -> R) -> R {
    res.iter()
        .enumerate()
        .map(|(i, &r)| p.base_weight(i) * f(r))
        .fold(R::zero(), |a, b| a + b)
}

fn max_change<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(R::zero(), |m, v| if v > m { v } else { m })
}

struct Irls<'a, R: Real> {
    problem: &'a RegressionProblem<R>,
    params: &'a IrlsParams,
    threshold: R,
    scale: R,
    /// Tuning constant when the threshold follows the residual scale.
    tuning: Option<R>,
    loss: fn(R, R) -> R,
    weight: fn(R, R) -> R,
}

enum IrlsOutcome<R: Real> {
    Done(FitResult<R>),
    ZeroWeights(FitResult<R>),
}

impl<R: Real> Irls<'_, R> {
    fn run(&self, start: Vec<R>) -> Result<IrlsOutcome<R>> {
        let p = self.problem;
        let (loss, weight) = (self.loss, self.weight);
        let (mut t, mut scale) = (self.threshold, self.scale);
        let mut coef = start;
        let mut res = p.residuals(&coef);
        let mut history = vec![total_loss(p, &res, |r| loss(r, t))];
        let mut current = history[0];
        let mut w: Vec<R> = res.iter().map(|&r| weight(r, t)).collect();
        let mut ridge = false;
        let mut converged = false;
        let mut iterations = 0;
        for _ in 0..self.params.max_iter {
            if w.iter().enumerate().all(|(i, &wi)| wi * p.base_weight(i) == R::zero()) {
                let fit = self.result(coef, w, iterations, false, ridge, history, scale);
                return Ok(IrlsOutcome::ZeroWeights(fit));
            }
            iterations += 1;
            let (next, r) = solve_weighted(p, &w)?;
            ridge |= r;
            let next_res = p.residuals(&next);
            let next_loss = total_loss(p, &next_res, |r| loss(r, t));
            let change = max_change(&next, &coef);
            if next_loss > current {
                // numerical noise can make the majorization step overshoot; keep the better iterate
                converged = change < R::of(self.params.tol).max(R::of(1e-9));
                break;
            }
            history.push(next_loss);
            current = next_loss;
            coef = next;
            res = next_res;
            // both losses are nondecreasing in the threshold, so shrinking it keeps the sequence monotone
            if let Some(k) = self.tuning {
                let fresh = mad_scale(&res);
                if fresh > R::zero() && fresh < scale {
                    scale = fresh;
                    t = k * scale;
                    current = total_loss(p, &res, |r| loss(r, t));
                }
            }
            w = res.iter().map(|&r| weight(r, t)).collect();
            if change < R::of(self.params.tol) {
                converged = true;
                break;
            }
        }
        if !converged {
            warn!("IRLS stopped after {iterations} iterations without converging");
        }
        Ok(IrlsOutcome::Done(self.result(coef, w, iterations, converged, ridge, history, scale)))
    }

    fn result(
        &self,
        coefficients: Vec<R>,
        weights: Vec<R>,
        iterations: usize,
        converged: bool,
        ridge: bool,
        loss_history: Vec<R>,
        scale: R,
    ) -> FitResult<R> {
        FitResult {
            coefficients,
            weights,
            inliers: None,
            iterations,
            converged,
            ridge,
            fallback: false,
            scale,
            loss_history,
        }
    }
}

fn threshold<R: Real>(params: &IrlsParams, k: f64, scale: R) -> Result<Option<R>> {
    match params.threshold {
        Some(t) if !(t > 0.0) => param(format!("robust threshold must be positive, got {t}")),
        Some(t) => Ok(Some(R::of(t))),
        None if scale > R::zero() => Ok(Some(R::of(k) * scale)),
        None => Ok(None),
    }
}

/// Huber regression from an OLS warm start. Without an explicit threshold the residual
/// scale is re-estimated after every step and only allowed to shrink.
pub fn fit_huber<R: Real>(p: &RegressionProblem<R>, params: &IrlsParams) -> Result<FitResult<R>> {
    p.validate()?;
    let ones = vec![R::one(); p.samples()];
    let (start, ridge) = solve_weighted(p, &ones)?;
    let scale = mad_scale(&p.residuals(&start));
    let Some(eps) = threshold(params, HUBER_K, scale)? else {
        // zero residual scale: the warm start already fits the majority exactly
        let mut f = FitResult::plain(start, p.samples(), ridge);
        f.loss_history = vec![R::zero()];
        return Ok(f);
    };
    let tuning = params.threshold.is_none().then(|| R::of(HUBER_K));
    let irls = Irls { problem: p, params, threshold: eps, scale, tuning, loss: huber_loss, weight: huber_weight };
    let mut fit = match irls.run(start)? {
        IrlsOutcome::Done(f) | IrlsOutcome::ZeroWeights(f) => f,
    };
    fit.ridge |= ridge;
    Ok(fit)
}

/// Tukey biweight regression warm-started from [`fit_huber`]. Falls back to the Huber
/// result (flagged) when every weight vanishes.
pub fn fit_tukey<R: Real>(
    p: &RegressionProblem<R>,
    params: &IrlsParams,
    huber: &IrlsParams,
) -> Result<FitResult<R>> {
    let warm = fit_huber(p, huber)?;
    let scale = mad_scale(&p.residuals(&warm.coefficients));
    let Some(c) = threshold(params, TUKEY_C, scale)? else {
        return Ok(warm);
    };
    let tuning = params.threshold.is_none().then(|| R::of(TUKEY_C));
    let irls = Irls { problem: p, params, threshold: c, scale, tuning, loss: tukey_loss, weight: tukey_weight };
    match irls.run(warm.coefficients.clone())? {
        IrlsOutcome::Done(mut f) => {
            f.ridge |= warm.ridge;
            Ok(f)
        }
        IrlsOutcome::ZeroWeights(_) => {
            warn!("all biweight weights vanished; returning the Huber fit");
            Ok(FitResult { fallback: true, ..warm })
        }
    }
}
