use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Weighted linear model `y ~ X s`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionProblem<R: Real = f64> {
    pub x: Vec<Vec<R>>,
    pub y: Vec<R>,
    pub weights: Option<Vec<R>>,
}

impl<R: Real> RegressionProblem<R> {
    pub fn new(x: Vec<Vec<R>>, y: Vec<R>) -> Result<Self> {
        let p = Self { x, y, weights: None };
        p.validate()?;
        Ok(p)
    }

    pub fn from_integers(x: &[Vec<i64>], y: &[i64]) -> Result<Self> {
        Self::new(
            x.iter().map(|r| r.iter().map(|&v| R::of_int(v)).collect()).collect(),
            y.iter().map(|&v| R::of_int(v)).collect(),
        )
    }

    pub fn with_weights(mut self, w: Vec<R>) -> Result<Self> {
        if w.len() != self.y.len() {
            return Err(Error::LengthMismatch { expected: self.y.len(), actual: w.len() });
        }
        if w.iter().any(|&v| !(v >= R::zero())) {
            return Err(Error::Param("sample weights must be non-negative".into()));
        }
        self.weights = Some(w);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::LengthMismatch { expected: self.x.len(), actual: self.y.len() });
        }
        if self.x.is_empty() {
            return Err(Error::Param("regression problem has no samples".into()));
        }
        let n = self.x[0].len();
        if n == 0 || self.x.iter().any(|r| r.len() != n) {
            return Err(Error::Param("design matrix rows must share a positive width".into()));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.y.len()
    }

    pub fn features(&self) -> usize {
        self.x[0].len()
    }

    pub fn base_weight(&self, i: usize) -> R {
        self.weights.as_ref().map_or(R::one(), |w| w[i])
    }

    pub fn residuals(&self, coef: &[R]) -> Vec<R> {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(row, &yi)| yi - row.iter().zip(coef).map(|(&a, &b)| a * b).sum::<R>())
            .collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            weights: self.weights.as_ref().map(|w| idx.iter().map(|&i| w[i]).collect()),
        }
    }

    /// Same problem with `X` and `y` multiplied by `c`.
    pub fn scaled(&self, c: R) -> Self {
        Self {
            x: self.x.iter().map(|r| r.iter().map(|&v| v * c).collect()).collect(),
            y: self.y.iter().map(|&v| v * c).collect(),
            weights: self.weights.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<R: Real = f64> {
    pub coefficients: Vec<R>,
    /// Final robust weights in `[0, 1]`.
    pub weights: Vec<R>,
    /// Consensus set (RANSAC only).
    pub inliers: Option<Vec<bool>>,
    pub iterations: usize,
    pub converged: bool,
    /// Normal equations were singular and a ridge term was added.
    pub ridge: bool,
    /// Tukey produced all-zero weights and the Huber fit was returned instead.
    pub fallback: bool,
    /// Residual scale (MAD / 0.6745) used to set the robust thresholds.
    pub scale: R,
    /// Total robust loss after each IRLS step, starting with the warm start.
    pub loss_history: Vec<R>,
}

impl<R: Real> FitResult<R> {
    pub(crate) fn plain(coefficients: Vec<R>, m: usize, ridge: bool) -> Self {
        Self {
            coefficients,
            weights: vec![R::one(); m],
            inliers: None,
            iterations: 1,
            converged: true,
            ridge,
            fallback: false,
            scale: R::zero(),
            loss_history: Vec::new(),
        }
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.as_f64()).collect()
    }
}
