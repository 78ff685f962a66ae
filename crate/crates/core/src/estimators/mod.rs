//! Robust linear regression for secret recovery and residual verification.

mod irls;
mod ols;
mod problem;
mod ransac;
mod secret;

pub use irls::{
    fit_huber, fit_tukey, huber_loss, huber_weight, mad_scale, tukey_loss, tukey_weight,
    IrlsParams, HUBER_K, TUKEY_C,
};
pub use ols::fit_ols;
pub use problem::{FitResult, RegressionProblem};
pub use ransac::{fit_ransac, RansacParams};
pub use secret::{normalize_round_clip, verify_secret, VerificationReport, DEFAULT_TAU};
