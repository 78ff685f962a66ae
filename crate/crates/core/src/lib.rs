//! Module-LWE cryptanalysis workbench: instance generation, lattice reduction with
//! short-vector accumulation, ring-structure sample amplification, non-modular
//! moment estimates and robust-regression secret recovery.

pub mod error;
pub mod estimators;
pub mod instances;
pub mod linalg;
pub mod mlwe_enhance;
pub mod nomod_approx;
pub mod pipeline;
pub mod reduction;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Lattice64 = reduction::Lattice<f64>;
pub type Lattice32 = reduction::Lattice<f32>;
pub type RegressionProblem64 = estimators::RegressionProblem<f64>;
pub type RegressionProblem32 = estimators::RegressionProblem<f32>;
pub type FitResult64 = estimators::FitResult<f64>;
pub type FitResult32 = estimators::FitResult<f32>;
