use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{param, Error, Result};
use crate::estimators::{IrlsParams, RansacParams, DEFAULT_TAU};
use crate::instances::{derive_seed, ErrorSpec, SecretFamily};
use crate::nomod_approx::DEFAULT_T_SIGMA;
use crate::reduction::ReductionConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Lwe,
    /// Ring (`rank = 1`) or module instance over `Z_q[x]/(x^n + 1)`.
    Ring,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceParams {
    pub kind: InstanceKind,
    /// LWE dimension, or ring degree for ring instances.
    pub n: usize,
    /// Module rank; must be 1 for plain LWE.
    pub rank: usize,
    pub q: i64,
    /// LWE rows available to the attacker; `4 n rank` when unset.
    pub samples: Option<usize>,
    pub secret: SecretFamily,
    pub error: ErrorSpec,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            kind: InstanceKind::Lwe,
            n: 32,
            rank: 1,
            q: 251,
            samples: None,
            secret: SecretFamily::binary(),
            error: ErrorSpec::Gaussian { sigma: 3.0 },
        }
    }
}

impl InstanceParams {
    /// Total secret dimension.
    pub fn dim(&self) -> usize {
        self.n * self.rank
    }

    pub fn sample_rows(&self) -> usize {
        self.samples.unwrap_or(4 * self.dim())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Ols,
    Huber,
    Tukey,
    Ransac,
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ols" => Ok(Self::Ols),
            "huber" => Ok(Self::Huber),
            "tukey" => Ok(Self::Tukey),
            "ransac" => Ok(Self::Ransac),
            _ => param(format!("unknown estimator {s:?}")),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Ols => "ols",
            Self::Huber => "huber",
            Self::Tukey => "tukey",
            Self::Ransac => "ransac",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub huber: IrlsParams,
    pub tukey: IrlsParams,
    pub ransac: RansacParams,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            kind: EstimatorKind::Tukey,
            huber: IrlsParams::default(),
            tukey: IrlsParams::default(),
            ransac: RansacParams::default(),
        }
    }
}

/// Full attack configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub instance: InstanceParams,
    /// Error penalty of the dual embedding; 4 for CBD and 10 for Gaussian errors when unset.
    pub omega: Option<i64>,
    pub reduction: ReductionConfig,
    /// Number of reduced matrices `l`.
    pub matrices: usize,
    /// Pool capacity `t` per matrix.
    pub pool_capacity: usize,
    /// Rows per reduced matrix; the closed-form optimum (capped by the available rows) when unset.
    pub rows_per_matrix: Option<usize>,
    pub train_fraction: f64,
    /// Subset fractions tried before `train_fraction`; the first rung is at least `2n` samples.
    pub ladder: Vec<f64>,
    pub estimator: EstimatorConfig,
    pub verify_tau: f64,
    /// Candidate window half-width in standard deviations.
    pub candidate_window: f64,
    /// Attempt recovery after every reduced matrix.
    pub interleaved: bool,
    /// Reduction workers; 0 uses all cores.
    pub workers: usize,
    pub seed: u64,
    /// Instance seed; derived from `seed` when unset.
    pub instance_seed: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            instance: InstanceParams::default(),
            omega: None,
            reduction: ReductionConfig::default(),
            matrices: 8,
            pool_capacity: 128,
            rows_per_matrix: None,
            train_fraction: 0.75,
            ladder: vec![0.05, 0.10, 0.25, 0.50],
            estimator: EstimatorConfig::default(),
            verify_tau: DEFAULT_TAU,
            candidate_window: DEFAULT_T_SIGMA,
            interleaved: true,
            workers: 0,
            seed: 0,
            instance_seed: None,
        }
    }
}

pub(crate) mod streams {
    pub const INSTANCE: u64 = 100;
    pub const MATRIX: u64 = 101;
    pub const OFFSETS: u64 = 102;
    pub const RANSAC: u64 = 103;
}

impl PipelineConfig {
    pub fn omega(&self) -> i64 {
        self.omega.unwrap_or_else(|| self.instance.error.default_omega())
    }

    pub fn instance_seed(&self) -> u64 {
        self.instance_seed
            .unwrap_or_else(|| derive_seed(self.seed, streams::INSTANCE, 0))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.instance;
        if p.n == 0 || p.rank == 0 {
            return param("instance dimension and rank must be positive");
        }
        if p.kind == InstanceKind::Lwe && p.rank != 1 {
            return param("plain LWE instances have rank 1");
        }
        if p.kind == InstanceKind::Ring {
            if !p.n.is_power_of_two() {
                return param("ring degree must be a power of two");
            }
            if !p.sample_rows().is_multiple_of(p.n) {
                return param("ring sample count must be a multiple of the degree");
            }
        }
        if p.q < 2 {
            return param("modulus must be >= 2");
        }
        p.secret.clone().with_dim(p.dim()).validate()?;
        p.error.validate()?;
        self.reduction.validate()?;
        if self.omega() < 1 {
            return param("omega must be >= 1");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return param("train_fraction must lie in (0, 1]");
        }
        if self.ladder.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return param("ladder fractions must lie in (0, 1]");
        }
        if self.matrices == 0 || self.pool_capacity == 0 {
            return param("matrices and pool_capacity must be >= 1");
        }
        if !(self.verify_tau > 0.0 && self.candidate_window > 0.0) {
            return param("verify_tau and candidate_window must be positive");
        }
        if self.rows_per_matrix == Some(0) {
            return param("rows_per_matrix must be >= 1");
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Applies `dotted.key=value`; the value is parsed as JSON and otherwise taken as a string.
    pub fn with_override(self, assignment: &str) -> Result<Self> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Param(format!("override {assignment:?} is not key=value")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut doc = serde_json::to_value(&self)?;
        let (parent, field) = match key.trim().rsplit_once('.') {
            Some((p, f)) => (format!("/{}", p.replace('.', "/")), f),
            None => (String::new(), key.trim()),
        };
        let tagged = matches!(parent.as_str(), "/instance/secret" | "/instance/error");
        let obj = doc
            .pointer_mut(&parent)
            .and_then(Value::as_object_mut)
            .ok_or_else(|| Error::Param(format!("{key:?} does not name a config field")))?;
        if !obj.contains_key(field) && !tagged {
            return param(format!("unknown config field {key:?}"));
        }
        obj.insert(field.to_string(), value);
        let cfg: Self = serde_json::from_value(doc)?;
        Ok(cfg)
    }
}
