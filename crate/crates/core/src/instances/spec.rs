use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Distribution family of the secret coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SecretFamily {
    BinaryBernoulli { p: f64 },
    BinaryFixedHw { h: usize },
    TernaryBalanced,
    TernaryFixedHw { h: usize },
    Cbd { eta: u32 },
    CbdFixedHw { eta: u32, h: usize },
}

impl SecretFamily {
    pub fn binary() -> Self {
        SecretFamily::BinaryBernoulli { p: 0.5 }
    }

    pub fn hamming_weight(&self) -> Option<usize> {
        match *self {
            SecretFamily::BinaryFixedHw { h }
            | SecretFamily::TernaryFixedHw { h }
            | SecretFamily::CbdFixedHw { h, .. } => Some(h),
            _ => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(
            self,
            SecretFamily::BinaryBernoulli { .. } | SecretFamily::BinaryFixedHw { .. }
        )
    }

    /// Inclusive coordinate range `[lo, hi]`.
    pub fn support(&self) -> (i64, i64) {
        match *self {
            SecretFamily::BinaryBernoulli { .. } | SecretFamily::BinaryFixedHw { .. } => (0, 1),
            SecretFamily::TernaryBalanced | SecretFamily::TernaryFixedHw { .. } => (-1, 1),
            SecretFamily::Cbd { eta } | SecretFamily::CbdFixedHw { eta, .. } => {
                (-(eta as i64), eta as i64)
            }
        }
    }

    pub fn with_dim(self, dim: usize) -> SecretSpec {
        SecretSpec { dim, family: self }
    }
}

impl Default for SecretFamily {
    fn default() -> Self {
        Self::binary()
    }
}

impl fmt::Display for SecretFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecretFamily::BinaryBernoulli { p } => write!(f, "binary:{p}"),
            SecretFamily::BinaryFixedHw { h } => write!(f, "binary-hw:{h}"),
            SecretFamily::TernaryBalanced => write!(f, "ternary"),
            SecretFamily::TernaryFixedHw { h } => write!(f, "ternary-hw:{h}"),
            SecretFamily::Cbd { eta } => write!(f, "cbd:{eta}"),
            SecretFamily::CbdFixedHw { eta, h } => write!(f, "cbd-hw:{eta}:{h}"),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Param(format!("cannot parse {what} from {s:?}")))
}

impl FromStr for SecretFamily {
    type Err = Error;

    /// Accepts `binary[:p]`, `binary-hw:h`, `ternary`, `ternary-hw:h`, `cbd:eta`, `cbd-hw:eta:h`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let family = match parts.as_slice() {
            ["binary"] => SecretFamily::binary(),
            ["binary", p] => SecretFamily::BinaryBernoulli { p: parse_num(p, "p")? },
            ["binary-hw", h] => SecretFamily::BinaryFixedHw { h: parse_num(h, "h")? },
            ["ternary"] => SecretFamily::TernaryBalanced,
            ["ternary-hw", h] => SecretFamily::TernaryFixedHw { h: parse_num(h, "h")? },
            ["cbd", eta] => SecretFamily::Cbd { eta: parse_num(eta, "eta")? },
            ["cbd-hw", eta, h] => SecretFamily::CbdFixedHw {
                eta: parse_num(eta, "eta")?,
                h: parse_num(h, "h")?,
            },
            _ => return param(format!("unknown secret family {s:?}")),
        };
        Ok(family)
    }
}

/// Secret family together with the total secret dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecretSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub family: SecretFamily,
}

impl SecretSpec {
    pub fn new(family: SecretFamily, dim: usize) -> Result<Self> {
        let spec = SecretSpec { dim, family };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.family.hamming_weight() {
            if h > self.dim {
                return param(format!(
                    "Hamming weight {h} exceeds secret dimension {}",
                    self.dim
                ));
            }
        }
        match self.family {
            SecretFamily::BinaryBernoulli { p } if !(p > 0.0 && p < 1.0) => {
                param(format!("Bernoulli parameter must lie in (0,1), got {p}"))
            }
            SecretFamily::Cbd { eta } | SecretFamily::CbdFixedHw { eta, .. } if eta == 0 => {
                param("CBD parameter eta must be >= 1")
            }
            _ => Ok(()),
        }
    }
}

/// Distribution of the additive error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ErrorSpec {
    Gaussian { sigma: f64 },
    Cbd { eta: u32 },
}

impl ErrorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ErrorSpec::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                param(format!("Gaussian sigma must be positive, got {sigma}"))
            }
            ErrorSpec::Cbd { eta: 0 } => param("CBD parameter eta must be >= 1"),
            _ => Ok(()),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            ErrorSpec::Gaussian { sigma } => sigma * sigma,
            ErrorSpec::Cbd { eta } => eta as f64 / 2.0,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Largest possible |e| for bounded families.
    pub fn support_bound(&self) -> Option<i64> {
        match *self {
            ErrorSpec::Gaussian { .. } => None,
            ErrorSpec::Cbd { eta } => Some(eta as i64),
        }
    }

    /// Default error-penalty weight for the dual embedding.
    pub fn default_omega(&self) -> i64 {
        match self {
            ErrorSpec::Cbd { .. } => 4,
            ErrorSpec::Gaussian { .. } => 10,
        }
    }
}

impl fmt::Display for ErrorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorSpec::Gaussian { sigma } => write!(f, "gaussian:{sigma}"),
            ErrorSpec::Cbd { eta } => write!(f, "cbd:{eta}"),
        }
    }
}

impl FromStr for ErrorSpec {
    type Err = Error;

    /// Accepts `gaussian:sigma` or `cbd:eta`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["gaussian", sigma] => ErrorSpec::Gaussian { sigma: parse_num(sigma, "sigma")? },
            ["cbd", eta] => ErrorSpec::Cbd { eta: parse_num(eta, "eta")? },
            _ => return param(format!("unknown error family {s:?}")),
        };
        spec.validate()?;
        Ok(spec)
    }
}
