use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::modulus::Modulus;
use super::sampling::{derive_seed, sample_error, sample_secret, seeded_rng, uniform_centered};
use super::spec::{ErrorSpec, SecretSpec};
use crate::error::{param, Result};

/// Planted secret and error, kept only for experiment harnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub s: Vec<i64>,
    pub e: Vec<i64>,
}

/// Polynomial layout of an LWE instance obtained from a ring or module instance.
///
/// Rows come in `samples` groups of `degree`, columns in `rank` groups of `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingShape {
    pub degree: usize,
    pub rank: usize,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LweInstance {
    pub n: usize,
    pub m: usize,
    pub q: Modulus,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    pub secret_spec: SecretSpec,
    pub error_spec: ErrorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Truth>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingShape>,
}

/// `row . s` reduced to the centered window.
pub fn dot_mod(row: &[i64], s: &[i64], q: Modulus) -> i64 {
    let acc: i128 = row.iter().zip(s).map(|(&a, &x)| a as i128 * x as i128).sum();
    q.center_wide(acc)
}

impl LweInstance {
    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.m || self.b.len() != self.m {
            return param(format!(
                "instance declares m={} but has {} rows of A and {} entries of b",
                self.m,
                self.a.len(),
                self.b.len()
            ));
        }
        if let Some(bad) = self.a.iter().position(|r| r.len() != self.n) {
            return param(format!("row {bad} of A does not have n={} entries", self.n));
        }
        if self.secret_spec.dim != self.n {
            return param(format!(
                "secret dimension {} differs from n={}",
                self.secret_spec.dim, self.n
            ));
        }
        self.secret_spec.validate()?;
        self.error_spec.validate()?;
        if let Some(shape) = self.ring {
            if shape.degree * shape.rank != self.n || shape.degree * shape.samples != self.m {
                return param("ring shape inconsistent with matrix dimensions");
            }
        }
        if let Some(t) = &self.truth {
            if t.s.len() != self.n || t.e.len() != self.m {
                return param("truth vectors have wrong length");
            }
        }
        Ok(())
    }

    /// Centered residuals `b - A s`.
    pub fn residuals(&self, s: &[i64]) -> Vec<i64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &bi)| self.q.center(bi - dot_mod(row, s, self.q)))
            .collect()
    }

    /// True when the stored truth satisfies `b = A s + e (mod q)`.
    pub fn check_truth(&self) -> bool {
        match &self.truth {
            None => false,
            Some(t) => self
                .residuals(&t.s)
                .iter()
                .zip(&t.e)
                .all(|(&r, &e)| self.q.center(r - e) == 0),
        }
    }

    /// Copy with the planted truth removed.
    pub fn public(&self) -> Self {
        Self { truth: None, ..self.clone() }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    /// Builds `b = A s + e` from explicit parts.
    pub fn from_parts(
        a: Vec<Vec<i64>>,
        s: Vec<i64>,
        e: Vec<i64>,
        q: Modulus,
        secret_spec: SecretSpec,
        error_spec: ErrorSpec,
    ) -> Result<Self> {
        let n = s.len();
        let m = a.len();
        if e.len() != m {
            return param("error length differs from row count");
        }
        let b = a
            .iter()
            .zip(&e)
            .map(|(row, &ei)| q.center(dot_mod(row, &s, q) + ei))
            .collect();
        let a = a
            .into_iter()
            .map(|row| row.into_iter().map(|x| q.center(x)).collect())
            .collect();
        let inst = Self {
            n,
            m,
            q,
            a,
            b,
            secret_spec,
            error_spec,
            truth: Some(Truth { s, e }),
            ring: None,
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// Uniform random LWE instance with a planted secret and error.
pub fn gen_lwe(
    n: usize,
    m: usize,
    q: i64,
    secret_spec: &SecretSpec,
    error_spec: &ErrorSpec,
    seed: u64,
) -> Result<LweInstance> {
    let q = Modulus::new(q)?;
    if secret_spec.dim != n {
        return param(format!("secret dimension {} differs from n={n}", secret_spec.dim));
    }
    if n == 0 {
        return param("dimension n must be >= 1");
    }
    if m < n {
        warn!("generating LWE instance with fewer samples ({m}) than unknowns ({n})");
    }
    let s = sample_secret(secret_spec, derive_seed(seed, 1, 0))?;
    let e = sample_error(error_spec, m, derive_seed(seed, 2, 0))?;
    let mut rng = seeded_rng(derive_seed(seed, 3, 0));
    let a = (0..m).map(|_| uniform_centered(n, q.value(), &mut rng)).collect();
    LweInstance::from_parts(a, s, e, q, secret_spec.clone(), error_spec.clone())
}
