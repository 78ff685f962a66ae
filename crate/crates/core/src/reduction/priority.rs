use serde::{Deserialize, Serialize};

use crate::instances::{ErrorSpec, Modulus, SecretSpec};
use crate::nomod_approx::sample_moments;

/// Ranks embedded rows `(omega r | r A + q c)` by the standard deviation of the
/// pre-modular value of the sample they produce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorityModel {
    pub m: usize,
    pub omega: i64,
    pub q: Modulus,
    pub secret: SecretSpec,
    pub error: ErrorSpec,
}

impl PriorityModel {
    /// `sigma_b~ = sqrt(Var(x . s) + |r|^2 Var(e))` with `x` the centered `r A` part.
    pub fn sigma(&self, row: &[i64]) -> f64 {
        let (rpart, ypart) = row.split_at(self.m.min(row.len()));
        let r_norm_sq: f64 = rpart
            .iter()
            .map(|&v| {
                let r = v as f64 / self.omega as f64;
                r * r
            })
            .sum();
        let x: Vec<i64> = ypart.iter().map(|&y| self.q.center(y)).collect();
        sample_moments(&x, r_norm_sq, &self.secret, &self.error).sigma()
    }

    /// Priority used when offering rows to a pool. Rows whose `r` part is zero
    /// (pure `q`-vectors) or whose sample part vanishes mod `q` carry no information
    /// about the secret and are skipped.
    pub fn offer_priority(&self, row: &[i64]) -> Option<f64> {
        let (rpart, ypart) = row.split_at(self.m.min(row.len()));
        if rpart.iter().all(|&v| v == 0) || ypart.iter().all(|&y| self.q.center(y) == 0) {
            return None;
        }
        Some(self.sigma(row))
    }
}
