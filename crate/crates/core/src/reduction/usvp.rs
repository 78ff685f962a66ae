//! Primal attack through Kannan's embedding, for tiny instances.

use serde::{Deserialize, Serialize};

use super::bkz::bkz;
use super::lattice::Lattice;
use crate::error::Result;
use crate::estimators::{verify_secret, DEFAULT_TAU};
use crate::instances::LweInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UsvpConfig {
    /// Number of instance rows used; all rows when `None`.
    pub samples: Option<usize>,
    pub block_sizes: Vec<usize>,
    pub tours_per_block: usize,
    pub delta: f64,
    pub tau: f64,
}

impl Default for UsvpConfig {
    fn default() -> Self {
        Self {
            samples: None,
            block_sizes: vec![10, 20],
            tours_per_block: 8,
            delta: 0.99,
            tau: DEFAULT_TAU,
        }
    }
}

/// Rows `(e_i | A[:,i] | 0)`, `(0 | q e_j | 0)` and `(0 | -b | 1)`.
pub fn kannan_embedding(inst: &LweInstance, m: usize) -> Vec<Vec<i64>> {
    let n = inst.n;
    let q = inst.q.value();
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(width);
    for i in 0..n {
        let mut row = vec![0i64; width];
        row[i] = 1;
        for j in 0..m {
            row[n + j] = inst.a[j][i];
        }
        rows.push(row);
    }
    for j in 0..m {
        let mut row = vec![0i64; width];
        row[n + j] = q;
        rows.push(row);
    }
    let mut last = vec![0i64; width];
    for j in 0..m {
        last[n + j] = -inst.b[j];
    }
    last[n + m] = 1;
    rows.push(last);
    rows
}

fn scan(inst: &LweInstance, lat: &Lattice, cfg: &UsvpConfig) -> Option<Vec<i64>> {
    let n = inst.n;
    let w = lat.width();
    lat.rows().iter().find_map(|row| {
        let sign = match row[w - 1] {
            1 => 1,
            -1 => -1,
            _ => return None,
        };
        let s: Vec<i64> = row[..n].iter().map(|&x| sign * x).collect();
        verify_secret(inst, &s, &inst.error_spec, cfg.tau).accept.then_some(s)
    })
}

/// Reduces the embedding with increasing block sizes and returns the first verified secret.
pub fn primal_usvp_attack(inst: &LweInstance, cfg: &UsvpConfig) -> Result<Option<Vec<i64>>> {
    let m = cfg.samples.unwrap_or(inst.m).min(inst.m);
    let mut lat: Lattice = Lattice::new(kannan_embedding(inst, m), false)?;
    lat.lll(cfg.delta)?;
    if let Some(s) = scan(inst, &lat, cfg) {
        return Ok(Some(s));
    }
    for &beta in &cfg.block_sizes {
        let beta = beta.min(lat.dim());
        if beta < 2 {
            continue;
        }
        bkz(&mut lat, beta, cfg.delta, cfg.tours_per_block)?;
        if let Some(s) = scan(inst, &lat, cfg) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
