use log::debug;
use serde::{Deserialize, Serialize};

use super::bkz::{bkz_tour, polish};
use super::lattice::Lattice;
use super::pool::ShortVectorPool;
use crate::error::{param, Result};
use crate::scalar::Real;

/// Progressive BKZ schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReductionConfig {
    pub delta_lll: f64,
    pub delta_bkz: f64,
    pub block_start: usize,
    pub block_cap: usize,
    pub block_step: usize,
    pub stall_tours: usize,
    pub pre_passes: usize,
    pub tour_budget: usize,
    pub polish: bool,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            delta_lll: 0.99,
            delta_bkz: 0.99,
            block_start: 20,
            block_cap: 40,
            block_step: 10,
            stall_tours: 4,
            pre_passes: 4,
            tour_budget: 60,
            polish: true,
        }
    }
}

impl ReductionConfig {
    pub fn validate(&self) -> Result<()> {
        for d in [self.delta_lll, self.delta_bkz] {
            if !(d > 0.25 && d <= 1.0) {
                return param(format!("reduction delta must lie in (0.25, 1], got {d}"));
            }
        }
        if self.block_start < 2 || self.block_cap < self.block_start {
            return param("block schedule must satisfy 2 <= start <= cap");
        }
        if self.block_step == 0 && self.block_cap > self.block_start {
            return param("block increment must be positive when cap > start");
        }
        if self.stall_tours == 0 {
            return param("stall_tours must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReductionStats {
    pub tours: usize,
    pub final_block_size: usize,
    pub insertions: usize,
    pub enumeration_nodes: u64,
    pub offered: usize,
}

fn offer_rows<R: Real>(
    lat: &Lattice<R>,
    pool: &mut ShortVectorPool,
    priority: &dyn Fn(&[i64]) -> Option<f64>,
    source: usize,
    tour: usize,
) -> usize {
    let mut stored = 0;
    for row in lat.rows() {
        if let Some(p) = priority(row) {
            stored += pool.offer(row, p, source, tour) as usize;
        }
    }
    stored
}

/// LLL warm-up passes followed by BKZ tours with a growing block size. All rows are
/// offered to `pool` after the warm-up and after every tour.
pub fn progressive_reduce<R: Real>(
    lat: &mut Lattice<R>,
    cfg: &ReductionConfig,
    pool: &mut ShortVectorPool,
    priority: &dyn Fn(&[i64]) -> Option<f64>,
    source: usize,
) -> Result<ReductionStats> {
    cfg.validate()?;
    let d = lat.dim();
    let mut stats = ReductionStats::default();
    for _ in 0..cfg.pre_passes.max(1) {
        let before = lat.swap_count();
        lat.lll(cfg.delta_lll)?;
        if lat.swap_count() == before {
            break;
        }
    }
    stats.offered += offer_rows(lat, pool, priority, source, 0);
    if d < 2 {
        return Ok(stats);
    }
    let cap = cfg.block_cap.min(d);
    let mut beta = cfg.block_start.min(cap);
    let mut stall = 0;
    while stats.tours < cfg.tour_budget {
        let tour = bkz_tour(lat, beta, cfg.delta_bkz)?;
        stats.tours += 1;
        stats.insertions += tour.insertions;
        stats.enumeration_nodes += tour.nodes;
        if cfg.polish {
            polish(lat);
        }
        stats.offered += offer_rows(lat, pool, priority, source, stats.tours);
        debug!(
            "tour {} beta {beta}: {} insertions, {} nodes",
            stats.tours, tour.insertions, tour.nodes
        );
        if tour.improved {
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= cfg.stall_tours {
            if beta >= cap {
                break;
            }
            beta = (beta + cfg.block_step).min(cap);
            stall = 0;
        }
    }
    stats.final_block_size = beta;
    Ok(stats)
}
