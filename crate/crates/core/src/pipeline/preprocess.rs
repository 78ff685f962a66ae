use log::{info, warn};
use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::config::{streams, PipelineConfig};
use super::samples::{dedup_samples, samples_from_combination, Sample};
use crate::error::{param, Error, Result};
use crate::instances::{derive_seed, seeded_rng, LweInstance};
use crate::mlwe_enhance::{
    assemble_matrix, blocks_from_instance, default_stride, project_and_prune, reinsert,
    OffsetSchedule, PruneBookkeeping, RowSource,
};
use crate::reduction::{
    embed, embedding_rows, optimal_sample_count, progressive_reduce, EmbeddedBasis, PoolEntry,
    PriorityModel, ReductionStats, ShortVectorPool,
};

/// Sample rows selected for one reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedMatrix {
    pub id: usize,
    pub rows: Vec<Vec<i64>>,
    pub sources: Vec<RowSource>,
    /// Present for ring instances, whose matrices are pruned from whole subsamples.
    pub pruning: Option<PruneBookkeeping>,
}

/// Pool of one reduced matrix together with what is needed to map it back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPool {
    pub id: usize,
    pub sources: Vec<RowSource>,
    pub pruning: Option<PruneBookkeeping>,
    pub entries: Vec<PoolEntry>,
    pub stats: ReductionStats,
    /// Mean priority of the final basis rows that carry information.
    pub basis_mean_sigma: Option<f64>,
    pub pool_mean_sigma: Option<f64>,
    pub seconds: f64,
}

/// Output of the `reduce` stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolFile {
    pub instance: LweInstance,
    pub omega: i64,
    pub pool_capacity: usize,
    pub matrices: Vec<MatrixPool>,
}

/// Rows per reduced matrix: the configured value or the closed-form optimum at the
/// starting block size, capped by the rows available.
pub fn rows_per_matrix(inst: &LweInstance, cfg: &PipelineConfig) -> Result<usize> {
    let (n, k) = match inst.ring {
        Some(shape) => (shape.degree, shape.rank),
        None => (inst.n, 1),
    };
    let m = match cfg.rows_per_matrix {
        Some(m) => m,
        None => optimal_sample_count(
            n,
            k,
            inst.q.value() as f64,
            cfg.omega() as f64,
            cfg.reduction.block_start as f64,
        )
        .unwrap_or_else(|e| {
            warn!("no closed-form row count ({e}); using all {} rows", inst.m);
            inst.m
        }),
    };
    if m > inst.m {
        warn!("{m} rows per matrix requested but only {} are available", inst.m);
    }
    Ok(m.min(inst.m))
}

/// Selects the rows of `cfg.matrices` matrices. Plain instances use uniform subsets of
/// rows; ring instances concatenate offset subsamples of the circulant blocks and prune
/// the last one.
pub fn plan_matrices(inst: &LweInstance, cfg: &PipelineConfig) -> Result<Vec<PlannedMatrix>> {
    inst.validate()?;
    let m = rows_per_matrix(inst, cfg)?;
    match inst.ring {
        None => Ok((0..cfg.matrices)
            .map(|id| {
                let mut rng = seeded_rng(derive_seed(cfg.seed, streams::MATRIX, id as u64));
                let mut idx = index::sample(&mut rng, inst.m, m).into_vec();
                idx.sort_unstable();
                PlannedMatrix {
                    id,
                    rows: idx.iter().map(|&i| inst.a[i].clone()).collect(),
                    sources: idx.iter().map(|&row| RowSource { row, sign: 1 }).collect(),
                    pruning: None,
                }
            })
            .collect()),
        Some(shape) => {
            let n = shape.degree;
            let blocks = blocks_from_instance(inst)?;
            let (h, g) = (m / n, m % n);
            let sample_rows = (h + 1) * n;
            let uses = sample_rows.div_ceil(n + 1) * cfg.matrices;
            let stride = default_stride(n, uses.div_ceil(blocks.len()));
            let mut schedule = OffsetSchedule::new(
                n,
                stride,
                blocks.len(),
                derive_seed(cfg.seed, streams::OFFSETS, 0),
            );
            (0..cfg.matrices)
                .map(|id| {
                    let seed = derive_seed(cfg.seed, streams::MATRIX, id as u64);
                    let mut asm = assemble_matrix(&blocks, sample_rows, id, &mut schedule, seed)?;
                    asm.truncate(sample_rows);
                    let full = embedding_rows(&asm.rows, cfg.omega(), inst.q.value());
                    let (pruned, bk) = project_and_prune(&full, sample_rows, g, n)?;
                    asm.truncate(bk.active());
                    if pruned != embedding_rows(&asm.rows, cfg.omega(), inst.q.value()) {
                        return Err(Error::Param("pruned basis differs from the truncated embedding".into()));
                    }
                    Ok(PlannedMatrix { id, rows: asm.rows, sources: asm.sources, pruning: Some(bk) })
                })
                .collect()
        }
    }
}

pub fn priority_model(inst: &LweInstance, m: usize, omega: i64) -> PriorityModel {
    PriorityModel {
        m,
        omega,
        q: inst.q,
        secret: inst.secret_spec.clone(),
        error: inst.error_spec.clone(),
    }
}

/// Reduces one planned matrix and returns its short-vector pool.
pub fn reduce_planned(inst: &LweInstance, cfg: &PipelineConfig, plan: &PlannedMatrix) -> Result<MatrixPool> {
    let start = std::time::Instant::now();
    let omega = cfg.omega();
    let mut basis: EmbeddedBasis = embed(&plan.rows, omega, inst.q)?;
    let model = priority_model(inst, plan.rows.len(), omega);
    let mut pool = ShortVectorPool::new(cfg.pool_capacity);
    let stats = progressive_reduce(
        &mut basis.lattice,
        &cfg.reduction,
        &mut pool,
        &|row| model.offer_priority(row),
        plan.id,
    )?;
    if !basis.transform_consistent() {
        return Err(Error::Precision(format!("matrix {}: transform drifted from the basis", plan.id)));
    }
    let basis_sigmas: Vec<f64> = basis.lattice.rows().iter().filter_map(|r| model.offer_priority(r)).collect();
    let basis_mean_sigma =
        (!basis_sigmas.is_empty()).then(|| basis_sigmas.iter().sum::<f64>() / basis_sigmas.len() as f64);
    let seconds = start.elapsed().as_secs_f64();
    info!(
        "matrix {}: {} tours, final block {}, pool {} in {seconds:.1}s",
        plan.id,
        stats.tours,
        stats.final_block_size,
        pool.len()
    );
    Ok(MatrixPool {
        id: plan.id,
        sources: plan.sources.clone(),
        pruning: plan.pruning.clone(),
        entries: pool.entries(),
        stats,
        basis_mean_sigma,
        pool_mean_sigma: pool.mean_priority(),
        seconds,
    })
}

/// Maps a pool vector of a reduced matrix to a combination of the original rows.
pub fn combination_of(inst: &LweInstance, omega: i64, mp: &MatrixPool, vector: &[i64]) -> Result<Vec<i64>> {
    let m = mp.sources.len();
    let full = match &mp.pruning {
        Some(bk) => reinsert(&[vector.to_vec()], bk)?.remove(0),
        None => vector.to_vec(),
    };
    if full.len() < m {
        return Err(Error::LengthMismatch { expected: m, actual: full.len() });
    }
    let mut r = vec![0i64; inst.m];
    for (i, src) in mp.sources.iter().enumerate() {
        if full[i] % omega != 0 {
            return param(format!("pool vector of matrix {} is not in the embedding lattice", mp.id));
        }
        r[src.row] += src.sign * (full[i] / omega);
    }
    Ok(r)
}

/// Expands the pools of the given matrices into samples (not yet deduplicated).
pub fn amplify_pools(inst: &LweInstance, omega: i64, pools: &[MatrixPool]) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for mp in pools {
        for (k, entry) in mp.entries.iter().enumerate() {
            let r = combination_of(inst, omega, mp, &entry.vector)?;
            if r.iter().all(|&v| v == 0) {
                continue;
            }
            out.extend(samples_from_combination(inst, &r, mp.id, k)?);
        }
    }
    Ok(out)
}

/// Reduces matrices in parallel waves of `workers` and hands each finished matrix, in
/// index order, to `after`; stops early when `after` returns true.
pub fn reduce_matrices(
    inst: &LweInstance,
    cfg: &PipelineConfig,
    plans: &[PlannedMatrix],
    mut after: impl FnMut(&MatrixPool) -> Result<bool>,
) -> Result<(Vec<MatrixPool>, usize)> {
    use rayon::prelude::*;
    let workers = if cfg.workers == 0 { rayon::current_num_threads() } else { cfg.workers };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Param(format!("cannot start worker pool: {e}")))?;
    let mut done = Vec::new();
    let mut failed = 0;
    for wave in plans.chunks(workers.max(1)) {
        let results: Vec<Result<MatrixPool>> =
            pool.install(|| wave.par_iter().map(|p| reduce_planned(inst, cfg, p)).collect());
        for (plan, res) in wave.iter().zip(results) {
            match res {
                Ok(mp) => {
                    let stop = after(&mp)?;
                    done.push(mp);
                    if stop {
                        return Ok((done, failed));
                    }
                }
                Err(e) => {
                    warn!("reduction of matrix {} failed: {e}", plan.id);
                    failed += 1;
                }
            }
        }
    }
    if done.is_empty() {
        return Err(Error::AllReductionsFailed(failed));
    }
    Ok((done, failed))
}

/// Full preprocessing without interleaved recovery: plan, reduce and amplify.
pub fn preprocess(inst: &LweInstance, cfg: &PipelineConfig) -> Result<(PoolFile, Vec<Sample>)> {
    cfg.validate()?;
    let public = inst.public();
    let plans = plan_matrices(&public, cfg)?;
    let (matrices, _) = reduce_matrices(&public, cfg, &plans, |_| Ok(false))?;
    let samples = dedup_samples(amplify_pools(inst, cfg.omega(), &matrices)?);
    let file = PoolFile { instance: public, omega: cfg.omega(), pool_capacity: cfg.pool_capacity, matrices };
    Ok((file, samples))
}
