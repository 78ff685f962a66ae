use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use super::config::{InstanceKind, PipelineConfig};
use super::preprocess::{amplify_pools, plan_matrices, reduce_matrices, MatrixPool, PoolFile};
use super::samples::{dedup_samples, inlier_flags, rho_a, sort_by_sigma, Sample};
use super::train::{train_ladder, Attempt, TrainOutcome, VerificationSummary};
use crate::error::Result;
use crate::instances::{gen_lwe, gen_mlwe, mlwe_to_lwe, ErrorSpec, LweInstance, SecretSpec};
use crate::nomod_approx::expected_inliers;
use crate::reduction::ReductionStats;

/// Generates the instance described by `cfg.instance` from the instance seed.
pub fn generate_instance(cfg: &PipelineConfig) -> Result<LweInstance> {
    cfg.validate()?;
    let p = &cfg.instance;
    let secret = p.secret.clone().with_dim(p.dim());
    let seed = cfg.instance_seed();
    match p.kind {
        InstanceKind::Lwe => gen_lwe(p.n, p.sample_rows(), p.q, &secret, &p.error, seed),
        InstanceKind::Ring => {
            let ml = gen_mlwe(p.n, p.rank, p.sample_rows() / p.n, p.q, &secret, &p.error, seed)?;
            mlwe_to_lwe(&ml)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub generate_s: f64,
    pub preprocess_s: f64,
    pub train_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub id: usize,
    pub rows: usize,
    pub pool_size: usize,
    pub stats: ReductionStats,
    pub pool_mean_sigma: Option<f64>,
    pub basis_mean_sigma: Option<f64>,
    pub seconds: f64,
}

impl From<&MatrixPool> for MatrixSummary {
    fn from(mp: &MatrixPool) -> Self {
        Self {
            id: mp.id,
            rows: mp.sources.len(),
            pool_size: mp.entries.len(),
            stats: mp.stats.clone(),
            pool_mean_sigma: mp.pool_mean_sigma,
            basis_mean_sigma: mp.basis_mean_sigma,
            seconds: mp.seconds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub kind: InstanceKind,
    pub n: usize,
    pub m: usize,
    pub q: i64,
    pub secret: SecretSpec,
    pub error: ErrorSpec,
    pub omega: i64,
    /// Secret accepted by verification.
    pub recovered: Option<Vec<i64>>,
    /// Whether the accepted secret equals the planted one (when known).
    pub matches_truth: Option<bool>,
    pub best_verification: Option<VerificationSummary>,
    pub matrices_reduced: usize,
    pub matrices_failed: usize,
    pub samples_total: usize,
    /// Ratio of the entry spread of the sample vectors to that of `A`.
    pub rho_a: f64,
    /// Mean predicted probability that a sample needs no modular shift.
    pub predicted_inlier_rate: f64,
    /// Observed fraction of samples without a shift (needs the planted truth).
    pub empirical_inlier_rate: Option<f64>,
    pub matrices: Vec<MatrixSummary>,
    pub attempts: Vec<Attempt>,
    pub timings: Timings,
}

impl RunReport {
    /// Everything except wall-clock measurements, for reproducibility checks.
    pub fn deterministic_part(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
            if let Some(serde_json::Value::Array(ms)) = obj.get_mut("matrices") {
                for m in ms {
                    if let Some(o) = m.as_object_mut() {
                        o.remove("seconds");
                    }
                }
            }
        }
        v
    }
}

/// Everything a run produced, including the stores behind the report.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub instance: LweInstance,
    pub pools: PoolFile,
    /// Deduplicated samples ordered by increasing sigma.
    pub samples: Vec<Sample>,
    pub report: RunReport,
}

/// Reduces, amplifies and trains on an existing instance. The planted truth, if any, is
/// only used for the report.
pub fn attack_instance(inst: &LweInstance, cfg: &PipelineConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let t_total = Instant::now();
    let public = inst.public();
    let omega = cfg.omega();
    let plans = plan_matrices(&public, cfg)?;
    let mut outcome = TrainOutcome::default();
    let mut raw: Vec<Sample> = Vec::new();
    let mut train_s = 0.0;
    let t_pre = Instant::now();
    let (matrices, failed) = reduce_matrices(&public, cfg, &plans, |mp| {
        raw.extend(amplify_pools(&public, omega, std::slice::from_ref(mp))?);
        if !cfg.interleaved {
            return Ok(false);
        }
        let t = Instant::now();
        let mut store = dedup_samples(raw.clone());
        sort_by_sigma(&mut store);
        let done = train_ladder(&public, &store, cfg, mp.id + 1, &mut outcome)?;
        train_s += t.elapsed().as_secs_f64();
        Ok(done)
    })?;
    let mut samples = dedup_samples(raw);
    sort_by_sigma(&mut samples);
    let mut preprocess_s = t_pre.elapsed().as_secs_f64() - train_s;
    if !cfg.interleaved {
        let t = Instant::now();
        train_ladder(&public, &samples, cfg, matrices.len(), &mut outcome)?;
        train_s = t.elapsed().as_secs_f64();
    } else {
        preprocess_s = preprocess_s.max(0.0);
    }
    let q = inst.q.value() as f64;
    let sigmas: Vec<f64> = samples.iter().map(|s| s.sigma).collect();
    let predicted_inlier_rate =
        if samples.is_empty() { 0.0 } else { expected_inliers(&sigmas, q) / samples.len() as f64 };
    let empirical_inlier_rate = inst.truth.as_ref().filter(|_| !samples.is_empty()).map(|t| {
        let flags = inlier_flags(&samples, &t.s, &t.e, inst.q);
        flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64
    });
    let matches_truth = match (&outcome.secret, &inst.truth) {
        (Some(s), Some(t)) => Some(*s == t.s),
        (None, Some(_)) => Some(false),
        _ => None,
    };
    info!(
        "{} samples from {} matrices; recovered: {}",
        samples.len(),
        matrices.len(),
        outcome.secret.is_some()
    );
    let report = RunReport {
        seed: cfg.seed,
        kind: cfg.instance.kind,
        n: inst.n,
        m: inst.m,
        q: inst.q.value(),
        secret: inst.secret_spec.clone(),
        error: inst.error_spec.clone(),
        omega,
        recovered: outcome.secret.clone(),
        matches_truth,
        best_verification: outcome.best_verification.clone(),
        matrices_reduced: matrices.len(),
        matrices_failed: failed,
        samples_total: samples.len(),
        rho_a: rho_a(&samples, &inst.a),
        predicted_inlier_rate,
        empirical_inlier_rate,
        matrices: matrices.iter().map(MatrixSummary::from).collect(),
        attempts: outcome.attempts,
        timings: Timings { generate_s: 0.0, preprocess_s, train_s, total_s: t_total.elapsed().as_secs_f64() },
    };
    let pools = PoolFile { instance: public, omega, pool_capacity: cfg.pool_capacity, matrices };
    Ok(RunArtifacts { instance: inst.clone(), pools, samples, report })
}

/// Generates an instance from the configuration and attacks it.
pub fn run_full(cfg: &PipelineConfig) -> Result<RunArtifacts> {
    let t = Instant::now();
    let inst = generate_instance(cfg)?;
    let generate_s = t.elapsed().as_secs_f64();
    let mut art = attack_instance(&inst, cfg)?;
    art.report.timings.generate_s = generate_s;
    art.report.timings.total_s += generate_s;
    Ok(art)
}
