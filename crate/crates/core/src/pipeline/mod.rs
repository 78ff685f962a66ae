//! End-to-end attack: instance generation, reduction fan-out, amplification and
//! recovery.

mod config;
mod estimate;
mod preprocess;
mod run;
mod samples;
mod train;

pub use config::{EstimatorConfig, EstimatorKind, InstanceKind, InstanceParams, PipelineConfig};
pub use estimate::{estimate_store, RungEstimate, StoreEstimate};
pub use preprocess::{
    amplify_pools, combination_of, plan_matrices, preprocess, priority_model, reduce_matrices,
    reduce_planned, rows_per_matrix, MatrixPool, PlannedMatrix, PoolFile,
};
pub use run::{attack_instance, generate_instance, run_full, MatrixSummary, RunArtifacts, RunReport, Timings};
pub use samples::{
    dedup_samples, inlier_flags, read_samples_csv, rho_a, sort_by_sigma, write_samples_csv, Sample,
};
pub use train::{
    fit_estimator, fit_secret, ladder_sizes, regression_targets, train_ladder, Attempt, SecretCandidate, TrainOutcome,
    VerificationSummary,
};
