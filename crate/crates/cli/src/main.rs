use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use nomod::estimators::verify_secret;
use nomod::instances::{ErrorSpec, LweInstance, SecretFamily};
use nomod::pipeline::{
    amplify_pools, attack_instance, dedup_samples, estimate_store, fit_secret, generate_instance,
    plan_matrices, read_samples_csv, reduce_matrices, run_full, sort_by_sigma, train_ladder,
    write_samples_csv, EstimatorKind, InstanceKind, PipelineConfig, PoolFile, SecretCandidate,
    TrainOutcome, VerificationSummary,
};
use nomod::reduction::{bkz_cost, optimal_sample_count};

#[derive(Parser)]
#[command(name = "nomod", version, about = "Module-LWE secret recovery workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance with a planted secret.
    Gen {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
        /// Drop the planted secret and error from the output.
        #[arg(long)]
        public: bool,
    },
    /// Reduce sample matrices of an instance and store their short-vector pools.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn stored pools into samples (with ring rotations where applicable).
    Amplify {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict per-sample spread and inlier rates of a sample store.
    Estimate {
        #[arg(long)]
        samples: PathBuf,
        /// Instance supplying q and the secret and error families.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long)]
        secret_spec: Option<SecretFamily>,
        #[arg(long)]
        error_spec: Option<ErrorSpec>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the secret on the lowest-spread samples.
    Train {
        #[arg(long)]
        samples: PathBuf,
        /// With an instance the subset ladder is walked until verification accepts.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long)]
        secret_spec: Option<SecretFamily>,
        #[arg(long)]
        error_spec: Option<ErrorSpec>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a candidate secret against an instance; exits with 1 on rejection.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long, default_value_t = nomod::estimators::DEFAULT_TAU)]
        tau: f64,
    },
    /// Full pipeline: generate, reduce, amplify, train and report.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Attack this instance instead of generating one.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[arg(long)]
        pool_out: Option<PathBuf>,
    },
    /// Optimal sample count and BKZ cost estimates.
    Cost {
        #[arg(long)]
        beta: f64,
        /// Lattice dimension; defaults to m + n k with the optimal m.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        log_volume: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        omega: f64,
    },
}

/// Configuration file plus per-field overrides; `--set` is applied last.
#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON file with a full or partial pipeline config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for matrix selection, offsets and RANSAC.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of the generated instance (defaults to a stream of --seed).
    #[arg(long)]
    instance_seed: Option<u64>,
    /// lwe or ring (rlwe and mlwe are accepted as aliases).
    #[arg(long, value_parser = parse_kind)]
    kind: Option<InstanceKind>,
    /// Ring degree, or the secret dimension for plain LWE.
    #[arg(long)]
    n: Option<usize>,
    /// Module rank k (ring instances).
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    modulus: Option<i64>,
    /// Number of base LWE rows (default 4 n k).
    #[arg(long)]
    sample_rows: Option<usize>,
    /// binary[:p], binary-hw:h, ternary, ternary-hw:h, cbd:eta or cbd-hw:eta:h.
    #[arg(long)]
    secret: Option<SecretFamily>,
    /// gaussian:sigma or cbd:eta.
    #[arg(long)]
    error: Option<ErrorSpec>,
    /// Embedding penalty (default 4 for CBD errors, 10 for Gaussian).
    #[arg(long)]
    omega: Option<i64>,
    /// Number of reduced matrices.
    #[arg(long)]
    matrices: Option<usize>,
    /// Short vectors kept per matrix.
    #[arg(long)]
    pool_capacity: Option<usize>,
    /// Sample rows per matrix (default: closed-form optimum at the first block size).
    #[arg(long)]
    rows_per_matrix: Option<usize>,
    #[arg(long)]
    block_start: Option<usize>,
    #[arg(long)]
    block_cap: Option<usize>,
    /// Total BKZ tours per matrix.
    #[arg(long)]
    tour_budget: Option<usize>,
    /// Largest share of the sample store used for training.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// ols, huber, tukey or ransac.
    #[arg(long)]
    estimator: Option<EstimatorKind>,
    /// Verification threshold as a multiple of the error deviation.
    #[arg(long)]
    tau: Option<f64>,
    /// Candidate window half-width in standard deviations.
    #[arg(long)]
    window: Option<f64>,
    /// Matrices reduced in parallel (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Reduce every matrix before training instead of training after each one.
    #[arg(long)]
    no_interleave: bool,
    /// `dotted.field=value` override of any config field (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn parse_kind(s: &str) -> std::result::Result<InstanceKind, String> {
    match s {
        "lwe" => Ok(InstanceKind::Lwe),
        "ring" | "rlwe" | "mlwe" => Ok(InstanceKind::Ring),
        _ => Err(format!("unknown instance kind {s:?} (lwe|ring)")),
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($field:expr, $flag:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(c.seed, self.seed);
        set!(c.instance.kind, self.kind);
        set!(c.instance.n, self.n);
        set!(c.instance.rank, self.rank);
        set!(c.instance.q, self.modulus);
        set!(c.instance.secret, self.secret);
        set!(c.instance.error, self.error);
        set!(c.matrices, self.matrices);
        set!(c.pool_capacity, self.pool_capacity);
        set!(c.reduction.block_start, self.block_start);
        set!(c.reduction.block_cap, self.block_cap);
        set!(c.reduction.tour_budget, self.tour_budget);
        set!(c.train_fraction, self.train_fraction);
        set!(c.estimator.kind, self.estimator);
        set!(c.verify_tau, self.tau);
        set!(c.candidate_window, self.window);
        set!(c.workers, self.workers);
        if self.instance_seed.is_some() {
            c.instance_seed = self.instance_seed;
        }
        if self.sample_rows.is_some() {
            c.instance.samples = self.sample_rows;
        }
        if self.omega.is_some() {
            c.omega = self.omega;
        }
        if self.rows_per_matrix.is_some() {
            c.rows_per_matrix = self.rows_per_matrix;
        }
        if self.no_interleave {
            c.interleaved = false;
        }
        for s in &self.sets {
            c = c.with_override(s)?;
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout(), "{text}") {
        // a closed pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

/// Modulus and families from an instance file, overridden by explicit flags.
fn sample_context(
    instance: &Option<PathBuf>,
    q: Option<i64>,
    secret: Option<SecretFamily>,
    error: Option<ErrorSpec>,
) -> Result<(Option<LweInstance>, i64, SecretFamily, ErrorSpec)> {
    let inst = instance.as_deref().map(LweInstance::load).transpose()?;
    let q = q.or(inst.as_ref().map(|i| i.q.value()));
    let secret = secret.or(inst.as_ref().map(|i| i.secret_spec.family.clone()));
    let error = error.or(inst.as_ref().map(|i| i.error_spec.clone()));
    match (q, secret, error) {
        (Some(q), Some(s), Some(e)) => Ok((inst, q, s, e)),
        _ => bail!("need --instance or all of --q, --secret-spec and --error-spec"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { cfg, out, public } => {
            let cfg = cfg.resolve()?;
            let inst = generate_instance(&cfg)?;
            let inst = if public { inst.public() } else { inst };
            inst.save(&out)?;
            info!("wrote {} x {} instance to {}", inst.m, inst.n, out.display());
        }
        Command::Reduce { instance, cfg, out } => {
            let cfg = cfg.resolve()?;
            let inst = LweInstance::load(&instance)?.public();
            let plans = plan_matrices(&inst, &cfg)?;
            let (matrices, failed) = reduce_matrices(&inst, &cfg, &plans, |_| Ok(false))?;
            if failed > 0 {
                log::warn!("{failed} matrices failed to reduce");
            }
            let file = PoolFile { instance: inst, omega: cfg.omega(), pool_capacity: cfg.pool_capacity, matrices };
            write_json(&out, &file)?;
        }
        Command::Amplify { pool, out } => {
            let file: PoolFile = read_json(&pool)?;
            let samples = dedup_samples(amplify_pools(&file.instance, file.omega, &file.matrices)?);
            write_samples_csv(&out, &samples)?;
            info!("wrote {} samples to {}", samples.len(), out.display());
        }
        Command::Estimate { samples, instance, q, secret_spec, error_spec, out } => {
            let (_, q, secret, error) = sample_context(&instance, q, secret_spec, error_spec)?;
            let defaults = PipelineConfig::default();
            let est = estimate_store(
                &read_samples_csv(&samples)?,
                q,
                &secret,
                &error,
                &defaults.ladder,
                defaults.train_fraction,
            )?;
            match out {
                Some(p) => write_json(&p, &est)?,
                None => print_json(&est)?,
            }
        }
        Command::Train { samples, instance, q, secret_spec, error_spec, cfg, out } => {
            let cfg = cfg.resolve()?;
            let (inst, q, secret, error) = sample_context(&instance, q, secret_spec, error_spec)?;
            let mut store = read_samples_csv(&samples)?;
            sort_by_sigma(&mut store);
            let Some(first) = store.first() else { bail!("no samples in {}", samples.display()) };
            let spec = secret.with_dim(first.x.len());
            let candidate = match inst {
                Some(inst) => {
                    let mut outcome = TrainOutcome::default();
                    train_ladder(&inst.public(), &store, &cfg, 0, &mut outcome)?;
                    let last = outcome.attempts.iter().find(|a| a.verification.accept).or(outcome.attempts.last());
                    SecretCandidate {
                        secret: outcome.secret.or(outcome.best).unwrap_or_default(),
                        estimator: cfg.estimator.kind,
                        subset_size: last.map_or(0, |a| a.subset_size),
                        coefficients: Vec::new(),
                        converged: last.is_some_and(|a| a.converged),
                        fallback: last.is_some_and(|a| a.fallback),
                        verification: outcome.best_verification,
                    }
                }
                None => {
                    let size = ((cfg.train_fraction * store.len() as f64).floor() as usize).max(1);
                    let (s, fit) =
                        fit_secret(&store[..size], q, &spec, &error, &cfg.estimator, cfg.candidate_window, cfg.seed)?;
                    SecretCandidate {
                        secret: s,
                        estimator: cfg.estimator.kind,
                        subset_size: size,
                        coefficients: fit.coefficients_f64(),
                        converged: fit.converged,
                        fallback: fit.fallback,
                        verification: None,
                    }
                }
            };
            write_json(&out, &candidate)?;
        }
        Command::Verify { instance, candidate, tau } => {
            let inst = LweInstance::load(&instance)?;
            let cand: SecretCandidate = read_json(&candidate)?;
            let report = verify_secret(&inst, &cand.secret, &inst.error_spec, tau);
            print_json(&VerificationSummary::from(&report))?;
            if !report.accept {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Run { cfg, instance, report, samples_out, pool_out } => {
            if cfg.seed.is_none() {
                bail!("--seed is required for run");
            }
            let cfg = cfg.resolve()?;
            let art = match instance {
                Some(p) => attack_instance(&LweInstance::load(&p)?, &cfg)?,
                None => run_full(&cfg)?,
            };
            if let Some(p) = samples_out {
                write_samples_csv(&p, &art.samples)?;
            }
            if let Some(p) = pool_out {
                write_json(&p, &art.pools)?;
            }
            match report {
                Some(p) => write_json(&p, &art.report)?,
                None => print_json(&art.report)?,
            }
            if art.report.recovered.is_none() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Cost { beta, dim, log_volume, n, k, q, omega } => {
            let optimal_m = match (n, q) {
                (Some(n), Some(q)) => Some(optimal_sample_count(n, k, q, omega, beta)?),
                _ => None,
            };
            let dim = match (dim, optimal_m, n) {
                (Some(d), _, _) => d,
                (None, Some(m), Some(n)) => m + n * k,
                _ => bail!("need --dim or both --n and --q"),
            };
            let log_volume = log_volume.or(match (optimal_m, n, q) {
                (Some(m), Some(n), Some(q)) => Some(m as f64 * omega.ln() + (n * k) as f64 * q.ln()),
                _ => None,
            });
            let cost = bkz_cost(beta, dim, log_volume)?;
            print_json(&serde_json::json!({ "optimal_m": optimal_m, "cost": cost }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
