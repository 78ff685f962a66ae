use nomod::instances::{ErrorSpec, SecretFamily};
use nomod::pipeline::*;
use nomod::reduction::ReductionConfig;
use proptest::prelude::*;

fn small(seed: u64) -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.instance.n = 12;
    cfg.instance.q = 127;
    cfg.instance.secret = SecretFamily::binary();
    cfg.instance.error = ErrorSpec::Gaussian { sigma: 1.0 };
    cfg.reduction = ReductionConfig { block_start: 8, block_cap: 10, tour_budget: 4, ..Default::default() };
    cfg.matrices = 3;
    cfg.pool_capacity = 40;
    cfg.seed = seed;
    cfg
}

#[test]
fn runs_are_reproducible() {
    let cfg = small(4);
    let a = run_full(&cfg).unwrap();
    let b = run_full(&cfg).unwrap();
    assert_eq!(a.report.deterministic_part(), b.report.deterministic_part());
    assert_eq!(a.samples, b.samples);
    let mut other = cfg.clone();
    other.seed = 5;
    assert_ne!(run_full(&other).unwrap().samples, a.samples);
}

#[test]
fn worker_count_does_not_change_results() {
    let mut cfg = small(6);
    cfg.workers = 1;
    let one = run_full(&cfg).unwrap();
    cfg.workers = 3;
    let three = run_full(&cfg).unwrap();
    assert_eq!(one.report.deterministic_part(), three.report.deterministic_part());
}

#[test]
fn recovered_secrets_verify() {
    for seed in 0..3 {
        let cfg = small(seed);
        let art = run_full(&cfg).unwrap();
        let r = &art.report;
        assert!(r.samples_total <= cfg.matrices * cfg.pool_capacity);
        assert_eq!(r.matrices_reduced + r.matrices_failed, r.matrices.len() + r.matrices_failed);
        assert!(r.rho_a.is_finite());
        if let Some(s) = &r.recovered {
            let v = nomod::estimators::verify_secret(&art.instance, s, &art.instance.error_spec, cfg.verify_tau);
            assert!(v.accept);
            assert_eq!(r.matches_truth, Some(s == &art.instance.truth.as_ref().unwrap().s));
        }
        assert!(art.samples.windows(2).all(|w| w[0].sigma <= w[1].sigma));
    }
}

#[test]
fn samples_round_trip_through_csv() {
    let art = run_full(&small(2)).unwrap();
    let path = std::env::temp_dir().join(format!("nomod-samples-{}.csv", std::process::id()));
    write_samples_csv(&path, &art.samples).unwrap();
    let back = read_samples_csv(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back.len(), art.samples.len());
    for (a, b) in back.iter().zip(&art.samples) {
        assert_eq!((a.sample_id, &a.x, a.target, a.r_norm_sq), (b.sample_id, &b.x, b.target, b.r_norm_sq));
    }
}

#[test]
fn config_overrides_reach_every_field() {
    let cfg = PipelineConfig::default()
        .with_override("instance.n=20").unwrap()
        .with_override("reduction.block_cap=30").unwrap()
        .with_override("estimator.kind=\"huber\"").unwrap()
        .with_override("instance.secret={\"family\":\"ternary_fixed_hw\",\"h\":4}").unwrap();
    assert_eq!(cfg.instance.n, 20);
    assert_eq!(cfg.reduction.block_cap, 30);
    assert_eq!(cfg.estimator.kind, EstimatorKind::Huber);
    assert_eq!(cfg.instance.secret, SecretFamily::TernaryFixedHw { h: 4 });
    assert!(PipelineConfig::default().with_override("no_such_field=1").is_err());
}

proptest! {
    #[test]
    fn ladder_is_nested_and_bounded(total in 0usize..5000, n in 1usize..64, tf in 0.1f64..1.0) {
        let sizes = ladder_sizes(total, n, &[0.05, 0.1, 0.25, 0.5], tf);
        prop_assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        let cap = (tf * total as f64).floor() as usize;
        if total == 0 {
            prop_assert!(sizes.is_empty());
        } else if cap < 2 * n {
            // too few samples for a ladder: train on everything
            prop_assert_eq!(sizes, vec![total]);
        } else {
            prop_assert_eq!(*sizes.last().unwrap(), cap);
            prop_assert!(sizes.iter().all(|&s| 2 * n <= s && s <= cap));
        }
    }
}
