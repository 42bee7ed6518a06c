use statrs::distribution::{ContinuousCDF, Normal};
use superteach::harness::{
    check_bracket, margin_tail_exact, margin_tail_mc, run_trials, summarize, Axis, BracketMode, ExperimentConfig, Sweep,
};
use superteach::{Seed, TaskSpec, TeacherParams};

fn bk(k: usize) -> TeacherParams {
    TeacherParams {
        k: Some(k),
        ..TeacherParams::default()
    }
}

#[test]
fn identity_teacher_has_unit_ratio() {
    let config = ExperimentConfig::new(TaskSpec::gauss1d(0.0), "identity", vec![5, 20], 10, Seed(1));
    let records = run_trials(&config).unwrap();
    assert_eq!(records.len(), 20);
    assert!(records
        .iter()
        .all(|r| r.ratio == Some(1.0) && r.subset_fraction() == Some(1.0)));
}

#[test]
fn single_item_teacher_fraction() {
    let mut config = ExperimentConfig::new(TaskSpec::gauss1d(0.0), "bk", vec![8, 40], 10, Seed(2));
    config.teacher_params = bk(1);
    let records = run_trials(&config).unwrap();
    for r in &records {
        assert_eq!(r.subset_fraction(), Some(1.0 / r.n as f64));
        assert!(r.error.is_none());
    }
    let keys: Vec<(usize, usize)> = records.iter().map(|r| (r.n, r.trial)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn reruns_reproduce_records() {
    let mut config = ExperimentConfig::new(TaskSpec::linreg(2), "search", vec![6, 9], 4, Seed(3));
    config.teacher_params.strategy = "local-swap".into();
    let a = run_trials(&config).unwrap();
    config.jobs = Some(1);
    let b = run_trials(&config).unwrap();
    config.jobs = Some(3);
    let c = run_trials(&config).unwrap();
    for ((x, y), z) in a.iter().zip(&b).zip(&c) {
        assert!(x.same_outcome(y) && x.same_outcome(z));
    }
}

#[test]
fn per_trial_errors_are_recorded() {
    // exhaustive search over 30 items exceeds the cap in every trial
    let mut config = ExperimentConfig::new(TaskSpec::linreg(2), "search", vec![30], 2, Seed(4));
    config.teacher_params.strategy = "exhaustive".into();
    let records = run_trials(&config).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.error.is_some() && r.ratio.is_none()));
    let rows = summarize(&records, Axis::N);
    assert_eq!(rows[0].failures, 2);
    assert_eq!(rows[0].median_ratio, None);
}

#[test]
fn dimension_sweep_uses_each_dimension() {
    let mut config = ExperimentConfig::new(TaskSpec::halfspace(2), "search", vec![], 2, Seed(5));
    config.sweep = Sweep::D { n: 8, ds: vec![2, 3] };
    config.teacher_params.strategy = "greedy".into();
    let records = run_trials(&config).unwrap();
    let ds: Vec<usize> = records.iter().map(|r| r.d).collect();
    assert_eq!(ds, vec![2, 2, 3, 3]);
    assert_eq!(summarize(&records, Axis::D).len(), 2);
    assert_ne!(records[0].seed, records[2].seed);
}

#[test]
fn super_teaching_probability_grows() {
    for (task, teacher, params) in [
        (TaskSpec::gauss1d(0.0), "bk", bk(1)),
        (TaskSpec::margin1d(), "bms", TeacherParams::default()),
    ] {
        let mut config = ExperimentConfig::new(task, teacher, vec![4, 64, 1024], 200, Seed(6));
        config.teacher_params = params;
        let records = run_trials(&config).unwrap();
        let freq = |n: usize| {
            let group: Vec<_> = records.iter().filter(|r| r.n == n).collect();
            group
                .iter()
                .filter(|r| r.risk_subset.unwrap() <= r.risk_full.unwrap())
                .count() as f64
                / group.len() as f64
        };
        assert!(freq(1024) >= freq(4), "{teacher}");
        assert!(freq(1024) >= 0.95, "{teacher}: {}", freq(1024));
    }
}

#[test]
fn tail_monte_carlo_examples() {
    let est = margin_tail_mc(2, 0.5, 1_000_000, Seed(7)).unwrap();
    assert!((est.estimate - 0.5).abs() <= 3.0 * est.std_err);
    let est = margin_tail_mc(3, 0.7, 1_000_000, Seed(8)).unwrap();
    assert!((est.estimate - margin_tail_exact(3, 0.7).unwrap()).abs() <= 3.0 * est.std_err);
    assert!(margin_tail_mc(3, 0.7, 0, Seed(8)).is_err());
}

#[test]
fn full_sample_bracket_matches_normal_law() {
    let (n, eps, trials) = (10_000usize, 0.25, 500usize);
    let coverage = check_bracket(BracketMode::FullSample, n, eps, trials, Seed(9)).unwrap();
    // the sample mean is N(0, 1/n), so the bracket holds iff n^-eps < |Z| < n^eps
    let z = Normal::new(0.0, 1.0).unwrap();
    let nf = n as f64;
    let exact = 2.0 * (z.cdf(nf.powf(eps)) - z.cdf(nf.powf(-eps)));
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((coverage - exact).abs() <= 4.0 * se, "coverage {coverage} vs {exact}");
    let union_bound = 1.0 - 2.0 * (2.0 / std::f64::consts::PI).sqrt() * nf.powf(-eps);
    assert!(coverage >= union_bound);
}

#[test]
fn best_single_item_bracket_coverage() {
    let coverage = check_bracket(BracketMode::OptimalK { k: 1 }, 10_000, 0.5, 500, Seed(10)).unwrap();
    assert!(coverage >= 0.9, "coverage {coverage}");
}
