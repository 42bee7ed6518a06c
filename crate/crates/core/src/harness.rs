//! Monte Carlo experiment driver: repeated trials, medians, rate fits and
//! tail checks.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::datagen::{margin_label, sample_gauss1d, trial_seed, Seed};
use crate::error::{Error, Result};
use crate::learners::{large_margin_from_extremes, GaussMeanMle, Learner, LearnerKind};
use crate::risk::RiskFn;
use crate::search::DEFAULT_EVAL_BUDGET;
use crate::task::{TaskKind, TaskSpec};
use crate::teachers::{teach_optimal_k_subset, teachers, TeacherParams};
use crate::types::Hypothesis;

/// Which axis an experiment sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Sample sizes at the task's own dimension.
    N(Vec<usize>),
    /// Dimensions at a fixed sample size; vector tasks only.
    D { n: usize, ds: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: TaskSpec,
    /// `None` uses the task's default learner.
    pub learner: Option<LearnerKind>,
    pub teacher: String,
    pub teacher_params: TeacherParams,
    pub sweep: Sweep,
    pub trials: usize,
    pub master_seed: Seed,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(task: TaskSpec, teacher: &str, n_list: Vec<usize>, trials: usize, master_seed: Seed) -> Self {
        ExperimentConfig {
            task,
            learner: None,
            teacher: teacher.to_string(),
            teacher_params: TeacherParams::default(),
            sweep: Sweep::N(n_list),
            trials,
            master_seed,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        let axis = match &self.sweep {
            Sweep::N(ns) => ns,
            Sweep::D { n, ds } => {
                if *n == 0 {
                    return Err(Error::invalid("sample size n must be at least 1"));
                }
                if !matches!(self.task.task, TaskKind::Halfspace | TaskKind::LinReg) {
                    return Err(Error::invalid(format!("task {} has a fixed dimension", self.task.task)));
                }
                ds
            }
        };
        if axis.is_empty() {
            return Err(Error::invalid("sweep list must be nonempty"));
        }
        if axis[0] == 0 || axis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep list must be positive and strictly increasing"));
        }
        self.task.validate()?;
        teachers().build(&self.teacher, &self.teacher_params)?;
        Ok(())
    }

    fn points(&self) -> Vec<(usize, usize)> {
        match &self.sweep {
            Sweep::N(ns) => ns.iter().map(|&n| (n, self.task.d)).collect(),
            Sweep::D { n, ds } => ds.iter().map(|&d| (*n, d)).collect(),
        }
    }

    fn task_at(&self, d: usize) -> TaskSpec {
        if d == self.task.d {
            return self.task.clone();
        }
        let mut spec = TaskSpec::default_for(self.task.task, d);
        spec.lambda = self.task.lambda;
        spec.noise_var = self.task.noise_var;
        spec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub task: String,
    pub teacher: String,
    pub n: usize,
    pub d: usize,
    pub trial: usize,
    pub seed: u64,
    pub risk_full: Option<f64>,
    pub risk_subset: Option<f64>,
    /// Missing when the full-sample risk is zero or the trial failed.
    pub ratio: Option<f64>,
    pub subset_size: Option<usize>,
    pub wall_time: Duration,
    pub kkt_residual_norm: Option<f64>,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn subset_fraction(&self) -> Option<f64> {
        self.subset_size.map(|k| k as f64 / self.n as f64)
    }

    /// Everything except the wall-clock time, for reproducibility checks.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        TrialRecord {
            wall_time: Duration::ZERO,
            ..self.clone()
        } == TrialRecord {
            wall_time: Duration::ZERO,
            ..other.clone()
        }
    }
}

fn run_one(config: &ExperimentConfig, n: usize, d: usize, trial: usize) -> TrialRecord {
    let mut seed = trial_seed(config.master_seed, n as u64, trial as u64);
    if matches!(config.sweep, Sweep::D { .. }) {
        seed = seed.derive(d as u64);
    }
    let mut record = TrialRecord {
        task: config.task.task.name().to_string(),
        teacher: config.teacher.clone(),
        n,
        d,
        trial,
        seed: seed.0,
        risk_full: None,
        risk_subset: None,
        ratio: None,
        subset_size: None,
        wall_time: Duration::ZERO,
        kkt_residual_norm: None,
        error: None,
    };
    let started = Instant::now();
    let outcome = (|| {
        let spec = config.task_at(d);
        let learner = config.learner.unwrap_or_else(|| spec.default_learner()).build()?;
        let teacher = teachers().build(&config.teacher, &config.teacher_params)?;
        let set = spec.sample(n, seed)?;
        teacher.teach(&set, learner.as_ref(), &spec.risk(), seed.derive(1))
    })();
    record.wall_time = started.elapsed();
    match outcome {
        Ok(r) => {
            record.risk_full = Some(r.risk_full);
            record.risk_subset = Some(r.risk_subset);
            record.ratio = r.ratio;
            record.subset_size = Some(r.subset_size());
            record.kkt_residual_norm = Some(r.kkt_residual_norm);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs `trials` independent trials at every sweep point. Output order is
/// `(n, d, trial)` regardless of how the work was scheduled; per-trial
/// failures are recorded, not propagated.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let jobs: Vec<(usize, usize, usize)> = config
        .points()
        .into_iter()
        .flat_map(|(n, d)| (0..config.trials).map(move |t| (n, d, t)))
        .collect();
    let work = || -> Vec<TrialRecord> { jobs.par_iter().map(|&(n, d, t)| run_one(config, n, d, t)).collect() };
    let mut records = match config.jobs {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(work),
        None => work(),
    };
    records.sort_by_key(|r| (r.n, r.d, r.trial));
    Ok(records)
}

/// Lower median: for an even count, the smaller of the two middle values.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// `n` for sample-size sweeps, `d` for dimension sweeps.
    pub key: usize,
    pub trials: usize,
    pub failures: usize,
    pub median_ratio: Option<f64>,
    pub median_subset_fraction: Option<f64>,
    pub median_time_s: f64,
    pub median_risk_full: Option<f64>,
    pub median_risk_subset: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    D,
}

/// Per-key lower medians. Missing values (failed trials, undefined ratios)
/// are left out of the corresponding median.
pub fn summarize(records: &[TrialRecord], axis: Axis) -> Vec<SummaryRow> {
    let key = |r: &TrialRecord| match axis {
        Axis::N => r.n,
        Axis::D => r.d,
    };
    let mut keys: Vec<usize> = records.iter().map(key).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|k| {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| key(r) == k).collect();
            let col =
                |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Vec<f64> { group.iter().filter_map(|r| f(r)).collect() };
            SummaryRow {
                key: k,
                trials: group.len(),
                failures: group.iter().filter(|r| r.error.is_some()).count(),
                median_ratio: lower_median(&col(&|r| r.ratio)),
                median_subset_fraction: lower_median(&col(&|r| r.subset_fraction())),
                median_time_s: lower_median(&col(&|r| Some(r.wall_time.as_secs_f64()))).unwrap_or(0.0),
                median_risk_full: lower_median(&col(&|r| r.risk_full)),
                median_risk_subset: lower_median(&col(&|r| r.risk_subset)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln n, ln value)`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, v)) = points
        .iter()
        .find(|&&(n, v)| !(n > 0.0 && v > 0.0 && n.is_finite() && v.is_finite()))
    {
        return Err(Error::invalid(format!(
            "rate fit needs positive finite values, got ({n}, {v})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rate fit needs at least two distinct n"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

fn check_tail_args(n: usize, eps: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("sample size n must be at least 1"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

/// `P{R(θ̂_S) > ε}` for the large-margin learner on `n` uniform points.
pub fn margin_tail_exact(n: usize, eps: f64) -> Result<f64> {
    check_tail_args(n, eps)?;
    let n = n as i32;
    Ok(if eps <= 0.5 {
        (1.0 - eps).powi(n) + eps.powi(n)
    } else if eps < 1.0 {
        0.5f64.powi(n - 1)
    } else {
        0.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub estimate: f64,
    /// Binomial standard error `√(p̂(1−p̂)/trials)`.
    pub std_err: f64,
    pub trials: usize,
}

/// Monte Carlo estimate of the large-margin tail probability. Each trial
/// draws `n` points and tracks only the class extremes.
pub fn margin_tail_mc(n: usize, eps: f64, trials: usize, seed: Seed) -> Result<TailEstimate> {
    check_tail_args(n, eps)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut hits = 0usize;
    for _ in 0..trials {
        let mut max_neg = f64::NEG_INFINITY;
        let mut min_pos = f64::INFINITY;
        for _ in 0..n {
            let x = rng.uniform_in(-1.0, 1.0);
            if margin_label(x) > 0.0 {
                min_pos = min_pos.min(x);
            } else {
                max_neg = max_neg.max(x);
            }
        }
        let neg = max_neg.is_finite().then_some(max_neg);
        let pos = min_pos.is_finite().then_some(min_pos);
        if large_margin_from_extremes(neg, pos).abs() > eps {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok(TailEstimate {
        estimate: p,
        std_err: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
    })
}

/// Risk bracket whose coverage is measured by [`check_bracket`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BracketMode {
    /// Full-sample Gaussian mean: `n^{-1/2-ε} < R < n^{-1/2+ε}`.
    FullSample,
    /// Best `k`-subset Gaussian mean:
    /// `(1/√k)(k/n)^{k+ε} < R < (1/√k)(k/n)^{k-ε}`.
    OptimalK { k: usize },
}

impl BracketMode {
    pub fn bounds(self, n: usize, eps: f64) -> (f64, f64) {
        let n = n as f64;
        match self {
            BracketMode::FullSample => (n.powf(-0.5 - eps), n.powf(-0.5 + eps)),
            BracketMode::OptimalK { k } => {
                let k = k as f64;
                let base = k / n;
                (base.powf(k + eps) / k.sqrt(), base.powf(k - eps) / k.sqrt())
            }
        }
    }
}

/// Fraction of Gaussian-mean trials (target 0) whose risk falls strictly
/// inside the bracket.
pub fn check_bracket(mode: BracketMode, n: usize, eps: f64, trials: usize, seed: Seed) -> Result<f64> {
    if trials == 0 || n == 0 {
        return Err(Error::invalid("n and trials must be at least 1"));
    }
    match mode {
        BracketMode::FullSample if !(eps > 0.0) => return Err(Error::invalid("eps must be positive")),
        BracketMode::OptimalK { k } if k == 0 || k > n || !(eps > 0.0 && eps < k as f64) => {
            return Err(Error::invalid("need 1 <= k <= n and 0 < eps < k"))
        }
        _ => {}
    }
    let (lo, hi) = mode.bounds(n, eps);
    let risk = RiskFn::param_distance(Hypothesis::Scalar(0.0));
    let inside: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let set = sample_gauss1d(n, 0.0, trial_seed(seed, n as u64, t as u64))?;
            let r = match mode {
                BracketMode::FullSample => risk.eval(&GaussMeanMle.fit(set.all())?.theta_hat)?,
                BracketMode::OptimalK { k } => {
                    teach_optimal_k_subset(&set, k, &GaussMeanMle, &risk, DEFAULT_EVAL_BUDGET)?.risk_subset
                }
            };
            Ok(lo < r && r < hi)
        })
        .collect();
    let inside = inside?;
    Ok(inside.iter().filter(|&&b| b).count() as f64 / trials as f64)
}
