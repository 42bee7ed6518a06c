use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use superteach::harness::{
    fit_rate, lower_median, margin_tail_exact, margin_tail_mc, run_trials, summarize, Axis, ExperimentConfig, RateFit,
    Sweep,
};
use superteach::search::EngineParams;
use superteach::teachers::teachers;
use superteach::{Hypothesis, LearnerKind, Seed, TaskKind, TaskSpec, TeacherParams};

use crate::io::{self, DataFormat};
use crate::{ExperimentArgs, Failure, GenArgs, RatesArgs, TailArgs, TaskArgs, TeachArgs, TeacherArgs};

fn is_vector_task(kind: TaskKind) -> bool {
    matches!(kind, TaskKind::Halfspace | TaskKind::LinReg)
}

fn default_dim(kind: TaskKind) -> usize {
    if is_vector_task(kind) {
        2
    } else {
        1
    }
}

fn task_kind(args: &TaskArgs) -> Result<TaskKind, Failure> {
    Ok(args.task.parse::<TaskKind>()?)
}

fn build_spec(args: &TaskArgs, d: usize) -> Result<TaskSpec, Failure> {
    let kind = task_kind(args)?;
    if !is_vector_task(kind) && d != 1 {
        return Err(Failure::usage(format!("task {kind} is one-dimensional, got d = {d}")));
    }
    let mut spec = TaskSpec::default_for(kind, d);
    if let Some(domain) = &args.domain {
        if kind != TaskKind::ConsistentInterval {
            return Err(Failure::usage("--domain applies to the consistent task only"));
        }
        match domain[..] {
            [lo, hi] if lo < hi => spec.domain = Some((lo, hi)),
            _ => return Err(Failure::usage("--domain must be two integers lo,hi with lo < hi")),
        }
    }
    if let Some(lambda) = args.lambda {
        spec.lambda = lambda;
    }
    if let Some(noise_var) = args.noise_var {
        spec.noise_var = noise_var;
    }
    if !(spec.lambda > 0.0) {
        return Err(Failure::usage(format!(
            "--lambda must be positive, got {}",
            spec.lambda
        )));
    }
    match &args.theta_star {
        Some(values) => Ok(spec.with_theta_star(values)?),
        None => {
            spec.validate()?;
            Ok(spec)
        }
    }
}

fn learner_kind(spec: &TaskSpec, name: Option<&str>) -> Result<LearnerKind, Failure> {
    match name {
        None => Ok(spec.default_learner()),
        Some(name) => {
            let (lo, hi) = spec.domain.unwrap_or((0, 1));
            Ok(LearnerKind::from_name(name, spec.lambda, (lo as f64, hi as f64))?)
        }
    }
}

fn teacher_params(args: &TeacherArgs) -> TeacherParams {
    let defaults = EngineParams::default();
    TeacherParams {
        k: args.k,
        strategy: args.strategy.clone(),
        engine: EngineParams {
            k: args.k,
            exhaustive_cap: args.cap.unwrap_or(defaults.exhaustive_cap),
            budget: args.budget.unwrap_or(defaults.budget),
            max_iters: args.max_iters,
            restarts: args.restarts.unwrap_or(defaults.restarts),
        },
    }
}

fn data_format(kind: TaskKind) -> DataFormat {
    DataFormat {
        integer_x: kind == TaskKind::ConsistentInterval,
        integer_y: matches!(
            kind,
            TaskKind::Margin1D | TaskKind::Halfspace | TaskKind::ConsistentInterval
        ),
    }
}

fn describe(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map_or("standard output".into(), |p| p.display().to_string())
}

pub fn gen(args: GenArgs) -> Result<(), Failure> {
    let kind = task_kind(&args.task)?;
    let d = args.d.unwrap_or(default_dim(kind));
    let spec = build_spec(&args.task, d)?;
    let set = spec.sample(args.n, Seed(args.seed))?;
    io::write_data(&set, data_format(kind), None, io::sink(args.out.as_deref())?)?;
    eprintln!(
        "wrote {} {} examples (d = {}) to {}",
        set.len(),
        kind,
        d,
        describe(&args.out)
    );
    Ok(())
}

#[derive(Serialize)]
struct TeachOutput {
    indices: Vec<usize>,
    theta_subset: Vec<f64>,
    theta_full: Vec<f64>,
    risk_subset: f64,
    risk_full: f64,
    ratio: Option<f64>,
    evaluations: u64,
}

fn write_lines(path: &str, rows: [(&str, &Hypothesis); 3]) -> Result<(), Failure> {
    let width = rows.iter().map(|(_, h)| h.to_vec().len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(io::sink(Some(path.as_ref()))?);
    let mut header = vec!["line".to_string()];
    header.extend((0..width).map(|j| format!("theta{j}")));
    let fail = |e: csv::Error| Failure::runtime(format!("write failed: {e}"));
    w.write_record(&header).map_err(fail)?;
    for (name, h) in rows {
        let mut row = vec![name.to_string()];
        let coords = h.to_vec();
        row.extend((0..width).map(|j| coords.get(j).map(|&v| io::num(v)).unwrap_or_default()));
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| Failure::runtime(format!("write failed: {e}")))
}

pub fn teach(args: TeachArgs) -> Result<(), Failure> {
    let kind = task_kind(&args.task)?;
    let set = io::read_data(&args.input)?;
    if set.is_labeled() != kind.is_labeled() {
        return Err(Failure::usage(format!(
            "{}: task {kind} expects {} data",
            args.input.display(),
            if kind.is_labeled() { "labeled" } else { "unlabeled" }
        )));
    }
    let spec = build_spec(&args.task, set.dim())?;
    let learner = learner_kind(&spec, args.teacher.learner.as_deref())?.build()?;
    let teacher = teachers().build(&args.teacher.teacher, &teacher_params(&args.teacher))?;
    let result = teacher.teach(&set, learner.as_ref(), &spec.risk(), Seed(args.seed))?;

    let output = TeachOutput {
        indices: result.mask.indices(),
        theta_subset: result.theta_subset.to_vec(),
        theta_full: result.theta_full.to_vec(),
        risk_subset: result.risk_subset,
        risk_full: result.risk_full,
        ratio: result.ratio,
        evaluations: result.evaluations,
    };
    let mut out = io::sink(args.out.as_deref())?;
    let json = serde_json::to_string(&output).map_err(|e| Failure::runtime(e.to_string()))?;
    writeln!(out, "{json}")
        .and_then(|_| out.flush())
        .map_err(|e| Failure::runtime(format!("write failed: {e}")))?;

    if let Some(prefix) = &args.emit_plot {
        let points = format!("{prefix}_points.csv");
        io::write_data(
            &set,
            data_format(kind),
            Some(result.mask.bits()),
            io::sink(Some(points.as_ref()))?,
        )?;
        write_lines(
            &format!("{prefix}_lines.csv"),
            [
                ("full", &result.theta_full),
                ("subset", &result.theta_subset),
                ("target", &spec.theta_star),
            ],
        )?;
    }
    eprintln!(
        "{} ({}) selected {}/{} items: risk {:.3e} vs full {:.3e}, ratio {}, {} evaluations, {:.3}s",
        teacher.name(),
        learner.name(),
        result.subset_size(),
        set.len(),
        result.risk_subset,
        result.risk_full,
        result.ratio.map_or("undefined".into(), |c| format!("{c:.3e}")),
        result.evaluations,
        result.wall_time.as_secs_f64()
    );
    Ok(())
}

pub fn experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let kind = task_kind(&args.task)?;
    let (sweep, d, axis) = match (&args.n_list, &args.d_list) {
        (Some(ns), None) => (Sweep::N(ns.clone()), args.d.unwrap_or(default_dim(kind)), Axis::N),
        (None, Some(ds)) => {
            let n = args.n.ok_or_else(|| Failure::usage("--d-list needs --n"))?;
            if args.task.theta_star.is_some() {
                return Err(Failure::usage("--theta-star cannot be combined with --d-list"));
            }
            let first = *ds.first().ok_or_else(|| Failure::usage("--d-list is empty"))?;
            (Sweep::D { n, ds: ds.clone() }, first, Axis::D)
        }
        _ => return Err(Failure::usage("give exactly one of --n-list or --d-list")),
    };
    let spec = build_spec(&args.task, d)?;
    let learner = match &args.teacher.learner {
        Some(name) => Some(learner_kind(&spec, Some(name))?),
        None => None,
    };
    let config = ExperimentConfig {
        task: spec,
        learner,
        teacher: args.teacher.teacher.clone(),
        teacher_params: teacher_params(&args.teacher),
        sweep,
        trials: args.trials,
        master_seed: Seed(args.seed),
        jobs: args.jobs,
    };
    let records = run_trials(&config)?;
    io::write_results(&records, args.omit_timing, io::sink(args.out.as_deref())?)?;
    let rows = summarize(&records, axis);
    if let Some(path) = &args.medians {
        io::write_medians(&rows, args.omit_timing, io::sink(Some(path))?)?;
    }
    let label = if axis == Axis::N { "n" } else { "d" };
    for row in &rows {
        eprintln!(
            "{label}={:<6} median ratio {:<10} subset fraction {:<6} time {:.3e}s  failures {}/{}",
            row.key,
            row.median_ratio.map_or("-".into(), |c| format!("{c:.3e}")),
            row.median_subset_fraction.map_or("-".into(), |f| format!("{f:.2}")),
            row.median_time_s,
            row.failures,
            row.trials
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct FitJson {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

impl From<RateFit> for FitJson {
    fn from(f: RateFit) -> Self {
        FitJson {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
        }
    }
}

#[derive(Serialize)]
struct RatesOutput {
    points: usize,
    risk_full: FitJson,
    risk_subset: FitJson,
}

pub fn rates(args: RatesArgs) -> Result<(), Failure> {
    let rows = io::read_risk_rows(&args.input)?;
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Failure::usage(format!(
            "rate fit needs at least 3 distinct n, found {}",
            ns.len()
        )));
    }
    let medians = |pick: fn(&io::RiskRow) -> Option<f64>| -> Result<Vec<(f64, f64)>, Failure> {
        ns.iter()
            .map(|&n| {
                let values: Vec<f64> = rows.iter().filter(|r| r.n == n).filter_map(pick).collect();
                lower_median(&values)
                    .map(|m| (n as f64, m))
                    .ok_or_else(|| Failure::usage(format!("no risk values for n = {n}")))
            })
            .collect()
    };
    let full = fit_rate(&medians(|r| r.risk_full)?)?;
    let subset = fit_rate(&medians(|r| r.risk_subset)?)?;
    let output = RatesOutput {
        points: ns.len(),
        risk_full: full.into(),
        risk_subset: subset.into(),
    };
    println!(
        "{}",
        serde_json::to_string(&output).map_err(|e| Failure::runtime(e.to_string()))?
    );
    eprintln!(
        "slopes over {} sample sizes: full {:.4}, subset {:.4}",
        ns.len(),
        full.slope,
        subset.slope
    );
    Ok(())
}

#[derive(Serialize)]
struct TailOutput {
    n: usize,
    eps: f64,
    trials: usize,
    exact: f64,
    estimate: f64,
    std_err: f64,
    pass: bool,
}

pub fn tail(args: TailArgs) -> Result<(), Failure> {
    let exact = margin_tail_exact(args.n, args.eps)?;
    let mc = margin_tail_mc(args.n, args.eps, args.trials, Seed(args.seed))?;
    // deviation judged against the standard error under the exact probability
    let se = (exact * (1.0 - exact) / args.trials as f64).sqrt();
    let pass = (mc.estimate - exact).abs() <= 4.0 * se;
    let output = TailOutput {
        n: args.n,
        eps: args.eps,
        trials: args.trials,
        exact,
        estimate: mc.estimate,
        std_err: mc.std_err,
        pass,
    };
    println!(
        "{}",
        serde_json::to_string(&output).map_err(|e| Failure::runtime(e.to_string()))?
    );
    eprintln!(
        "P(risk > {}) at n = {}: exact {:.6}, Monte Carlo {:.6} ± {:.2e} ({})",
        args.eps,
        args.n,
        exact,
        mc.estimate,
        mc.std_err,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(())
}
