//! Teachers: given `S`, a learner and a risk bound to `θ*`, choose `B(S) ⊆ S`.

use std::time::{Duration, Instant};

use crate::datagen::Seed;
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::registry::Registry;
use crate::risk::RiskFn;
use crate::search::{engines, exhaustive_min_fixed_k, EngineParams, SearchEngine};
use crate::types::{Hypothesis, SubsetMask, TrainingSet};

#[derive(Debug, Clone, PartialEq)]
pub struct TeachingResult {
    pub mask: SubsetMask,
    pub theta_subset: Hypothesis,
    pub theta_full: Hypothesis,
    pub risk_subset: f64,
    pub risk_full: f64,
    /// `risk_subset / risk_full`; `None` when the full-set risk is zero.
    pub ratio: Option<f64>,
    pub evaluations: u64,
    pub wall_time: Duration,
    /// Whether `B(S)` is a strict subset of `S`.
    pub proper: bool,
    /// Stationarity residual of the subset solve (zero for closed forms).
    pub kkt_residual_norm: f64,
}

impl TeachingResult {
    pub fn subset_size(&self) -> usize {
        self.mask.count()
    }
}

/// Refits on the masked set from scratch and packages the result.
fn finalize(
    set: &TrainingSet,
    mask: SubsetMask,
    learner: &dyn Learner,
    risk: &RiskFn,
    evaluations: u64,
    started: Instant,
) -> Result<TeachingResult> {
    let subset = set.select(&mask)?;
    let sub = learner.fit(subset.all())?;
    let full = learner.fit(set.all())?;
    let risk_subset = risk.eval(&sub.theta_hat)?;
    let risk_full = risk.eval(&full.theta_hat)?;
    Ok(TeachingResult {
        proper: !mask.is_full(),
        mask,
        theta_subset: sub.theta_hat,
        theta_full: full.theta_hat,
        risk_subset,
        risk_full,
        ratio: (risk_full > 0.0).then(|| risk_subset / risk_full),
        evaluations,
        wall_time: started.elapsed(),
        kkt_residual_norm: sub.kkt_residual_norm,
    })
}

pub trait Teacher: Send + Sync {
    fn name(&self) -> &'static str;

    fn teach(&self, set: &TrainingSet, learner: &dyn Learner, risk: &RiskFn, seed: Seed) -> Result<TeachingResult>;
}

/// `B(S) = S`, the no-teaching baseline.
pub fn teach_identity(set: &TrainingSet, learner: &dyn Learner, risk: &RiskFn) -> Result<TeachingResult> {
    finalize(set, SubsetMask::all(set.len()), learner, risk, 1, Instant::now())
}

/// Exact minimizer of the risk over all `C(n, k)` subsets of size `k`;
/// ties go to the lexicographically smallest index set.
pub fn teach_optimal_k_subset(
    set: &TrainingSet,
    k: usize,
    learner: &dyn Learner,
    risk: &RiskFn,
    budget: u128,
) -> Result<TeachingResult> {
    let started = Instant::now();
    let n = set.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "subset size must satisfy 1 <= k <= n = {n}, got {k}"
        )));
    }
    let eval = |ix: &[usize]| risk.eval(&learner.fit(set.view(ix))?.theta_hat);
    let out = exhaustive_min_fixed_k(n, k, &eval, budget)?;
    finalize(set, out.mask, learner, risk, out.evaluations, started)
}

/// Selects the opposite-label pair whose midpoint is closest to `θ*`, or the
/// first item when only one class is present. Returns the mask only.
///
/// Runs in `O(n log n)`: for each positive, only the negatives adjacent to
/// the reflected target in sorted order can minimize the midpoint error.
pub fn most_symmetric_mask(set: &TrainingSet, theta_star: f64) -> Result<SubsetMask> {
    let n = set.len();
    if n == 0 {
        return Err(Error::EmptySet("most-symmetric teacher"));
    }
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: set.dim(),
        });
    }
    set.check_binary_labels()?;
    let mut negatives: Vec<(f64, usize)> = set
        .examples()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.y == Some(-1.0))
        .map(|(i, e)| (e.x0(), i))
        .collect();
    negatives.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    // first position of each run of equal values, i.e. its smallest index
    let mut run_start = vec![0; negatives.len()];
    for i in 1..negatives.len() {
        run_start[i] = if negatives[i].0 == negatives[i - 1].0 {
            run_start[i - 1]
        } else {
            i
        };
    }

    let mut best: Option<(f64, (usize, usize))> = None;
    for (j, e) in set.examples().iter().enumerate() {
        if e.y != Some(1.0) || negatives.is_empty() {
            continue;
        }
        let xp = e.x0();
        let reflected = 2.0 * theta_star - xp;
        let p = negatives.partition_point(|&(x, _)| x < reflected);
        let mut candidates = [None, None];
        if p < negatives.len() {
            candidates[0] = Some(negatives[p]);
        }
        if p > 0 {
            candidates[1] = Some(negatives[run_start[p - 1]]);
        }
        for (xn, i) in candidates.into_iter().flatten() {
            let err = ((xn + xp) / 2.0 - theta_star).abs();
            let key = (i.min(j), i.max(j));
            let wins = match best {
                None => true,
                Some((b, bkey)) => err < b || (err == b && key < bkey),
            };
            if wins {
                best = Some((err, key));
            }
        }
    }
    match best {
        Some((_, (a, b))) => SubsetMask::from_indices(n, &[a, b]),
        None => SubsetMask::from_indices(n, &[0]),
    }
}

/// Most-symmetric teacher for the 1D large-margin learner.
pub fn teach_most_symmetric(set: &TrainingSet, theta_star: f64) -> Result<TeachingResult> {
    let started = Instant::now();
    let mask = most_symmetric_mask(set, theta_star)?;
    let learner = crate::learners::LargeMargin1D;
    let risk = RiskFn::param_distance(Hypothesis::Scalar(theta_star));
    finalize(set, mask, &learner, &risk, set.len() as u64, started)
}

/// General subset search: outer combinatorial engine over masks, exact
/// convex inner solve per mask. Every returned hypothesis satisfies the
/// inner stationarity condition to the learner's tolerance.
pub fn teach_subset_search(
    set: &TrainingSet,
    learner: &dyn Learner,
    risk: &RiskFn,
    engine: &dyn SearchEngine,
    seed: Seed,
) -> Result<TeachingResult> {
    let started = Instant::now();
    if !learner.is_erm() {
        return Err(Error::invalid(format!(
            "subset search needs a regularized ERM learner, got `{}`",
            learner.name()
        )));
    }
    let eval = |ix: &[usize]| risk.eval(&learner.fit(set.view(ix))?.theta_hat);
    let out = engine.minimize(set.len(), &eval, seed)?;
    finalize(set, out.mask, learner, risk, out.evaluations, started)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTeacher;

impl Teacher for IdentityTeacher {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn teach(&self, set: &TrainingSet, learner: &dyn Learner, risk: &RiskFn, _seed: Seed) -> Result<TeachingResult> {
        teach_identity(set, learner, risk)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptimalKSubset {
    pub k: usize,
    pub budget: u128,
}

impl Teacher for OptimalKSubset {
    fn name(&self) -> &'static str {
        "bk"
    }

    fn teach(&self, set: &TrainingSet, learner: &dyn Learner, risk: &RiskFn, _seed: Seed) -> Result<TeachingResult> {
        teach_optimal_k_subset(set, self.k, learner, risk, self.budget)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MostSymmetric;

impl Teacher for MostSymmetric {
    fn name(&self) -> &'static str {
        "bms"
    }

    fn teach(&self, set: &TrainingSet, learner: &dyn Learner, risk: &RiskFn, _seed: Seed) -> Result<TeachingResult> {
        if learner.name() != "large-margin" {
            return Err(Error::invalid(format!(
                "most-symmetric teacher applies to the large-margin learner, got `{}`",
                learner.name()
            )));
        }
        let theta_star = match risk.theta_star() {
            Hypothesis::Scalar(t) => *t,
            _ => return Err(Error::invalid("most-symmetric teacher needs a scalar target")),
        };
        let started = Instant::now();
        let mask = most_symmetric_mask(set, theta_star)?;
        finalize(set, mask, learner, risk, set.len() as u64, started)
    }
}

pub struct SubsetSearch {
    engine: Box<dyn SearchEngine>,
}

impl SubsetSearch {
    pub fn new(engine: Box<dyn SearchEngine>) -> Self {
        SubsetSearch { engine }
    }

    pub fn engine_name(&self) -> &'static str {
        self.engine.name()
    }
}

impl Teacher for SubsetSearch {
    fn name(&self) -> &'static str {
        "search"
    }

    fn teach(&self, set: &TrainingSet, learner: &dyn Learner, risk: &RiskFn, seed: Seed) -> Result<TeachingResult> {
        teach_subset_search(set, learner, risk, self.engine.as_ref(), seed)
    }
}

/// Everything a teacher factory may need.
#[derive(Debug, Clone)]
pub struct TeacherParams {
    pub k: Option<usize>,
    /// Engine name for the `search` teacher.
    pub strategy: String,
    pub engine: EngineParams,
}

impl Default for TeacherParams {
    fn default() -> Self {
        TeacherParams {
            k: None,
            strategy: "exhaustive".into(),
            engine: EngineParams::default(),
        }
    }
}

/// Built-in teachers keyed by name: `identity`, `bk`, `bms`, `search`.
pub fn teachers() -> Registry<dyn Teacher, TeacherParams> {
    let mut reg: Registry<dyn Teacher, TeacherParams> = Registry::new("teacher");
    reg.register("identity", |_| Ok(Box::new(IdentityTeacher)))
        .register("bk", |p| {
            let k = p.k.ok_or_else(|| Error::invalid("teacher `bk` needs k"))?;
            Ok(Box::new(OptimalKSubset {
                k,
                budget: p.engine.budget,
            }))
        })
        .register("bms", |_| Ok(Box::new(MostSymmetric)))
        .register("search", |p| {
            let mut engine = p.engine;
            engine.k = engine.k.or(p.k);
            Ok(Box::new(SubsetSearch::new(engines().build(&p.strategy, &engine)?)))
        });
    reg
}
