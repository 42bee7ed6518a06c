//! Task descriptions: data distribution, target, default learner and risk.

use std::fmt;
use std::str::FromStr;

use crate::datagen::{
    default_direction, sample_gauss1d, sample_grid_interval, sample_halfspace, sample_interval_uniform, sample_linreg,
    sample_margin1d, Seed,
};
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::risk::{RiskFn, RiskKind};
use crate::types::{Hypothesis, TrainingSet};

pub const DEFAULT_LAMBDA: f64 = 0.1;
pub const DEFAULT_NOISE_VAR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Gauss1D,
    Margin1D,
    Halfspace,
    LinReg,
    IntervalMle,
    ConsistentInterval,
}

impl TaskKind {
    pub const NAMES: [&'static str; 6] = ["gauss1d", "margin1d", "halfspace", "linreg", "interval", "consistent"];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Gauss1D => "gauss1d",
            TaskKind::Margin1D => "margin1d",
            TaskKind::Halfspace => "halfspace",
            TaskKind::LinReg => "linreg",
            TaskKind::IntervalMle => "interval",
            TaskKind::ConsistentInterval => "consistent",
        }
    }

    pub fn is_labeled(self) -> bool {
        !matches!(self, TaskKind::Gauss1D | TaskKind::IntervalMle)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gauss1d" | "gauss" => TaskKind::Gauss1D,
            "margin1d" | "margin" => TaskKind::Margin1D,
            "halfspace" | "logistic" => TaskKind::Halfspace,
            "linreg" | "ridge" => TaskKind::LinReg,
            "interval" => TaskKind::IntervalMle,
            "consistent" => TaskKind::ConsistentInterval,
            _ => {
                return Err(Error::UnknownName {
                    kind: "task",
                    name: s.to_string(),
                    available: TaskKind::NAMES.join(", "),
                })
            }
        })
    }
}

/// A fully specified task instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub task: TaskKind,
    pub d: usize,
    pub theta_star: Hypothesis,
    pub noise_var: f64,
    pub lambda: f64,
    pub risk_kind: RiskKind,
    /// Integer grid for the consistent-interval task.
    pub domain: Option<(i64, i64)>,
}

impl TaskSpec {
    pub fn gauss1d(theta_star: f64) -> Self {
        TaskSpec {
            task: TaskKind::Gauss1D,
            d: 1,
            theta_star: Hypothesis::Scalar(theta_star),
            noise_var: 0.0,
            lambda: DEFAULT_LAMBDA,
            risk_kind: RiskKind::ParamDistance,
            domain: None,
        }
    }

    /// Threshold at 0 on `U[-1, 1]`.
    pub fn margin1d() -> Self {
        TaskSpec {
            task: TaskKind::Margin1D,
            theta_star: Hypothesis::Scalar(0.0),
            ..TaskSpec::gauss1d(0.0)
        }
    }

    pub fn halfspace(d: usize) -> Self {
        TaskSpec {
            task: TaskKind::Halfspace,
            d,
            theta_star: Hypothesis::Vector(default_direction(d)),
            noise_var: 0.0,
            lambda: DEFAULT_LAMBDA,
            risk_kind: RiskKind::Angular01,
            domain: None,
        }
    }

    pub fn linreg(d: usize) -> Self {
        TaskSpec {
            task: TaskKind::LinReg,
            d,
            theta_star: Hypothesis::Vector(default_direction(d)),
            noise_var: DEFAULT_NOISE_VAR,
            lambda: DEFAULT_LAMBDA,
            risk_kind: RiskKind::ParamDistance,
            domain: None,
        }
    }

    /// `U[0, θ*]` with the max-likelihood endpoint learner.
    pub fn interval_mle(theta_star: f64) -> Self {
        TaskSpec {
            task: TaskKind::IntervalMle,
            theta_star: Hypothesis::Scalar(theta_star),
            ..TaskSpec::gauss1d(0.0)
        }
    }

    pub fn consistent_interval(domain: (i64, i64), target: (i64, i64)) -> Self {
        TaskSpec {
            task: TaskKind::ConsistentInterval,
            d: 1,
            theta_star: Hypothesis::Interval {
                lo: target.0 as f64,
                hi: target.1 as f64,
            },
            noise_var: 0.0,
            lambda: DEFAULT_LAMBDA,
            risk_kind: RiskKind::SymmetricDifference,
            domain: Some(domain),
        }
    }

    /// Default instance of a task kind at dimension `d`.
    pub fn default_for(task: TaskKind, d: usize) -> Self {
        match task {
            TaskKind::Gauss1D => TaskSpec::gauss1d(0.0),
            TaskKind::Margin1D => TaskSpec::margin1d(),
            TaskKind::Halfspace => TaskSpec::halfspace(d),
            TaskKind::LinReg => TaskSpec::linreg(d),
            TaskKind::IntervalMle => TaskSpec::interval_mle(1.0),
            TaskKind::ConsistentInterval => TaskSpec::consistent_interval((0, 10), (3, 6)),
        }
    }

    /// Replaces the target with coordinates read from the user.
    pub fn with_theta_star(mut self, values: &[f64]) -> Result<Self> {
        self.theta_star = match self.task {
            TaskKind::Gauss1D | TaskKind::Margin1D | TaskKind::IntervalMle => match values {
                [v] => Hypothesis::Scalar(*v),
                _ => {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: values.len(),
                    })
                }
            },
            TaskKind::Halfspace | TaskKind::LinReg => Hypothesis::Vector(values.to_vec()),
            TaskKind::ConsistentInterval => match values {
                [lo, hi] => Hypothesis::interval(*lo, *hi)?,
                _ => {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: values.len(),
                    })
                }
            },
        };
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        if (!self.task.is_labeled() || matches!(self.task, TaskKind::Margin1D | TaskKind::ConsistentInterval))
            && self.d != 1
        {
            return Err(Error::invalid(format!("task {} is one-dimensional", self.task)));
        }
        let coords = self.theta_star.to_vec();
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("target must be finite"));
        }
        match self.task {
            TaskKind::Halfspace | TaskKind::LinReg => {
                if coords.len() != self.d {
                    return Err(Error::DimensionMismatch {
                        expected: self.d,
                        got: coords.len(),
                    });
                }
            }
            TaskKind::Margin1D => {
                if self.theta_star != Hypothesis::Scalar(0.0) {
                    return Err(Error::invalid("the margin task has its threshold fixed at 0"));
                }
            }
            TaskKind::IntervalMle => {
                if !(coords[0] > 0.0) {
                    return Err(Error::invalid("interval endpoint must be positive"));
                }
            }
            TaskKind::ConsistentInterval => {
                let (lo, hi) = self
                    .domain
                    .ok_or_else(|| Error::invalid("consistent task needs a grid domain"))?;
                let (a, b) = (coords[0], coords[1]);
                if a.fract() != 0.0 || b.fract() != 0.0 || a < lo as f64 || b > hi as f64 {
                    return Err(Error::invalid(
                        "target interval must have integer ends inside the domain",
                    ));
                }
            }
            TaskKind::Gauss1D => {}
        }
        if !(self.lambda > 0.0) && matches!(self.task, TaskKind::Halfspace | TaskKind::LinReg) {
            return Err(Error::invalid(format!(
                "regularization must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.noise_var >= 0.0) {
            return Err(Error::invalid("noise variance must be nonnegative"));
        }
        Ok(())
    }

    pub fn risk(&self) -> RiskFn {
        match self.risk_kind {
            RiskKind::ParamDistance => RiskFn::param_distance(self.theta_star.clone()),
            RiskKind::Angular01 => RiskFn::angular_01(self.theta_star.to_vec()),
            RiskKind::SymmetricDifference => {
                let (lo, hi) = self.domain.unwrap_or((0, 1));
                RiskFn::symmetric_difference(self.theta_star.clone(), lo as f64, hi as f64)
            }
        }
    }

    pub fn default_learner(&self) -> LearnerKind {
        match self.task {
            TaskKind::Gauss1D => LearnerKind::GaussMeanMle,
            TaskKind::Margin1D => LearnerKind::LargeMargin1D,
            TaskKind::Halfspace => LearnerKind::LogisticErm { lambda: self.lambda },
            TaskKind::LinReg => LearnerKind::RidgeErm { lambda: self.lambda },
            TaskKind::IntervalMle => LearnerKind::IntervalMle,
            TaskKind::ConsistentInterval => {
                let (lo, hi) = self.domain.unwrap_or((0, 1));
                LearnerKind::LeastConsistent {
                    domain: (lo as f64, hi as f64),
                }
            }
        }
    }

    /// Draws `n` iid examples from the task distribution.
    pub fn sample(&self, n: usize, seed: Seed) -> Result<TrainingSet> {
        self.validate()?;
        let coords = self.theta_star.to_vec();
        match self.task {
            TaskKind::Gauss1D => sample_gauss1d(n, coords[0], seed),
            TaskKind::Margin1D => sample_margin1d(n, seed),
            TaskKind::Halfspace => sample_halfspace(n, self.d, &coords, seed),
            TaskKind::LinReg => sample_linreg(n, self.d, &coords, self.noise_var, seed),
            TaskKind::IntervalMle => sample_interval_uniform(n, coords[0], seed),
            TaskKind::ConsistentInterval => {
                let domain = self.domain.expect("validated");
                sample_grid_interval(n, domain, (coords[0] as i64, coords[1] as i64), seed)
            }
        }
    }
}
