//! Learners `A`: training (sub)set → unique hypothesis.
//!
//! Every learner implements [`Learner`] and is constructed from a
//! [`LearnerKind`] description, so teachers and the harness can stay
//! agnostic of which concrete algorithm they drive.

mod erm;
mod simple;

pub use erm::{
    gradient as erm_gradient, learn_logistic_erm, learn_ridge_erm, newton_erm, objective as erm_objective, LogisticErm,
    LogisticLoss, RidgeErm, ScoreLoss, SquaredLoss, DEFAULT_MAX_NEWTON_ITERS, DEFAULT_TOL,
};
pub use simple::{
    large_margin_from_extremes, learn_consistent_interval, learn_gauss_mean, learn_interval_mle, learn_large_margin_1d,
    ConsistentInterval, ConsistentMode, GaussMeanMle, IntervalMle, LargeMargin1D,
};

use crate::error::{Error, Result};
use crate::types::{Hypothesis, Subset};

/// Fitted hypothesis plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub theta_hat: Hypothesis,
    /// Norm of the stationarity residual `Σ ∇ℓ̃(θ̂, zᵢ) + λθ̂`; zero for
    /// learners with a closed form.
    pub kkt_residual_norm: f64,
    pub iterations: usize,
}

impl SolveReport {
    pub fn exact(theta_hat: Hypothesis) -> Self {
        SolveReport {
            theta_hat,
            kkt_residual_norm: 0.0,
            iterations: 0,
        }
    }
}

pub trait Learner: Send + Sync {
    fn name(&self) -> &'static str;

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport>;

    /// Regularized convex ERM learners accept the empty set and have a
    /// verifiable stationarity condition.
    fn is_erm(&self) -> bool {
        false
    }
}

/// Description of a learner, buildable into a trait object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerKind {
    GaussMeanMle,
    LargeMargin1D,
    LogisticErm { lambda: f64 },
    RidgeErm { lambda: f64 },
    IntervalMle,
    LeastConsistent { domain: (f64, f64) },
    GreatestConsistent { domain: (f64, f64) },
}

impl LearnerKind {
    pub const NAMES: [&'static str; 7] = [
        "gauss-mean",
        "large-margin",
        "logistic",
        "ridge",
        "interval-mle",
        "least-consistent",
        "greatest-consistent",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::GaussMeanMle => "gauss-mean",
            LearnerKind::LargeMargin1D => "large-margin",
            LearnerKind::LogisticErm { .. } => "logistic",
            LearnerKind::RidgeErm { .. } => "ridge",
            LearnerKind::IntervalMle => "interval-mle",
            LearnerKind::LeastConsistent { .. } => "least-consistent",
            LearnerKind::GreatestConsistent { .. } => "greatest-consistent",
        }
    }

    /// Looks up a learner by name; `lambda` and `domain` are used only by
    /// the learners that take them.
    pub fn from_name(name: &str, lambda: f64, domain: (f64, f64)) -> Result<Self> {
        Ok(match name {
            "gauss-mean" => LearnerKind::GaussMeanMle,
            "large-margin" => LearnerKind::LargeMargin1D,
            "logistic" => LearnerKind::LogisticErm { lambda },
            "ridge" => LearnerKind::RidgeErm { lambda },
            "interval-mle" => LearnerKind::IntervalMle,
            "least-consistent" => LearnerKind::LeastConsistent { domain },
            "greatest-consistent" => LearnerKind::GreatestConsistent { domain },
            _ => {
                return Err(Error::UnknownName {
                    kind: "learner",
                    name: name.to_string(),
                    available: LearnerKind::NAMES.join(", "),
                })
            }
        })
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            LearnerKind::LogisticErm { lambda } | LearnerKind::RidgeErm { lambda } => Some(lambda),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Learner>> {
        Ok(match *self {
            LearnerKind::GaussMeanMle => Box::new(GaussMeanMle),
            LearnerKind::LargeMargin1D => Box::new(LargeMargin1D),
            LearnerKind::LogisticErm { lambda } => Box::new(LogisticErm::new(lambda, DEFAULT_TOL)?),
            LearnerKind::RidgeErm { lambda } => Box::new(RidgeErm::new(lambda)?),
            LearnerKind::IntervalMle => Box::new(IntervalMle),
            LearnerKind::LeastConsistent { domain } => {
                Box::new(ConsistentInterval::new(ConsistentMode::Least, domain)?)
            }
            LearnerKind::GreatestConsistent { domain } => {
                Box::new(ConsistentInterval::new(ConsistentMode::Greatest, domain)?)
            }
        })
    }
}
