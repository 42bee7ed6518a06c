//! Subset teaching for a fixed learner: choose `B(S) ⊆ S` so that the
//! learner trained on `B(S)` lands closer to the target than when trained on
//! all of `S`.
//!
//! The crate provides samplers for several 1D and `d`-dimensional tasks,
//! the learners those tasks use, teachers that select subsets (exact,
//! closed-form and search-based), and a Monte Carlo harness that measures
//! teaching ratios and convergence rates.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod error;
pub mod harness;
pub mod learners;
pub mod registry;
pub mod risk;
pub mod search;
pub mod task;
pub mod teachers;
pub mod types;

pub use datagen::Seed;
pub use error::{Error, Result};
pub use learners::{Learner, LearnerKind, SolveReport};
pub use risk::{RiskFn, RiskKind};
pub use task::{TaskKind, TaskSpec};
pub use teachers::{Teacher, TeacherParams, TeachingResult};
pub use types::{Example, Hypothesis, Subset, SubsetMask, TrainingSet};
