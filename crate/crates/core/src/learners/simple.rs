use crate::error::{Error, Result};
use crate::learners::{Learner, SolveReport};
use crate::types::{Hypothesis, Subset};

fn require_1d(data: &Subset<'_>) -> Result<()> {
    if data.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: data.dim(),
        });
    }
    Ok(())
}

fn binary_label(y: Option<f64>) -> Result<f64> {
    match y {
        Some(y) if y == 1.0 || y == -1.0 => Ok(y),
        Some(y) => Err(Error::invalid(format!(
            "classification label must be -1 or +1, got {y}"
        ))),
        None => Err(Error::invalid("classification example is missing a label")),
    }
}

/// Sample mean of a 1D set.
pub fn learn_gauss_mean(data: Subset<'_>) -> Result<Hypothesis> {
    require_1d(&data)?;
    if data.is_empty() {
        return Err(Error::EmptySet("mean MLE"));
    }
    let sum: f64 = data.iter().map(|e| e.x[0]).sum();
    Ok(Hypothesis::Scalar(sum / data.len() as f64))
}

/// Threshold from the innermost opposite-label pair: the midpoint when both
/// classes are present, `-1` when all items are positive, `+1` when all are
/// negative.
pub fn large_margin_from_extremes(max_negative: Option<f64>, min_positive: Option<f64>) -> f64 {
    match (max_negative, min_positive) {
        (Some(neg), Some(pos)) => (neg + pos) / 2.0,
        (None, Some(_)) => -1.0,
        (Some(_), None) => 1.0,
        (None, None) => unreachable!("nonempty set has at least one class"),
    }
}

/// 1D large-margin threshold. Inputs with a negative strictly to the right of
/// a positive are rejected.
pub fn learn_large_margin_1d(data: Subset<'_>) -> Result<Hypothesis> {
    require_1d(&data)?;
    if data.is_empty() {
        return Err(Error::EmptySet("large-margin threshold"));
    }
    let mut max_neg: Option<f64> = None;
    let mut min_pos: Option<f64> = None;
    for e in data.iter() {
        let x = e.x[0];
        if binary_label(e.y)? > 0.0 {
            min_pos = Some(min_pos.map_or(x, |m| m.min(x)));
        } else {
            max_neg = Some(max_neg.map_or(x, |m| m.max(x)));
        }
    }
    if let (Some(neg), Some(pos)) = (max_neg, min_pos) {
        if neg > pos {
            return Err(Error::NotRealizable(format!(
                "negative at {neg} lies right of positive at {pos}"
            )));
        }
    }
    Ok(Hypothesis::Scalar(large_margin_from_extremes(max_neg, min_pos)))
}

/// Upper endpoint MLE for `U[0, θ]`: the sample maximum.
pub fn learn_interval_mle(data: Subset<'_>) -> Result<Hypothesis> {
    require_1d(&data)?;
    if data.is_empty() {
        return Err(Error::EmptySet("interval MLE"));
    }
    let mut best = f64::NEG_INFINITY;
    for e in data.iter() {
        let x = e.x[0];
        if x < 0.0 {
            return Err(Error::invalid(format!("interval MLE needs x >= 0, got {x}")));
        }
        best = best.max(x);
    }
    Ok(Hypothesis::Scalar(best))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistentMode {
    /// Tightest interval around the positives.
    Least,
    /// Widest grid interval that still excludes every negative.
    Greatest,
}

/// Consistent interval learners on an integer grid.
pub fn learn_consistent_interval(
    data: Subset<'_>,
    mode: ConsistentMode,
    domain_lo: f64,
    domain_hi: f64,
) -> Result<Hypothesis> {
    require_1d(&data)?;
    if !(domain_hi > domain_lo) {
        return Err(Error::invalid(format!("degenerate domain [{domain_lo}, {domain_hi}]")));
    }
    let mut min_pos = f64::INFINITY;
    let mut max_pos = f64::NEG_INFINITY;
    for e in data.iter() {
        let x = e.x[0];
        if x.fract() != 0.0 || x < domain_lo || x > domain_hi {
            return Err(Error::invalid(format!(
                "x = {x} is not a grid point of [{domain_lo}, {domain_hi}]"
            )));
        }
        if binary_label(e.y)? > 0.0 {
            min_pos = min_pos.min(x);
            max_pos = max_pos.max(x);
        }
    }
    if min_pos > max_pos {
        return Ok(Hypothesis::Empty);
    }
    let mut left_wall = f64::NEG_INFINITY;
    let mut right_wall = f64::INFINITY;
    for e in data.iter() {
        if e.y == Some(-1.0) {
            let x = e.x[0];
            if x >= min_pos && x <= max_pos {
                return Err(Error::NotRealizable(format!(
                    "negative at {x} inside the positive span [{min_pos}, {max_pos}]"
                )));
            }
            if x < min_pos {
                left_wall = left_wall.max(x);
            } else {
                right_wall = right_wall.min(x);
            }
        }
    }
    match mode {
        ConsistentMode::Least => Hypothesis::interval(min_pos, max_pos),
        ConsistentMode::Greatest => {
            let lo = if left_wall.is_finite() {
                left_wall + 1.0
            } else {
                domain_lo
            };
            let hi = if right_wall.is_finite() {
                right_wall - 1.0
            } else {
                domain_hi
            };
            Hypothesis::interval(lo, hi)
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GaussMeanMle;

impl Learner for GaussMeanMle {
    fn name(&self) -> &'static str {
        "gauss-mean"
    }

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport> {
        learn_gauss_mean(data).map(SolveReport::exact)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LargeMargin1D;

impl Learner for LargeMargin1D {
    fn name(&self) -> &'static str {
        "large-margin"
    }

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport> {
        learn_large_margin_1d(data).map(SolveReport::exact)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalMle;

impl Learner for IntervalMle {
    fn name(&self) -> &'static str {
        "interval-mle"
    }

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport> {
        learn_interval_mle(data).map(SolveReport::exact)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConsistentInterval {
    mode: ConsistentMode,
    domain: (f64, f64),
}

impl ConsistentInterval {
    pub fn new(mode: ConsistentMode, domain: (f64, f64)) -> Result<Self> {
        if !(domain.1 > domain.0) {
            return Err(Error::invalid("degenerate domain"));
        }
        Ok(ConsistentInterval { mode, domain })
    }
}

impl Learner for ConsistentInterval {
    fn name(&self) -> &'static str {
        match self.mode {
            ConsistentMode::Least => "least-consistent",
            ConsistentMode::Greatest => "greatest-consistent",
        }
    }

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport> {
        learn_consistent_interval(data, self.mode, self.domain.0, self.domain.1).map(SolveReport::exact)
    }
}
