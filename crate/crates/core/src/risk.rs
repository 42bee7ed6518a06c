//! Teaching risks `R(θ̂)` measured against a known target.

use crate::error::{Error, Result};
use crate::types::Hypothesis;

/// Which risk functional a task uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskKind {
    /// Euclidean distance to the target parameter.
    ParamDistance,
    /// Expected 0-1 loss of a linear separator under an origin-symmetric
    /// feature distribution: the angle to the target over π.
    Angular01,
    /// Length of the symmetric difference of two intervals, normalized by
    /// the domain length.
    SymmetricDifference,
}

/// `‖θ̂ − θ*‖₂` for scalar or vector hypotheses.
pub fn risk_param_distance(theta_hat: &Hypothesis, theta_star: &Hypothesis) -> Result<f64> {
    if theta_hat.is_empty() || theta_star.is_empty() {
        return Err(Error::UndefinedRisk("empty hypothesis has no parameter"));
    }
    let (a, b) = match (theta_hat.coords(), theta_star.coords()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invalid("parameter distance needs scalar or vector hypotheses")),
    };
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            got: a.len(),
        });
    }
    if a.len() == 1 {
        return Ok((a[0] - b[0]).abs());
    }
    Ok(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt())
}

/// `arccos(cos∠(θ̂, θ*)) / π`. A zero `θ̂` predicts no direction and scores 0.5.
pub fn risk_angular_01(theta_hat: &[f64], theta_star: &[f64]) -> Result<f64> {
    if theta_hat.len() != theta_star.len() {
        return Err(Error::DimensionMismatch {
            expected: theta_star.len(),
            got: theta_hat.len(),
        });
    }
    let star_norm = norm(theta_star);
    if star_norm == 0.0 {
        return Err(Error::invalid("target direction must be nonzero"));
    }
    let hat_norm = norm(theta_hat);
    if hat_norm == 0.0 {
        return Ok(0.5);
    }
    let dot: f64 = theta_hat.iter().zip(theta_star).map(|(a, b)| a * b).sum();
    let cos = (dot / (hat_norm * star_norm)).clamp(-1.0, 1.0);
    Ok(cos.acos() / std::f64::consts::PI)
}

/// Normalized length of `θ̂ Δ θ*` on `[domain_lo, domain_hi]`. `Empty` counts
/// as a zero-length interval.
pub fn risk_symmetric_difference(
    theta_hat: &Hypothesis,
    theta_star: &Hypothesis,
    domain_lo: f64,
    domain_hi: f64,
) -> Result<f64> {
    if !(domain_hi > domain_lo) {
        return Err(Error::invalid(format!("degenerate domain [{domain_lo}, {domain_hi}]")));
    }
    let a = interval_bounds(theta_hat, domain_lo, domain_hi)?;
    let b = interval_bounds(theta_star, domain_lo, domain_hi)?;
    let len = |iv: Option<(f64, f64)>| iv.map_or(0.0, |(lo, hi)| hi - lo);
    let overlap = match (a, b) {
        (Some((alo, ahi)), Some((blo, bhi))) => (ahi.min(bhi) - alo.max(blo)).max(0.0),
        _ => 0.0,
    };
    let sym = len(a) + len(b) - 2.0 * overlap;
    Ok((sym / (domain_hi - domain_lo)).clamp(0.0, 1.0))
}

fn interval_bounds(h: &Hypothesis, lo: f64, hi: f64) -> Result<Option<(f64, f64)>> {
    match *h {
        Hypothesis::Empty => Ok(None),
        Hypothesis::Interval { lo: a, hi: b } => {
            if a < lo || b > hi {
                return Err(Error::invalid(format!(
                    "interval [{a}, {b}] leaves the domain [{lo}, {hi}]"
                )));
            }
            Ok(Some((a, b)))
        }
        _ => Err(Error::invalid("symmetric difference needs interval hypotheses")),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// A risk functional bound to its target (and domain, for intervals).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskFn {
    kind: RiskKind,
    theta_star: Hypothesis,
    domain: Option<(f64, f64)>,
}

impl RiskFn {
    pub fn param_distance(theta_star: Hypothesis) -> Self {
        RiskFn {
            kind: RiskKind::ParamDistance,
            theta_star,
            domain: None,
        }
    }

    pub fn angular_01(theta_star: Vec<f64>) -> Self {
        RiskFn {
            kind: RiskKind::Angular01,
            theta_star: Hypothesis::Vector(theta_star),
            domain: None,
        }
    }

    pub fn symmetric_difference(theta_star: Hypothesis, domain_lo: f64, domain_hi: f64) -> Self {
        RiskFn {
            kind: RiskKind::SymmetricDifference,
            theta_star,
            domain: Some((domain_lo, domain_hi)),
        }
    }

    pub fn kind(&self) -> RiskKind {
        self.kind
    }

    pub fn theta_star(&self) -> &Hypothesis {
        &self.theta_star
    }

    pub fn eval(&self, theta_hat: &Hypothesis) -> Result<f64> {
        match self.kind {
            RiskKind::ParamDistance => risk_param_distance(theta_hat, &self.theta_star),
            RiskKind::Angular01 => {
                let hat = theta_hat
                    .coords()
                    .ok_or(Error::UndefinedRisk("angular risk needs a vector hypothesis"))?;
                let star = self.theta_star.coords().expect("vector target");
                risk_angular_01(hat, star)
            }
            RiskKind::SymmetricDifference => {
                let (lo, hi) = self.domain.expect("interval risk carries a domain");
                risk_symmetric_difference(theta_hat, &self.theta_star, lo, hi)
            }
        }
    }
}
