//! Regularized convex ERM: `argmin_θ Σ ℓ̃(xᵢᵀθ, yᵢ) + λ/2 ‖θ‖²`.
//!
//! Two routes to the optimum are provided: a generic damped Newton solver
//! over any smooth [`ScoreLoss`], and a direct Cholesky solve of the normal
//! equations for the squared loss.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::learners::{Learner, SolveReport};
use crate::types::{Hypothesis, Subset};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_NEWTON_ITERS: usize = 200;

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// A per-example loss written in terms of the linear score `s = xᵀθ`.
pub trait ScoreLoss {
    fn value(&self, score: f64, y: f64) -> f64;
    /// `∂ℓ/∂s`
    fn slope(&self, score: f64, y: f64) -> f64;
    /// `∂²ℓ/∂s²`
    fn curvature(&self, score: f64, y: f64) -> f64;
}

/// `log(1 + exp(−y s))` for labels in {-1, +1}.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogisticLoss;

impl ScoreLoss for LogisticLoss {
    fn value(&self, score: f64, y: f64) -> f64 {
        let m = y * score;
        if m > 0.0 {
            (-m).exp().ln_1p()
        } else {
            -m + m.exp().ln_1p()
        }
    }

    fn slope(&self, score: f64, y: f64) -> f64 {
        // −y σ(−m) with σ(−m) = 1 / (1 + e^m)
        -y / (1.0 + (y * score).exp())
    }

    fn curvature(&self, score: f64, _y: f64) -> f64 {
        let p = 1.0 / (1.0 + (-score).exp());
        p * (1.0 - p)
    }
}

/// `(s − y)²`, no ½ factor.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredLoss;

impl ScoreLoss for SquaredLoss {
    fn value(&self, score: f64, y: f64) -> f64 {
        (score - y) * (score - y)
    }

    fn slope(&self, score: f64, y: f64) -> f64 {
        2.0 * (score - y)
    }

    fn curvature(&self, _score: f64, _y: f64) -> f64 {
        2.0
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

fn label(y: Option<f64>) -> Result<f64> {
    y.ok_or_else(|| Error::invalid("ERM learners need labeled examples"))
}

fn score(x: &[f64], theta: &DVector<f64>) -> f64 {
    x.iter().zip(theta.iter()).map(|(a, b)| a * b).sum()
}

/// Regularized empirical objective at `θ`.
pub fn objective<L: ScoreLoss>(data: &Subset<'_>, loss: &L, lambda: f64, theta: &DVector<f64>) -> Result<f64> {
    let mut total = 0.5 * lambda * theta.norm_squared();
    for e in data.iter() {
        total += loss.value(score(&e.x, theta), label(e.y)?);
    }
    Ok(total)
}

/// Analytic gradient of [`objective`].
pub fn gradient<L: ScoreLoss>(data: &Subset<'_>, loss: &L, lambda: f64, theta: &DVector<f64>) -> Result<DVector<f64>> {
    let mut g = theta * lambda;
    for e in data.iter() {
        let w = loss.slope(score(&e.x, theta), label(e.y)?);
        for (gj, xj) in g.iter_mut().zip(&e.x) {
            *gj += w * xj;
        }
    }
    Ok(g)
}

fn hessian<L: ScoreLoss>(data: &Subset<'_>, loss: &L, lambda: f64, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
    let d = theta.len();
    let mut h = DMatrix::<f64>::identity(d, d) * lambda;
    for e in data.iter() {
        let w = loss.curvature(score(&e.x, theta), label(e.y)?);
        for j in 0..d {
            let wx = w * e.x[j];
            for k in 0..=j {
                h[(j, k)] += wx * e.x[k];
            }
        }
    }
    for j in 0..d {
        for k in 0..j {
            h[(k, j)] = h[(j, k)];
        }
    }
    Ok(h)
}

/// Damped Newton with step halving on the regularized objective, started at
/// the origin. Stops when the gradient norm (the stationarity residual)
/// falls to `tol`.
pub fn newton_erm<L: ScoreLoss>(
    data: Subset<'_>,
    loss: &L,
    lambda: f64,
    tol: f64,
    max_iters: usize,
) -> Result<SolveReport> {
    check_lambda(lambda)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let d = data.dim();
    let mut theta = DVector::<f64>::zeros(d);
    let mut f = objective(&data, loss, lambda, &theta)?;
    let mut g = gradient(&data, loss, lambda, &theta)?;
    let mut g_norm = g.norm();
    let mut iterations = 0;
    while g_norm > tol {
        if iterations == max_iters {
            return Err(Error::NonConvergence {
                iterations,
                residual: g_norm,
            });
        }
        iterations += 1;
        let h = hessian(&data, loss, lambda, &theta)?;
        let step = h
            .cholesky()
            .expect("λI + PSD curvature is positive definite")
            .solve(&(-&g));
        let slope = g.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = &theta + &step * t;
            let f_cand = objective(&data, loss, lambda, &cand)?;
            if f_cand <= f + ARMIJO_C * t * slope {
                let g_cand = gradient(&data, loss, lambda, &cand)?;
                theta = cand;
                f = f_cand;
                g_norm = g_cand.norm();
                g = g_cand;
                accepted = true;
                break;
            }
            // At the floating-point floor of the objective Armijo stalls;
            // accept any step that still shrinks the residual.
            let g_cand = gradient(&data, loss, lambda, &cand)?;
            if g_cand.norm() < g_norm {
                theta = cand;
                f = f_cand;
                g_norm = g_cand.norm();
                g = g_cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                iterations,
                residual: g_norm,
            });
        }
    }
    Ok(SolveReport {
        theta_hat: Hypothesis::Vector(theta.iter().copied().collect()),
        kkt_residual_norm: g_norm,
        iterations,
    })
}

/// L2-regularized logistic regression.
pub fn learn_logistic_erm(data: Subset<'_>, lambda: f64, tol: f64) -> Result<SolveReport> {
    for e in data.iter() {
        match e.y {
            Some(y) if y == 1.0 || y == -1.0 => {}
            _ => return Err(Error::invalid("logistic regression needs labels in {-1, +1}")),
        }
    }
    newton_erm(data, &LogisticLoss, lambda, tol, DEFAULT_MAX_NEWTON_ITERS)
}

/// Ridge regression with loss `(xᵀθ − y)²`: solves
/// `(λ/2·I + Σ xᵢxᵢᵀ) θ = Σ yᵢxᵢ` by Cholesky.
pub fn learn_ridge_erm(data: Subset<'_>, lambda: f64) -> Result<SolveReport> {
    check_lambda(lambda)?;
    let d = data.dim();
    let mut a = DMatrix::<f64>::identity(d, d) * (0.5 * lambda);
    let mut b = DVector::<f64>::zeros(d);
    for e in data.iter() {
        let y = label(e.y)?;
        for j in 0..d {
            b[j] += y * e.x[j];
            for k in 0..=j {
                a[(j, k)] += e.x[j] * e.x[k];
            }
        }
    }
    for j in 0..d {
        for k in 0..j {
            a[(k, j)] = a[(j, k)];
        }
    }
    let theta = a
        .clone()
        .cholesky()
        .expect("λ/2·I + Gram matrix is positive definite")
        .solve(&b);
    // λθ + 2Σ(xᵀθ − y)x = 2(Aθ − b)
    let residual = ((&a * &theta - &b) * 2.0).norm();
    Ok(SolveReport {
        theta_hat: Hypothesis::Vector(theta.iter().copied().collect()),
        kkt_residual_norm: residual,
        iterations: 1,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct LogisticErm {
    lambda: f64,
    tol: f64,
}

impl LogisticErm {
    pub fn new(lambda: f64, tol: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(LogisticErm { lambda, tol })
    }
}

impl Learner for LogisticErm {
    fn name(&self) -> &'static str {
        "logistic"
    }

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport> {
        learn_logistic_erm(data, self.lambda, self.tol)
    }

    fn is_erm(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RidgeErm {
    lambda: f64,
}

impl RidgeErm {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(RidgeErm { lambda })
    }
}

impl Learner for RidgeErm {
    fn name(&self) -> &'static str {
        "ridge"
    }

    fn fit(&self, data: Subset<'_>) -> Result<SolveReport> {
        learn_ridge_erm(data, self.lambda)
    }

    fn is_erm(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{default_direction, sample_halfspace, sample_linreg, Seed};
    use crate::types::{Example, TrainingSet};

    fn vec_of(h: &Hypothesis) -> Vec<f64> {
        h.coords().unwrap().to_vec()
    }

    /// Bisection on 0.1θ = 1/(1 + e^θ).
    fn bisect_single_logistic() -> f64 {
        let f = |t: f64| 0.1 * t - 1.0 / (1.0 + t.exp());
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn logistic_empty_is_origin() {
        let s = TrainingSet::new(2, vec![]).unwrap();
        let r = learn_logistic_erm(s.all(), 0.1, 1e-8).unwrap();
        assert_eq!(r.theta_hat, Hypothesis::Vector(vec![0.0, 0.0]));
    }

    #[test]
    fn logistic_single_point_matches_bisection() {
        let s = TrainingSet::from_labeled_scalars(&[(1.0, 1.0)]).unwrap();
        let r = learn_logistic_erm(s.all(), 0.1, 1e-12).unwrap();
        let oracle = bisect_single_logistic();
        assert!((vec_of(&r.theta_hat)[0] - oracle).abs() < 1e-10);
        assert!((oracle - 1.634).abs() < 1e-3);
        assert!(r.kkt_residual_norm <= 1e-12);
    }

    #[test]
    fn logistic_negation_symmetry() {
        let s = sample_halfspace(20, 3, &default_direction(3), Seed(1)).unwrap();
        let neg = TrainingSet::new(
            3,
            s.examples()
                .iter()
                .map(|e| Example::labeled(e.x.iter().map(|v| -v).collect(), -e.y.unwrap()))
                .collect(),
        )
        .unwrap();
        let a = vec_of(&learn_logistic_erm(s.all(), 0.1, 1e-10).unwrap().theta_hat);
        let b = vec_of(&learn_logistic_erm(neg.all(), 0.1, 1e-10).unwrap().theta_hat);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn logistic_rejects_bad_labels_and_lambda() {
        let s = TrainingSet::from_labeled_scalars(&[(1.0, 0.3)]).unwrap();
        assert!(learn_logistic_erm(s.all(), 0.1, 1e-8).is_err());
        let s = TrainingSet::from_labeled_scalars(&[(1.0, 1.0)]).unwrap();
        assert!(learn_logistic_erm(s.all(), 0.0, 1e-8).is_err());
        assert!(learn_logistic_erm(s.all(), 0.1, 0.0).is_err());
    }

    #[test]
    fn logistic_reports_non_convergence() {
        let s = sample_halfspace(30, 4, &default_direction(4), Seed(2)).unwrap();
        let err = newton_erm(s.all(), &LogisticLoss, 0.1, 1e-8, 1).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 1, .. }));
    }

    /// Plain gradient descent on λ/2θ² + (θ − 2)², independent of the solver.
    #[test]
    fn ridge_single_point() {
        let s = TrainingSet::from_labeled_scalars(&[(1.0, 2.0)]).unwrap();
        let r = learn_ridge_erm(s.all(), 0.1).unwrap();
        let mut t = 0.0f64;
        for _ in 0..10_000 {
            t -= 0.2 * (0.1 * t + 2.0 * (t - 2.0));
        }
        let got = vec_of(&r.theta_hat)[0];
        assert!((got - 2.0 / 1.05).abs() < 1e-12);
        assert!((got - t).abs() < 1e-10);
    }

    #[test]
    fn ridge_empty_is_origin() {
        let s = TrainingSet::new(3, vec![]).unwrap();
        let r = learn_ridge_erm(s.all(), 0.1).unwrap();
        assert_eq!(r.theta_hat, Hypothesis::Vector(vec![0.0; 3]));
        assert_eq!(r.kkt_residual_norm, 0.0);
    }

    #[test]
    fn ridge_recovers_noiseless_target() {
        let star = [0.5, -1.0, 2.0];
        let s = sample_linreg(60, 3, &star, 0.0, Seed(3)).unwrap();
        let r = learn_ridge_erm(s.all(), 1e-8).unwrap();
        for (u, v) in vec_of(&r.theta_hat).iter().zip(&star) {
            assert!((u - v).abs() < 1e-3);
        }
    }

    #[test]
    fn newton_on_squared_loss_matches_closed_form() {
        for seed in 0..20 {
            let d = 1 + (seed as usize % 6);
            let s = sample_linreg(15, d, &default_direction(d), 0.1, Seed(seed)).unwrap();
            let closed = vec_of(&learn_ridge_erm(s.all(), 0.1).unwrap().theta_hat);
            let newton = vec_of(&newton_erm(s.all(), &SquaredLoss, 0.1, 1e-12, 50).unwrap().theta_hat);
            for (u, v) in closed.iter().zip(&newton) {
                assert!((u - v).abs() < 1e-8, "{u} vs {v}");
            }
        }
    }

    fn central_difference<L: ScoreLoss>(s: &TrainingSet, loss: &L, lambda: f64, theta: &DVector<f64>) -> DVector<f64> {
        let h = 1e-6;
        DVector::from_fn(theta.len(), |j, _| {
            let mut up = theta.clone();
            let mut dn = theta.clone();
            up[j] += h;
            dn[j] -= h;
            (objective(&s.all(), loss, lambda, &up).unwrap() - objective(&s.all(), loss, lambda, &dn).unwrap())
                / (2.0 * h)
        })
    }

    #[test]
    fn gradients_match_finite_differences() {
        let s = sample_halfspace(25, 3, &default_direction(3), Seed(4)).unwrap();
        let r = sample_linreg(25, 3, &default_direction(3), 0.1, Seed(5)).unwrap();
        let theta = DVector::from_vec(vec![0.3, -0.7, 1.1]);
        for (grad, fd) in [
            (
                gradient(&s.all(), &LogisticLoss, 0.1, &theta).unwrap(),
                central_difference(&s, &LogisticLoss, 0.1, &theta),
            ),
            (
                gradient(&r.all(), &SquaredLoss, 0.1, &theta).unwrap(),
                central_difference(&r, &SquaredLoss, 0.1, &theta),
            ),
        ] {
            let rel = (&grad - &fd).norm() / grad.norm().max(1e-12);
            assert!(rel < 1e-5, "relative error {rel}");
        }
    }
}
