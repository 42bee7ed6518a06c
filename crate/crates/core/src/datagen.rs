//! Seeded samplers for the synthetic data distributions.
//!
//! All randomness comes from ChaCha8 (a counter-based stream cipher
//! generator) seeded with a 64-bit [`Seed`]. Uniform doubles use the 53-bit
//! multiply construction and normals use the Marsaglia polar method, so a
//! given `(parameters, seed)` pair always yields the same set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{Example, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> SampleRng {
        SampleRng {
            inner: ChaCha8Rng::seed_from_u64(self.0),
            spare: None,
        }
    }

    /// Child seed for an indexed sub-stream (restarts, chunks, ...).
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(
            splitmix64(self.0 ^ 0xA076_1D64_78BD_642F).wrapping_add(index),
        ))
    }
}

/// SplitMix64 finalizer. A bijection on `u64`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` at sample size `n`.
///
/// `splitmix64(splitmix64(master + φ·(n+1)) + trial_index)`: the outer map is
/// a bijection, so distinct trial indices under one `(master, n)` always get
/// distinct seeds.
pub fn trial_seed(master: Seed, n: u64, trial_index: u64) -> Seed {
    let base = splitmix64(
        master
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(n.wrapping_add(1))),
    );
    Seed(splitmix64(base.wrapping_add(trial_index)))
}

/// Random source with a cached second polar-method normal.
pub struct SampleRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SampleRng {
    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer on `[lo, hi]`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.gen_range(lo..=hi)
    }

    pub fn bernoulli_half(&mut self) -> bool {
        self.inner.gen::<u64>() >> 63 == 1
    }

    /// Standard normal via the Marsaglia polar method.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * factor);
                return u * factor;
            }
        }
    }
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("sample size n must be at least 1"));
    }
    Ok(())
}

/// `x ~ N(θ*, 1)`, unlabeled.
pub fn sample_gauss1d(n: usize, theta_star: f64, seed: Seed) -> Result<TrainingSet> {
    require_n(n)?;
    let mut rng = seed.rng();
    let xs: Vec<f64> = (0..n).map(|_| theta_star + rng.normal()).collect();
    TrainingSet::from_scalars(&xs)
}

/// Threshold label for the 1D margin task; `x = 0` is positive.
pub fn margin_label(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `x ~ U[-1, 1]`, `y = +1` iff `x ≥ 0`.
pub fn sample_margin1d(n: usize, seed: Seed) -> Result<TrainingSet> {
    require_n(n)?;
    let mut rng = seed.rng();
    let items: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.uniform_in(-1.0, 1.0);
            (x, margin_label(x))
        })
        .collect();
    TrainingSet::from_labeled_scalars(&items)
}

/// The default halfspace / regression target `(1/√d, …, 1/√d)`.
pub fn default_direction(d: usize) -> Vec<f64> {
    vec![1.0 / (d as f64).sqrt(); d]
}

fn check_target(d: usize, theta_star: &[f64]) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("dimension d must be at least 1"));
    }
    if theta_star.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta_star.len(),
        });
    }
    Ok(())
}

/// `x ~ N(0, I_d)`, `y = +1` iff `xᵀθ* > 0`.
pub fn sample_halfspace(n: usize, d: usize, theta_star: &[f64], seed: Seed) -> Result<TrainingSet> {
    require_n(n)?;
    check_target(d, theta_star)?;
    if theta_star.iter().all(|&v| v == 0.0) {
        return Err(Error::invalid("halfspace target must be nonzero"));
    }
    let mut rng = seed.rng();
    let examples = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let score: f64 = x.iter().zip(theta_star).map(|(a, b)| a * b).sum();
            let y = if score > 0.0 { 1.0 } else { -1.0 };
            Example::labeled(x, y)
        })
        .collect();
    TrainingSet::new(d, examples)
}

/// `x ~ N(0, I_d)`, `y = xᵀθ* + N(0, noise_var)`.
pub fn sample_linreg(n: usize, d: usize, theta_star: &[f64], noise_var: f64, seed: Seed) -> Result<TrainingSet> {
    require_n(n)?;
    check_target(d, theta_star)?;
    if !(noise_var >= 0.0) {
        return Err(Error::invalid(format!(
            "noise variance must be nonnegative, got {noise_var}"
        )));
    }
    let sd = noise_var.sqrt();
    let mut rng = seed.rng();
    let examples = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let mean: f64 = x.iter().zip(theta_star).map(|(a, b)| a * b).sum();
            let noise = rng.normal();
            Example::labeled(x, mean + sd * noise)
        })
        .collect();
    TrainingSet::new(d, examples)
}

/// `x ~ U[0, θ*]`, unlabeled; the interval-endpoint MLE task.
pub fn sample_interval_uniform(n: usize, theta_star: f64, seed: Seed) -> Result<TrainingSet> {
    require_n(n)?;
    if !(theta_star > 0.0) {
        return Err(Error::invalid("interval endpoint must be positive"));
    }
    let mut rng = seed.rng();
    let xs: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.0, theta_star)).collect();
    TrainingSet::from_scalars(&xs)
}

/// Integer grid points uniform on `[domain_lo, domain_hi]`, labeled +1 inside
/// `[target_lo, target_hi]` and -1 outside.
pub fn sample_grid_interval(n: usize, domain: (i64, i64), target: (i64, i64), seed: Seed) -> Result<TrainingSet> {
    require_n(n)?;
    let (lo, hi) = domain;
    let (a, b) = target;
    if hi <= lo {
        return Err(Error::invalid("grid domain must contain at least two points"));
    }
    if !(lo <= a && a <= b && b <= hi) {
        return Err(Error::invalid("target interval must lie inside the domain"));
    }
    let mut rng = seed.rng();
    let items: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.int_in(lo, hi);
            let y = if a <= x && x <= b { 1.0 } else { -1.0 };
            (x as f64, y)
        })
        .collect();
    TrainingSet::from_labeled_scalars(&items)
}
