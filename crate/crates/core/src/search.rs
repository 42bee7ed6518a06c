//! Combinatorial engines for the outer (binary) problem `min_b R(θ̂(b))`.
//!
//! Engines talk to the objective through [`MaskEvaluator`], which receives
//! the selected indices of a candidate mask in increasing order. Every
//! engine breaks ties toward the lexicographically smallest index set, so a
//! result never depends on evaluation order.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::datagen::Seed;
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::types::SubsetMask;

/// Default largest `n` for exhaustive search (about 4M masks).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 22;
/// Default largest number of k-subsets a fixed-size search may visit.
pub const DEFAULT_EVAL_BUDGET: u128 = 50_000_000;

/// Outer objective: selected indices → nonnegative value. Must be pure.
pub trait MaskEvaluator: Sync {
    fn eval(&self, selected: &[usize]) -> Result<f64>;
}

impl<F> MaskEvaluator for F
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    fn eval(&self, selected: &[usize]) -> Result<f64> {
        self(selected)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub mask: SubsetMask,
    pub value: f64,
    pub evaluations: u64,
    /// False when a local search stopped on its iteration cap.
    pub converged: bool,
}

/// `(value, index set)` ordering used for every argmin.
fn candidate_cmp(a: (f64, &[usize]), b: (f64, &[usize])) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1))
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    indices: Vec<usize>,
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        candidate_cmp((self.value, &self.indices), (other.value, &other.indices)) == Ordering::Less
    }

    fn offer(slot: &mut Option<Best>, value: f64, indices: &[usize]) {
        let wins = match slot {
            None => true,
            Some(b) => candidate_cmp((value, indices), (b.value, &b.indices)) == Ordering::Less,
        };
        if wins {
            *slot = Some(Best {
                value,
                indices: indices.to_vec(),
            });
        }
    }

    fn min(a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Calls `f` on every subset of `{0..n}`, in increasing order of the
/// mask's integer encoding.
pub fn for_each_subset(n: usize, mut f: impl FnMut(&[usize])) {
    assert!(n < 64, "subset enumeration limited to n < 64");
    let mut buf = Vec::with_capacity(n);
    for m in 0u64..(1u64 << n) {
        fill_indices(m, &mut buf);
        f(&buf);
    }
}

fn fill_indices(mut m: u64, buf: &mut Vec<usize>) {
    buf.clear();
    while m != 0 {
        buf.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
}

/// Calls `f` on every k-subset of `{0..n}` in lexicographic order without
/// allocating per subset.
pub fn for_each_subset_fixed_k(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // rightmost position that can still advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Iterator over all `C(n, k)` strictly increasing index sets, lexicographic.
pub fn iterate_subsets_fixed_k(n: usize, k: usize) -> SubsetsFixedK {
    SubsetsFixedK {
        n,
        k,
        next: (k <= n).then(|| (0..k).collect()),
    }
}

pub struct SubsetsFixedK {
    n: usize,
    k: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for SubsetsFixedK {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let (n, k) = (self.n, self.k);
        let mut following = current.clone();
        let advance = (0..k).rev().find(|&i| following[i] < n - k + i);
        if let Some(i) = advance {
            following[i] += 1;
            for j in i + 1..k {
                following[j] = following[j - 1] + 1;
            }
            self.next = Some(following);
        }
        Some(current)
    }
}

fn outcome(n: usize, best: Best, evaluations: u64, converged: bool) -> Result<SearchOutcome> {
    Ok(SearchOutcome {
        mask: SubsetMask::from_indices(n, &best.indices)?,
        value: best.value,
        evaluations,
        converged,
    })
}

/// Global minimum over all `2ⁿ` masks, the empty mask included.
pub fn exhaustive_min(n: usize, eval: &dyn MaskEvaluator, cap: usize) -> Result<SearchOutcome> {
    if n > cap.min(63) {
        return Err(Error::CapExceeded { n, cap: cap.min(63) });
    }
    let total = 1u64 << n;
    let chunk = total.min(1 << 12);
    let chunks = total.div_ceil(chunk);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Option<Best>> {
            let mut local = None;
            let mut buf = Vec::with_capacity(n);
            for m in c * chunk..((c + 1) * chunk).min(total) {
                fill_indices(m, &mut buf);
                let v = eval.eval(&buf)?;
                Best::offer(&mut local, v, &buf);
            }
            Ok(local)
        })
        .try_reduce(|| None, |a, b| Ok(Best::min(a, b)))?
        .expect("at least the empty mask was evaluated");
    outcome(n, best, total, true)
}

/// Minimum over all masks with exactly `k` selected items.
pub fn exhaustive_min_fixed_k(n: usize, k: usize, eval: &dyn MaskEvaluator, budget: u128) -> Result<SearchOutcome> {
    if k > n {
        return Err(Error::invalid(format!("subset size k = {k} exceeds n = {n}")));
    }
    let required = binomial(n as u64, k as u64);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut best: Option<Best> = None;
    let mut failure = None;
    for_each_subset_fixed_k(n, k, |ix| {
        if failure.is_some() {
            return;
        }
        match eval.eval(ix) {
            // lexicographic enumeration: the first minimizer seen wins ties
            Ok(v) => {
                if best.as_ref().is_none_or(|b| v.total_cmp(&b.value) == Ordering::Less) {
                    best = Some(Best {
                        value: v,
                        indices: ix.to_vec(),
                    });
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    outcome(n, best.expect("C(n, k) >= 1"), required as u64, true)
}

/// Forward selection from the empty set, adding the best item at each step
/// until everything is included; returns the best prefix seen.
pub fn greedy_forward_min(n: usize, eval: &dyn MaskEvaluator) -> Result<SearchOutcome> {
    let mut current: Vec<usize> = Vec::with_capacity(n);
    let mut in_set = vec![false; n];
    let mut best = Best {
        value: eval.eval(&[])?,
        indices: Vec::new(),
    };
    let mut evaluations = 1u64;
    let mut cand = Vec::with_capacity(n);
    for _ in 0..n {
        let mut step: Option<(f64, usize)> = None;
        for i in (0..n).filter(|&i| !in_set[i]) {
            cand.clear();
            cand.extend_from_slice(&current);
            let pos = cand.partition_point(|&j| j < i);
            cand.insert(pos, i);
            let v = eval.eval(&cand)?;
            evaluations += 1;
            if step.is_none_or(|(bv, _)| v.total_cmp(&bv) == Ordering::Less) {
                step = Some((v, i));
            }
        }
        let (v, i) = step.expect("at least one item remains");
        let pos = current.partition_point(|&j| j < i);
        current.insert(pos, i);
        in_set[i] = true;
        let prefix = Best {
            value: v,
            indices: current.clone(),
        };
        if prefix.better_than(&best) {
            best = prefix;
        }
    }
    outcome(n, best, evaluations, true)
}

/// Steepest-descent single-bit flips from `init` and from `restarts`
/// random masks drawn from `seed`. Each descent makes at most `max_iters`
/// moves.
pub fn local_swap_min(
    n: usize,
    eval: &dyn MaskEvaluator,
    init: &SubsetMask,
    max_iters: usize,
    restarts: usize,
    seed: Seed,
) -> Result<SearchOutcome> {
    if init.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: init.len(),
        });
    }
    let mut evaluations = 0u64;
    let mut winner: Option<(Best, bool)> = None;
    for r in 0..=restarts {
        let start = if r == 0 {
            init.clone()
        } else {
            let mut rng = seed.derive(r as u64).rng();
            SubsetMask::from_bits((0..n).map(|_| rng.bernoulli_half()).collect())
        };
        let (best, converged) = descend(n, eval, start, max_iters, &mut evaluations)?;
        let replace = match &winner {
            None => true,
            Some((w, _)) => best.better_than(w),
        };
        if replace {
            winner = Some((best, converged));
        }
    }
    let (best, converged) = winner.expect("at least one descent");
    outcome(n, best, evaluations, converged)
}

fn descend(
    n: usize,
    eval: &dyn MaskEvaluator,
    mut mask: SubsetMask,
    max_iters: usize,
    evaluations: &mut u64,
) -> Result<(Best, bool)> {
    let mut indices = mask.indices();
    let mut value = eval.eval(&indices)?;
    *evaluations += 1;
    let mut moves = 0;
    loop {
        let mut step: Option<Best> = None;
        for i in 0..n {
            mask.flip(i);
            let cand = mask.indices();
            mask.flip(i);
            let v = eval.eval(&cand)?;
            *evaluations += 1;
            Best::offer(&mut step, v, &cand);
        }
        let step = step.expect("n >= 1 flips");
        if step.value.total_cmp(&value) != Ordering::Less {
            return Ok((Best { value, indices }, true));
        }
        if moves == max_iters {
            return Ok((Best { value, indices }, false));
        }
        mask = SubsetMask::from_indices(n, &step.indices)?;
        indices = step.indices;
        value = step.value;
        moves += 1;
    }
}

/// Exact number of ordered pairs of k-subsets of an n-set sharing between 1
/// and k−1 elements: `Σ_{t=1}^{k−1} C(n,2k−t)·C(2k−t,t)·C(2k−2t,k−t)`.
pub fn count_overlapping_pairs_exact(n: u64, k: u64) -> Result<u128> {
    if k == 0 || 2 * k > n {
        return Err(Error::invalid(format!("need 1 <= k and 2k <= n, got n = {n}, k = {k}")));
    }
    Ok((1..k)
        .map(|t| binomial(n, 2 * k - t) * binomial(2 * k - t, t) * binomial(2 * k - 2 * t, k - t))
        .sum())
}

/// Upper bound `4ᵏ·C(2k,k)·C(n,2k−1)` on the same count, valid for `n ≥ 4k`.
pub fn overlapping_pairs_bound(n: u64, k: u64) -> u128 {
    4u128.pow(k as u32) * binomial(2 * k, k) * binomial(n, 2 * k - 1)
}

/// A search strategy selectable at runtime.
pub trait SearchEngine: Send + Sync {
    fn name(&self) -> &'static str;

    fn minimize(&self, n: usize, eval: &dyn MaskEvaluator, seed: Seed) -> Result<SearchOutcome>;
}

#[derive(Debug, Clone, Copy)]
pub struct Exhaustive {
    pub cap: usize,
}

impl SearchEngine for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn minimize(&self, n: usize, eval: &dyn MaskEvaluator, _seed: Seed) -> Result<SearchOutcome> {
        exhaustive_min(n, eval, self.cap)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedK {
    pub k: usize,
    pub budget: u128,
}

impl SearchEngine for FixedK {
    fn name(&self) -> &'static str {
        "fixed-k"
    }

    fn minimize(&self, n: usize, eval: &dyn MaskEvaluator, _seed: Seed) -> Result<SearchOutcome> {
        if self.k == 0 {
            return Err(Error::invalid("fixed-k search needs k >= 1"));
        }
        exhaustive_min_fixed_k(n, self.k, eval, self.budget)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyForward;

impl SearchEngine for GreedyForward {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn minimize(&self, n: usize, eval: &dyn MaskEvaluator, _seed: Seed) -> Result<SearchOutcome> {
        greedy_forward_min(n, eval)
    }
}

/// Local search started from the all-ones mask.
#[derive(Debug, Clone, Copy)]
pub struct LocalSwap {
    /// Moves per descent; `None` means `50·n`.
    pub max_iters: Option<usize>,
    pub restarts: usize,
}

impl Default for LocalSwap {
    fn default() -> Self {
        LocalSwap {
            max_iters: None,
            restarts: 5,
        }
    }
}

impl SearchEngine for LocalSwap {
    fn name(&self) -> &'static str {
        "local-swap"
    }

    fn minimize(&self, n: usize, eval: &dyn MaskEvaluator, seed: Seed) -> Result<SearchOutcome> {
        if n == 0 {
            return Err(Error::invalid("local search needs at least one item"));
        }
        let max_iters = self.max_iters.unwrap_or(50 * n);
        local_swap_min(n, eval, &SubsetMask::all(n), max_iters, self.restarts, seed)
    }
}

/// Parameters shared by the engine factories.
#[derive(Debug, Clone, Copy)]
pub struct EngineParams {
    pub k: Option<usize>,
    pub exhaustive_cap: usize,
    pub budget: u128,
    pub max_iters: Option<usize>,
    pub restarts: usize,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            k: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            budget: DEFAULT_EVAL_BUDGET,
            max_iters: None,
            restarts: 5,
        }
    }
}

/// All built-in engines, keyed by name.
pub fn engines() -> Registry<dyn SearchEngine, EngineParams> {
    let mut reg: Registry<dyn SearchEngine, EngineParams> = Registry::new("search strategy");
    reg.register("exhaustive", |p| Ok(Box::new(Exhaustive { cap: p.exhaustive_cap })))
        .register("fixed-k", |p| {
            let k = p.k.ok_or_else(|| Error::invalid("fixed-k search needs --k"))?;
            Ok(Box::new(FixedK { k, budget: p.budget }))
        })
        .register("greedy", |_| Ok(Box::new(GreedyForward)))
        .register("local-swap", |p| {
            Ok(Box::new(LocalSwap {
                max_iters: p.max_iters,
                restarts: p.restarts,
            }))
        });
    reg
}
