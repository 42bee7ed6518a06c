//! Domain values shared across the crate: examples, training sets, subset
//! masks and hypotheses.

use std::fmt;

use crate::error::{Error, Result};

/// One item `z = (x, y)`. `y` is absent for unsupervised tasks.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: Vec<f64>,
    pub y: Option<f64>,
}

impl Example {
    pub fn unlabeled(x: Vec<f64>) -> Self {
        Example { x, y: None }
    }

    pub fn labeled(x: Vec<f64>, y: f64) -> Self {
        Example { x, y: Some(y) }
    }

    /// First coordinate; convenient for the 1D tasks.
    pub fn x0(&self) -> f64 {
        self.x[0]
    }
}

/// Ordered multiset of examples. Index identity matters: masks refer to
/// positions in this list.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    d: usize,
    examples: Vec<Example>,
}

impl TrainingSet {
    pub fn new(d: usize, examples: Vec<Example>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        for e in &examples {
            if e.x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: e.x.len(),
                });
            }
            if e.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("feature values must be finite"));
            }
            if let Some(y) = e.y {
                if !y.is_finite() {
                    return Err(Error::invalid("labels must be finite"));
                }
            }
        }
        Ok(TrainingSet { d, examples })
    }

    /// Unlabeled 1D set from raw values.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        Self::new(1, xs.iter().map(|&x| Example::unlabeled(vec![x])).collect())
    }

    /// Labeled 1D set from `(x, y)` pairs.
    pub fn from_labeled_scalars(items: &[(f64, f64)]) -> Result<Self> {
        Self::new(1, items.iter().map(|&(x, y)| Example::labeled(vec![x], y)).collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn get(&self, i: usize) -> &Example {
        &self.examples[i]
    }

    pub fn is_labeled(&self) -> bool {
        !self.examples.is_empty() && self.examples.iter().all(|e| e.y.is_some())
    }

    /// Fails unless every example carries a label in {-1, +1}.
    pub fn check_binary_labels(&self) -> Result<()> {
        for e in &self.examples {
            match e.y {
                Some(y) if y == 1.0 || y == -1.0 => {}
                Some(y) => {
                    return Err(Error::invalid(format!(
                        "classification label must be -1 or +1, got {y}"
                    )))
                }
                None => return Err(Error::invalid("classification example is missing a label")),
            }
        }
        Ok(())
    }

    /// View over every example.
    pub fn all(&self) -> Subset<'_> {
        Subset {
            set: self,
            indices: None,
        }
    }

    /// View over the given strictly increasing indices.
    pub fn view<'a>(&'a self, indices: &'a [usize]) -> Subset<'a> {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&i| i < self.len()));
        Subset {
            set: self,
            indices: Some(indices),
        }
    }

    /// Materializes the masked examples as a fresh set.
    pub fn select(&self, mask: &SubsetMask) -> Result<TrainingSet> {
        if mask.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: mask.len(),
            });
        }
        let examples = mask.indices().into_iter().map(|i| self.examples[i].clone()).collect();
        Ok(TrainingSet { d: self.d, examples })
    }
}

/// Borrowed view of a training set restricted to an index set. Learners
/// consume views so the search engines never copy examples.
#[derive(Debug, Clone, Copy)]
pub struct Subset<'a> {
    set: &'a TrainingSet,
    indices: Option<&'a [usize]>,
}

impl<'a> Subset<'a> {
    pub fn dim(&self) -> usize {
        self.set.d
    }

    pub fn len(&self) -> usize {
        self.indices.map_or(self.set.len(), |ix| ix.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> SubsetIter<'a> {
        match self.indices {
            None => SubsetIter::All(self.set.examples.iter()),
            Some(ix) => SubsetIter::Indexed {
                examples: &self.set.examples,
                indices: ix.iter(),
            },
        }
    }

    /// Position in the parent set of the `k`-th example in this view.
    pub fn parent_index(&self, k: usize) -> usize {
        self.indices.map_or(k, |ix| ix[k])
    }
}

pub enum SubsetIter<'a> {
    All(std::slice::Iter<'a, Example>),
    Indexed {
        examples: &'a [Example],
        indices: std::slice::Iter<'a, usize>,
    },
}

impl<'a> Iterator for SubsetIter<'a> {
    type Item = &'a Example;

    fn next(&mut self) -> Option<&'a Example> {
        match self {
            SubsetIter::All(it) => it.next(),
            SubsetIter::Indexed { examples, indices } => indices.next().map(|&i| &examples[i]),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self {
            SubsetIter::All(it) => it.size_hint(),
            SubsetIter::Indexed { indices, .. } => indices.size_hint(),
        }
    }
}

impl ExactSizeIterator for SubsetIter<'_> {}

/// Binary indicator vector `b` over the items of a training set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    bits: Vec<bool>,
}

impl SubsetMask {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        SubsetMask { bits }
    }

    pub fn all(n: usize) -> Self {
        SubsetMask { bits: vec![true; n] }
    }

    pub fn none(n: usize) -> Self {
        SubsetMask { bits: vec![false; n] }
    }

    /// Mask of length `n` selecting `indices`; out-of-range indices are an error.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::invalid(format!("index {i} out of range for n = {n}")));
            }
            bits[i] = true;
        }
        Ok(SubsetMask { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    /// Selected positions, strictly increasing.
    pub fn indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Learner output.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    Scalar(f64),
    Vector(Vec<f64>),
    Interval {
        lo: f64,
        hi: f64,
    },
    /// No hypothesis could be formed, e.g. a consistent learner without
    /// positive items.
    Empty,
}

impl Hypothesis {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::invalid(format!("interval requires lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(Hypothesis::Interval { lo, hi })
    }

    /// Parameter coordinates for point hypotheses.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Hypothesis::Scalar(v) => Some(std::slice::from_ref(v)),
            Hypothesis::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Flat numeric representation used by the serializers: the
    /// coordinates, `[lo, hi]` for intervals and nothing for `Empty`.
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Hypothesis::Scalar(v) => vec![*v],
            Hypothesis::Vector(v) => v.clone(),
            Hypothesis::Interval { lo, hi } => vec![*lo, *hi],
            Hypothesis::Empty => Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Hypothesis::Empty)
    }
}
