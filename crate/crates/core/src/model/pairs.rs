use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::reduce::ordered_sum;

/// Unordered item pair stored as `(i, j)` with `i < j`.
pub type Pair = (usize, usize);

/// All unordered pairs of `n_items` items in lexicographic order.
pub fn all_pairs(n_items: usize) -> Vec<Pair> {
    let mut pairs = Vec::with_capacity(n_items * n_items.saturating_sub(1) / 2);
    for i in 0..n_items {
        for j in i + 1..n_items {
            pairs.push((i, j));
        }
    }
    pairs
}

fn canonical(n_items: usize, i: usize, j: usize) -> Result<Pair> {
    for index in [i, j] {
        if index >= n_items {
            return Err(Error::IndexOutOfRange { index, n_items });
        }
    }
    if i == j {
        return Err(Error::InvalidInput(format!("self-pair ({i}, {i})")));
    }
    Ok(if i < j { (i, j) } else { (j, i) })
}

/// Symmetric nonnegative pairwise counts for one view.
///
/// Only pairs with `i < j` are stored. Every observed pair carries a count,
/// possibly zero; pairs outside the observed set are missing data rather
/// than zero counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix {
    n_items: usize,
    pairs: Vec<Pair>,
    counts: Vec<f64>,
}

impl CountMatrix {
    /// Counts observed on every pair; pairs not listed in `entries` get count 0.
    /// Duplicate entries (in either orientation) are summed.
    pub fn dense<I>(n_items: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::with_observed(n_items, all_pairs(n_items), entries)
    }

    /// Counts observed only on `observed`. Every entry must fall inside it.
    pub fn with_observed<P, I>(n_items: usize, observed: P, entries: I) -> Result<Self>
    where
        P: IntoIterator<Item = Pair>,
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n_items < 2 {
            return Err(Error::InvalidInput(format!(
                "count matrix needs at least 2 items, got {n_items}"
            )));
        }
        let mut table: BTreeMap<Pair, f64> = BTreeMap::new();
        for (i, j) in observed {
            table.insert(canonical(n_items, i, j)?, 0.0);
        }
        for (i, j, count) in entries {
            if !count.is_finite() || count < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "count for pair ({i}, {j}) must be finite and nonnegative, got {count}"
                )));
            }
            let pair = canonical(n_items, i, j)?;
            match table.get_mut(&pair) {
                Some(slot) => *slot += count,
                None => {
                    return Err(Error::InvalidInput(format!(
                        "pair ({}, {}) has a count but is not observed",
                        pair.0, pair.1
                    )))
                }
            }
        }
        if table.is_empty() {
            return Err(Error::EmptySupport);
        }
        let (pairs, counts): (Vec<Pair>, Vec<f64>) = table.into_iter().unzip();
        if !counts.iter().any(|&c| c > 0.0) {
            return Err(Error::ZeroTotal);
        }
        Ok(Self {
            n_items,
            pairs,
            counts,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Observed pairs, sorted.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Counts aligned with [`pairs`](Self::pairs).
    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        ordered_sum(&self.counts)
    }

    pub fn is_complete(&self) -> bool {
        self.pairs.len() == self.n_items * (self.n_items - 1) / 2
    }

    /// Count for a pair in either orientation; `None` if the pair is unobserved.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let pair = canonical(self.n_items, i, j).ok()?;
        self.pairs
            .binary_search(&pair)
            .ok()
            .map(|idx| self.counts[idx])
    }

    /// The same counts observed on every pair, unobserved pairs taking count 0.
    pub fn completed(&self) -> Self {
        if self.is_complete() {
            return self.clone();
        }
        Self::dense(self.n_items, self.entries()).expect("completing a valid count matrix")
    }

    /// `(i, j, count)` for every observed pair.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pairs
            .iter()
            .zip(&self.counts)
            .map(|(&(i, j), &c)| (i, j, c))
    }
}

/// Counts normalized to a probability distribution over a pair support.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistribution {
    n_items: usize,
    pairs: Vec<Pair>,
    probs: Vec<f64>,
}

impl PairDistribution {
    pub(crate) fn from_parts(n_items: usize, pairs: Vec<Pair>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(pairs.len(), probs.len());
        Self {
            n_items,
            pairs,
            probs,
        }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn support(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        ordered_sum(&self.probs)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let pair = canonical(self.n_items, i, j).ok()?;
        self.pairs
            .binary_search(&pair)
            .ok()
            .map(|idx| self.probs[idx])
    }

    pub fn is_complete(&self) -> bool {
        self.pairs.len() == self.n_items * (self.n_items - 1) / 2
    }
}

/// Divide every count by the total.
pub fn normalize(counts: &CountMatrix) -> Result<PairDistribution> {
    let total = counts.total();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    let probs = counts.counts.iter().map(|&c| c / total).collect();
    Ok(PairDistribution::from_parts(
        counts.n_items,
        counts.pairs.clone(),
        probs,
    ))
}
