use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::CountMatrix;

/// Class memberships of items; an item may carry several labels or none.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSet {
    n_items: usize,
    assignments: BTreeMap<usize, BTreeSet<String>>,
}

impl LabelSet {
    /// Build from `(item, label)` pairs; repeated items accumulate labels.
    pub fn from_pairs<I, S>(n_items: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, S)>,
        S: Into<String>,
    {
        let mut assignments: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        for (item, label) in pairs {
            if item >= n_items {
                return Err(Error::IndexOutOfRange {
                    index: item,
                    n_items,
                });
            }
            assignments.entry(item).or_default().insert(label.into());
        }
        Ok(Self {
            n_items,
            assignments,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn labels(&self, item: usize) -> Option<&BTreeSet<String>> {
        self.assignments.get(&item)
    }

    /// The label of an item carrying exactly one.
    pub fn single_label(&self, item: usize) -> Option<&str> {
        match self.assignments.get(&item) {
            Some(set) if set.len() == 1 => set.iter().next().map(String::as_str),
            _ => None,
        }
    }

    pub fn is_labeled(&self, item: usize) -> bool {
        self.assignments.get(&item).is_some_and(|s| !s.is_empty())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BTreeSet<String>)> {
        self.assignments.iter().map(|(&i, s)| (i, s))
    }

    /// All labels in lexicographic order.
    pub fn distinct_labels(&self) -> BTreeSet<&str> {
        self.assignments
            .values()
            .flatten()
            .map(String::as_str)
            .collect()
    }

    /// Error unless at least two distinct labels occur.
    pub fn require_two_classes(&self) -> Result<()> {
        let n = self.distinct_labels().len();
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "label set needs at least two distinct labels, has {n}"
            )));
        }
        Ok(())
    }

    /// Per-item union of two label sets over the same items.
    pub fn union(&self, other: &LabelSet) -> Result<LabelSet> {
        if self.n_items != other.n_items {
            return Err(Error::InvalidInput(format!(
                "label sets cover {} and {} items",
                self.n_items, other.n_items
            )));
        }
        let mut merged = self.clone();
        for (item, labels) in other.iter() {
            merged
                .assignments
                .entry(item)
                .or_default()
                .extend(labels.iter().cloned());
        }
        Ok(merged)
    }
}

/// Co-membership counts `f_ij = |classes(i) ∩ classes(j)|`.
///
/// Only pairs where both items carry at least one label are observed.
pub fn labels_to_counts(labels: &LabelSet, n_items: usize) -> Result<CountMatrix> {
    if labels.n_items() > n_items {
        return Err(Error::InvalidInput(format!(
            "label set covers {} items, more than {n_items}",
            labels.n_items()
        )));
    }
    let labeled: Vec<(usize, &BTreeSet<String>)> =
        labels.iter().filter(|(_, s)| !s.is_empty()).collect();
    let mut observed = Vec::new();
    let mut entries = Vec::new();
    for (a, &(i, si)) in labeled.iter().enumerate() {
        for &(j, sj) in &labeled[a + 1..] {
            observed.push((i, j));
            let shared = si.intersection(sj).count();
            if shared > 0 {
                entries.push((i, j, shared as f64));
            }
        }
    }
    CountMatrix::with_observed(n_items, observed, entries)
}
