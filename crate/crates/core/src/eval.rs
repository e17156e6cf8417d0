//! Class separability of 2-D coordinates.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::LabelSet;
use crate::error::{Error, Result};
use crate::model::{
    shared_coordinates, view_specific_coordinates, CountMatrix, LatentState, ModelConfig, View,
};
use crate::optim::{fit, FitReport, OptimConfig};

/// Number of neighbours used when none is given.
pub const DEFAULT_K: usize = 5;

/// Leave-one-out k-NN accuracy of one labelling on one set of coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnReport {
    pub k: usize,
    pub accuracy: f64,
    pub n_evaluated: usize,
    pub per_class_accuracy: BTreeMap<String, f64>,
}

/// Leave-one-out k-nearest-neighbour classification on 2-D coordinates.
///
/// Only items carrying exactly one label take part, both as queries and as
/// neighbours. Neighbours are ordered by Euclidean distance, then by lower
/// item index. A vote tie goes to the tied label whose voters have the
/// smallest summed distance, then to the lexicographically smallest label.
pub fn loo_knn_accuracy(coords: &Array2<f64>, labels: &LabelSet, k: usize) -> Result<KnnReport> {
    if coords.ncols() != 2 {
        return Err(Error::InvalidInput(format!(
            "expected 2-D coordinates, got {} columns",
            coords.ncols()
        )));
    }
    if labels.n_items() != coords.nrows() {
        return Err(Error::InvalidInput(format!(
            "{} coordinate rows but labels cover {} items",
            coords.nrows(),
            labels.n_items()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let items: Vec<(usize, &str)> = (0..coords.nrows())
        .filter_map(|i| labels.single_label(i).map(|l| (i, l)))
        .collect();
    if items.len() < k + 1 {
        return Err(Error::TooFewLabeled {
            k,
            needed: k + 1,
            have: items.len(),
        });
    }

    let predictions: Vec<bool> = items
        .par_iter()
        .map(|&(i, truth)| predict(coords, &items, i, k) == truth)
        .collect();

    let mut per_class: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (&(_, truth), &hit) in items.iter().zip(&predictions) {
        let slot = per_class.entry(truth.to_string()).or_default();
        slot.0 += usize::from(hit);
        slot.1 += 1;
    }
    let correct = predictions.iter().filter(|&&hit| hit).count();
    Ok(KnnReport {
        k,
        accuracy: correct as f64 / items.len() as f64,
        n_evaluated: items.len(),
        per_class_accuracy: per_class
            .into_iter()
            .map(|(label, (hit, total))| (label, hit as f64 / total as f64))
            .collect(),
    })
}

fn predict<'a>(
    coords: &Array2<f64>,
    items: &[(usize, &'a str)],
    query: usize,
    k: usize,
) -> &'a str {
    let (qx, qy) = (coords[[query, 0]], coords[[query, 1]]);
    let mut neighbours: Vec<(f64, usize, &str)> = items
        .iter()
        .filter(|&&(j, _)| j != query)
        .map(|&(j, label)| {
            let dx = coords[[j, 0]] - qx;
            let dy = coords[[j, 1]] - qy;
            (dx * dx + dy * dy, j, label)
        })
        .collect();
    let order =
        |a: &(f64, usize, &str), b: &(f64, usize, &str)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if neighbours.len() > k {
        neighbours.select_nth_unstable_by(k - 1, order);
        neighbours.truncate(k);
    }
    neighbours.sort_unstable_by(order);

    let mut votes: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for &(d2, _, label) in &neighbours {
        let v = votes.entry(label).or_insert((0, 0.0));
        v.0 += 1;
        v.1 += d2.sqrt();
    }
    // BTreeMap iterates labels in lexicographic order, so strict comparisons
    // keep the smallest label among exact ties.
    let mut best: Option<(&str, usize, f64)> = None;
    for (label, (count, dist)) in votes {
        let better = match best {
            None => true,
            Some((_, bc, bd)) => count > bc || (count == bc && dist < bd),
        };
        if better {
            best = Some((label, count, dist));
        }
    }
    best.expect("at least one neighbour").0
}

/// Single-view symmetric SNE in 2-D: the model with the user view removed,
/// `K = 2` and identity weights.
pub fn sne_baseline(d: &CountMatrix, optim: &OptimConfig) -> Result<(Array2<f64>, FitReport)> {
    let config = ModelConfig {
        latent_dims: 2,
        view_balance: 0.0,
        sparsity_coeff: 0.0,
    };
    let (state, report) = fit(d, None, &config, optim)?;
    Ok((shared_coordinates(&state), report))
}

/// Separability of both labellings on the shared display and of each
/// labelling on the view-specific projection where it should appear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub shared_relevant: KnnReport,
    pub shared_irrelevant: KnnReport,
    pub user_specific_irrelevant: KnnReport,
    pub primary_specific_relevant: KnnReport,
}

impl SeparabilityReport {
    /// `{view: {labelset: report}}`.
    pub fn to_json(&self) -> Value {
        json!({
            "shared": {
                "relevant": self.shared_relevant,
                "irrelevant": self.shared_irrelevant,
            },
            "user_specific": { "irrelevant": self.user_specific_irrelevant },
            "primary_specific": { "relevant": self.primary_specific_relevant },
        })
    }
}

pub fn separability_report(
    state: &LatentState,
    relevant: &LabelSet,
    irrelevant: &LabelSet,
    k: usize,
) -> Result<SeparabilityReport> {
    let shared = shared_coordinates(state);
    let user = view_specific_coordinates(state, View::User)?;
    let primary = view_specific_coordinates(state, View::Primary)?;
    Ok(SeparabilityReport {
        shared_relevant: loo_knn_accuracy(&shared, relevant, k)?,
        shared_irrelevant: loo_knn_accuracy(&shared, irrelevant, k)?,
        user_specific_irrelevant: loo_knn_accuracy(&user, irrelevant, k)?,
        primary_specific_relevant: loo_knn_accuracy(&primary, relevant, k)?,
    })
}
