//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's cost, gradient, or k-NN code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relvis_core::{CountMatrix, LatentState, ModelConfig};

/// Symmetric target matrix with zero diagonal; `t[i][j] = t[j][i]` is the
/// normalized count of pair {i, j}, or `None` when the pair is unobserved.
pub type Target = Vec<Vec<Option<f64>>>;

pub fn target_from_counts(c: &CountMatrix) -> Target {
    let n = c.n_items();
    let total: f64 = c.counts().iter().sum();
    let mut t = vec![vec![None; n]; n];
    for (i, j, count) in c.entries() {
        t[i][j] = Some(count / total);
        t[j][i] = Some(count / total);
    }
    t
}

fn view_cross_entropy(y: &Array2<f64>, w: &[f64], t: &Target) -> f64 {
    let n = y.nrows();
    let mut z = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if t[i][j].is_some() {
                let mut d = 0.0;
                for k in 0..y.ncols() {
                    d += (w[k] * (y[[i, k]] - y[[j, k]])).powi(2);
                }
                z += (-d).exp();
            }
        }
    }
    let mut c = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if let Some(tij) = t[i][j] {
                let mut d = 0.0;
                for k in 0..y.ncols() {
                    d += (w[k] * (y[[i, k]] - y[[j, k]])).powi(2);
                }
                c -= tij * ((-d).exp() / z).ln();
            }
        }
    }
    c
}

/// Straightforward evaluation of the two-view cost.
pub fn direct_cost(
    state: &LatentState,
    d: &Target,
    f: Option<&Target>,
    config: &ModelConfig,
) -> f64 {
    use relvis_core::View;
    let y = state.coords();
    let mut c = view_cross_entropy(y, state.weights(View::Primary), d);
    if let Some(f) = f {
        if config.view_balance != 0.0 {
            c += config.view_balance * view_cross_entropy(y, state.weights(View::User), f);
        }
    }
    let l1: f64 = state.weights(View::Primary)[2..]
        .iter()
        .chain(&state.weights(View::User)[2..])
        .map(|w| w.abs())
        .sum();
    c + config.sparsity_coeff * l1
}

/// Symmetric SNE with Gaussian output kernel, written over ordered pairs:
/// `P_ij = p_ij / 2`, `Q_ij = exp(-|y_i - y_j|^2) / sum_{a != b} exp(-|y_a - y_b|^2)`.
/// Returns the cross-entropy `-sum_{i != j} P_ij log Q_ij` and its gradient
/// `4 sum_j (P_ij - Q_ij)(y_i - y_j)`.
pub fn textbook_sne(y: &Array2<f64>, p: &Target) -> (f64, Array2<f64>) {
    let n = y.nrows();
    let dim = y.ncols();
    let mut q = vec![vec![0.0; n]; n];
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d: f64 = (0..dim).map(|k| (y[[i, k]] - y[[j, k]]).powi(2)).sum();
                q[i][j] = (-d).exp();
                z += q[i][j];
            }
        }
    }
    let mut cost = 0.0;
    let mut grad = Array2::zeros((n, dim));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p[i][j].unwrap_or(0.0) / 2.0;
            let qij = q[i][j] / z;
            cost -= pij * qij.ln();
            for k in 0..dim {
                grad[[i, k]] += 4.0 * (pij - qij) * (y[[i, k]] - y[[j, k]]);
            }
        }
    }
    (cost, grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteKnn {
    pub accuracy: f64,
    pub n_evaluated: usize,
    pub per_class: BTreeMap<String, f64>,
}

/// Quadratic-scan leave-one-out k-NN. `labels[i]` is the single label of item
/// `i` or `None` when the item does not take part.
pub fn brute_knn(coords: &Array2<f64>, labels: &[Option<String>], k: usize) -> Option<BruteKnn> {
    let n = coords.nrows();
    let eligible: Vec<usize> = (0..n).filter(|&i| labels[i].is_some()).collect();
    if eligible.len() < k + 1 {
        return None;
    }
    let mut hits: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut correct = 0;
    for &i in &eligible {
        let mut others: Vec<(f64, usize)> = eligible
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| {
                let dx = coords[[j, 0]] - coords[[i, 0]];
                let dy = coords[[j, 1]] - coords[[i, 1]];
                (dx * dx + dy * dy, j)
            })
            .collect();
        others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let nearest = &others[..k];

        let mut names: Vec<&str> = nearest
            .iter()
            .map(|&(_, j)| labels[j].as_deref().unwrap())
            .collect();
        names.sort();
        names.dedup();
        let score = |name: &str| {
            let votes = nearest
                .iter()
                .filter(|&&(_, j)| labels[j].as_deref() == Some(name))
                .count();
            let dist: f64 = nearest
                .iter()
                .filter(|&&(_, j)| labels[j].as_deref() == Some(name))
                .map(|&(d2, _)| d2.sqrt())
                .sum();
            (votes, dist)
        };
        let max_votes = names.iter().map(|n| score(n).0).max().unwrap();
        let tied: Vec<&str> = names
            .iter()
            .copied()
            .filter(|n| score(n).0 == max_votes)
            .collect();
        let min_dist = tied
            .iter()
            .map(|n| score(n).1)
            .fold(f64::INFINITY, f64::min);
        let winner = tied
            .iter()
            .copied()
            .find(|n| score(n).1 == min_dist)
            .unwrap();

        let truth = labels[i].as_deref().unwrap();
        let entry = hits.entry(truth.to_string()).or_default();
        entry.1 += 1;
        if winner == truth {
            entry.0 += 1;
            correct += 1;
        }
    }
    Some(BruteKnn {
        accuracy: correct as f64 / eligible.len() as f64,
        n_evaluated: eligible.len(),
        per_class: hits
            .into_iter()
            .map(|(l, (h, t))| (l, h as f64 / t as f64))
            .collect(),
    })
}

/// A random model instance: state, dense primary counts, and user counts on
/// a random subset of pairs.
pub struct Instance {
    pub state: LatentState,
    pub primary: CountMatrix,
    pub user: CountMatrix,
}

pub fn random_instance(seed: u64, n: usize, k: usize, observed_frac: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = Array2::from_shape_fn((n, k), |_| rng.random_range(-1.5..1.5));
    let w = |rng: &mut ChaCha8Rng| {
        let mut v = vec![1.0; k];
        for x in v.iter_mut().skip(2) {
            let mag = rng.random_range(0.2..1.5);
            *x = if rng.random_bool(0.5) { mag } else { -mag };
        }
        v
    };
    let wd = w(&mut rng);
    let wf = w(&mut rng);
    let state = LatentState::with_weights(y, wd, wf).unwrap();

    let mut primary = Vec::new();
    let mut observed = Vec::new();
    let mut user = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            primary.push((i, j, rng.random_range(0.0..3.0)));
            if rng.random_bool(observed_frac) || observed.is_empty() {
                observed.push((i, j));
                if rng.random_bool(0.6) || user.is_empty() {
                    user.push((i, j, rng.random_range(0.5..4.0)));
                }
            }
        }
    }
    Instance {
        state,
        primary: CountMatrix::dense(n, primary).unwrap(),
        user: CountMatrix::with_observed(n, observed, user).unwrap(),
    }
}
