//! The two-view generative model.
//!
//! Each item `i` has a latent vector `y_i`. For a view with diagonal weights
//! `w`, the model distribution over the view's pair support is
//!
//! ```text
//! p_ij = exp(-sum_k w_k^2 (y_ik - y_jk)^2) / Z
//! ```
//!
//! The first two weights of both views are fixed at 1, so columns 0 and 1 of
//! `Y` are shared by both views and form the 2-D display. The remaining
//! columns can be switched on or off independently per view through the free
//! weights, which lets each view explain away variation the other one does
//! not share.
//!
//! The cost is the count-weighted negative log-likelihood of each view, with
//! counts normalized to a distribution per view.

mod objective;
mod pairs;
mod state;

use ndarray::{Array2, Axis};

pub use objective::{Gradient, Objective};
pub use pairs::{all_pairs, normalize, CountMatrix, Pair, PairDistribution};
pub use state::{LatentState, View, SHARED_DIMS};

use crate::error::{Error, Result};

/// Model hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelConfig {
    /// Total latent dimensions `K`, including the two shared ones. Used when
    /// initializing a state.
    pub latent_dims: usize,
    /// Multiplier on the user-view term. 0 drops the user view entirely.
    pub view_balance: f64,
    /// L1 penalty on the free diagonal weights of both views.
    pub sparsity_coeff: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            latent_dims: 6,
            view_balance: 1.0,
            sparsity_coeff: 0.0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dims < SHARED_DIMS {
            return Err(Error::InvalidInput(format!(
                "latent_dims must be at least {SHARED_DIMS}, got {}",
                self.latent_dims
            )));
        }
        if !(self.view_balance.is_finite() && self.view_balance >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "view_balance must be finite and nonnegative, got {}",
                self.view_balance
            )));
        }
        if !(self.sparsity_coeff.is_finite() && self.sparsity_coeff >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "sparsity_coeff must be finite and nonnegative, got {}",
                self.sparsity_coeff
            )));
        }
        Ok(())
    }
}

/// `(y_i - y_j)^T W W^T (y_i - y_j)` for the chosen view's diagonal `W`.
pub fn weighted_sq_distance(state: &LatentState, view: View, i: usize, j: usize) -> Result<f64> {
    let n_items = state.n_items();
    for index in [i, j] {
        if index >= n_items {
            return Err(Error::IndexOutOfRange { index, n_items });
        }
    }
    let y = state.coords();
    let w = state.weights(view);
    Ok((0..state.latent_dims())
        .map(|k| {
            let d = y[[i, k]] - y[[j, k]];
            w[k] * w[k] * d * d
        })
        .sum())
}

/// Model distribution of one view, normalized over `support`.
pub fn model_distribution(
    state: &LatentState,
    view: View,
    support: &[Pair],
) -> Result<PairDistribution> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if !state.is_finite() {
        return Err(Error::NonFinite("latent state"));
    }
    let n_items = state.n_items();
    let mut pairs = Vec::with_capacity(support.len());
    for &(i, j) in support {
        for index in [i, j] {
            if index >= n_items {
                return Err(Error::IndexOutOfRange { index, n_items });
            }
        }
        if i == j {
            return Err(Error::InvalidInput(format!("self-pair ({i}, {i})")));
        }
        pairs.push(if i < j { (i, j) } else { (j, i) });
    }
    pairs.sort_unstable();
    pairs.dedup();

    let k = state.latent_dims();
    let w2: Vec<f64> = state.weights(view).iter().map(|x| x * x).collect();
    let y = state
        .coords()
        .as_slice()
        .expect("standard layout coordinates");
    let delta = objective::pair_distances(y, k, &w2, &pairs);
    let (expo, z, _) = objective::softmax_parts(&delta);
    let probs = expo.iter().map(|e| e / z).collect();
    Ok(PairDistribution::from_parts(n_items, pairs, probs))
}

/// Cost of `state` given normalized primary and user views.
pub fn cost(
    state: &LatentState,
    d_tilde: &PairDistribution,
    f_tilde: Option<&PairDistribution>,
    config: &ModelConfig,
) -> Result<f64> {
    Objective::new(d_tilde, f_tilde, *config)?.cost(state)
}

/// Analytic gradient of [`cost`].
pub fn gradient(
    state: &LatentState,
    d_tilde: &PairDistribution,
    f_tilde: Option<&PairDistribution>,
    config: &ModelConfig,
) -> Result<Gradient> {
    Objective::new(d_tilde, f_tilde, *config)?.gradient(state)
}

/// The 2-D display coordinates (columns 0 and 1).
pub fn shared_coordinates(state: &LatentState) -> Array2<f64> {
    state
        .coords()
        .slice_axis(Axis(1), (0..SHARED_DIMS).into())
        .to_owned()
}

/// Indices of the two free dimensions a view uses most, largest |w| first,
/// ties broken by lower index.
pub fn top_view_dims(state: &LatentState, view: View) -> Result<[usize; 2]> {
    let k = state.latent_dims();
    if k < SHARED_DIMS + 2 {
        return Err(Error::InsufficientViewDims(k));
    }
    let w = state.weights(view);
    let mut dims: Vec<usize> = (SHARED_DIMS..k).collect();
    dims.sort_by(|&a, &b| w[b].abs().total_cmp(&w[a].abs()).then(a.cmp(&b)));
    Ok([dims[0], dims[1]])
}

/// 2-D projection onto the two free dimensions a view weights most,
/// each column scaled by its |w|.
pub fn view_specific_coordinates(state: &LatentState, view: View) -> Result<Array2<f64>> {
    let dims = top_view_dims(state, view)?;
    let w = state.weights(view);
    let y = state.coords();
    Ok(Array2::from_shape_fn((state.n_items(), 2), |(i, c)| {
        y[[i, dims[c]]] * w[dims[c]].abs()
    }))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use ndarray::array;

    use super::*;

    fn state(y: Array2<f64>) -> LatentState {
        LatentState::new(y).unwrap()
    }

    #[test]
    fn weighted_distance_examples() {
        let s = state(array![[0.0, 0.0], [3.0, 4.0], [0.0, 0.0]]);
        assert_eq!(weighted_sq_distance(&s, View::Primary, 0, 1).unwrap(), 25.0);
        assert_eq!(weighted_sq_distance(&s, View::Primary, 0, 2).unwrap(), 0.0);

        let s = LatentState::with_weights(
            array![[1.0, 5.0, 1.0], [0.0, 5.0, 0.0]],
            vec![1.0, 1.0, 2.0],
            vec![1.0; 3],
        )
        .unwrap();
        assert_eq!(weighted_sq_distance(&s, View::Primary, 0, 1).unwrap(), 5.0);
        assert_eq!(weighted_sq_distance(&s, View::Primary, 1, 0).unwrap(), 5.0);
        assert_eq!(weighted_sq_distance(&s, View::User, 0, 1).unwrap(), 2.0);
        assert!(matches!(
            weighted_sq_distance(&s, View::User, 0, 2),
            Err(Error::IndexOutOfRange {
                index: 2,
                n_items: 2
            })
        ));
    }

    #[test]
    fn distribution_examples() {
        let s = state(array![[0.0, 0.0], [1.0, 1.0]]);
        let p = model_distribution(&s, View::Primary, &[(0, 1)]).unwrap();
        assert_eq!(p.probs(), &[1.0]);

        let s = state(array![[2.0, 2.0], [2.0, 2.0], [2.0, 2.0]]);
        let p = model_distribution(&s, View::Primary, &all_pairs(3)).unwrap();
        for &x in p.probs() {
            assert_relative_eq!(x, 1.0 / 3.0, epsilon = 1e-15);
        }

        let s = state(array![[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]]);
        let p = model_distribution(&s, View::Primary, &all_pairs(3)).unwrap();
        // softmax of -(1, 100, 81) over pairs (0,1), (0,2), (1,2)
        let z = (-1.0_f64).exp() + (-100.0_f64).exp() + (-81.0_f64).exp();
        assert_relative_eq!(
            p.get(0, 1).unwrap(),
            (-1.0_f64).exp() / z,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            p.get(0, 2).unwrap(),
            (-100.0_f64).exp() / z,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            p.get(1, 2).unwrap(),
            (-81.0_f64).exp() / z,
            max_relative = 1e-12
        );

        assert!(matches!(
            model_distribution(&s, View::Primary, &[]),
            Err(Error::EmptySupport)
        ));
    }

    #[test]
    fn cost_of_single_pair_views_is_zero() {
        let s = state(array![[0.3, -1.0], [2.0, 0.5]]);
        let d = normalize(&CountMatrix::dense(2, [(0, 1, 4.0)]).unwrap()).unwrap();
        let c = cost(&s, &d, Some(&d), &ModelConfig::default()).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn uniform_cost_is_log_support_size() {
        let n = 5;
        let s = state(Array2::from_elem((n, 4), 0.7));
        let d = normalize(
            &CountMatrix::dense(n, all_pairs(n).into_iter().map(|(i, j)| (i, j, 1.0))).unwrap(),
        )
        .unwrap();
        let observed = [(0, 1), (1, 2), (2, 3)];
        let f = normalize(
            &CountMatrix::with_observed(n, observed, observed.map(|(i, j)| (i, j, 2.0))).unwrap(),
        )
        .unwrap();
        let c = cost(&s, &d, Some(&f), &ModelConfig::default()).unwrap();
        assert_relative_eq!(c, 10.0_f64.ln() + 3.0_f64.ln(), epsilon = 1e-12);

        let g = gradient(&s, &d, Some(&f), &ModelConfig::default()).unwrap();
        assert!(g.coords.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn primary_support_must_be_complete() {
        let s = state(Array2::zeros((3, 2)));
        let partial =
            normalize(&CountMatrix::with_observed(3, [(0, 1)], [(0, 1, 1.0)]).unwrap()).unwrap();
        assert!(matches!(
            cost(&s, &partial, None, &ModelConfig::default()),
            Err(Error::SupportMismatch(_))
        ));
    }

    #[test]
    fn pinned_gradient_entries_are_zero() {
        let s = LatentState::with_weights(
            array![
                [0.0, 1.0, 2.0, 0.5],
                [1.0, -1.0, 0.0, 0.3],
                [0.2, 0.1, -0.4, 1.0]
            ],
            vec![1.0, 1.0, 0.5, -0.7],
            vec![1.0, 1.0, 1.5, 0.2],
        )
        .unwrap();
        let d = normalize(&CountMatrix::dense(3, [(0, 1, 1.0), (1, 2, 3.0)]).unwrap()).unwrap();
        let config = ModelConfig {
            latent_dims: 4,
            sparsity_coeff: 0.1,
            ..Default::default()
        };
        let g = gradient(&s, &d, Some(&d), &config).unwrap();
        assert_eq!(&g.primary_weights[..2], &[0.0, 0.0]);
        assert_eq!(&g.user_weights[..2], &[0.0, 0.0]);
    }

    #[test]
    fn shared_and_view_specific_projections() {
        let y = array![[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]];
        let s = LatentState::with_weights(
            y.clone(),
            vec![1.0, 1.0, 0.9, 0.1],
            vec![1.0, 1.0, 0.5, -0.5],
        )
        .unwrap();
        assert_eq!(shared_coordinates(&s), array![[1.0, 2.0], [5.0, 6.0]]);

        let v = view_specific_coordinates(&s, View::Primary).unwrap();
        assert_eq!(v, array![[3.0 * 0.9, 4.0 * 0.1], [7.0 * 0.9, 8.0 * 0.1]]);
        assert_eq!(top_view_dims(&s, View::User).unwrap(), [2, 3]);

        let k2 = state(array![[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(shared_coordinates(&k2), *k2.coords());
        assert!(matches!(
            view_specific_coordinates(&k2, View::User),
            Err(Error::InsufficientViewDims(2))
        ));
    }
}
