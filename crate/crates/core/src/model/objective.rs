use ndarray::Array2;

use super::pairs::{Pair, PairDistribution};
use super::state::{LatentState, View, SHARED_DIMS};
use super::ModelConfig;
use crate::error::{Error, Result};
use crate::reduce::{ordered_sum, par_map};

/// Analytic gradient of the cost with respect to every parameter.
///
/// Entries for pinned weights are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub coords: Array2<f64>,
    pub primary_weights: Vec<f64>,
    pub user_weights: Vec<f64>,
}

impl Gradient {
    pub(crate) fn zeros(n_items: usize, latent_dims: usize) -> Self {
        Self {
            coords: Array2::zeros((n_items, latent_dims)),
            primary_weights: vec![0.0; latent_dims],
            user_weights: vec![0.0; latent_dims],
        }
    }

    pub fn weights(&self, view: View) -> &[f64] {
        match view {
            View::Primary => &self.primary_weights,
            View::User => &self.user_weights,
        }
    }

    /// Largest absolute entry over all free parameters.
    pub fn max_abs(&self) -> f64 {
        self.coords
            .iter()
            .chain(&self.primary_weights[SHARED_DIMS..])
            .chain(&self.user_weights[SHARED_DIMS..])
            .fold(0.0_f64, |m, g| m.max(g.abs()))
    }

    /// Flat view in the optimizer's free-parameter order
    /// (see [`LatentState::free_param`]).
    pub fn free_entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.coords
            .iter()
            .chain(&self.primary_weights[SHARED_DIMS..])
            .chain(&self.user_weights[SHARED_DIMS..])
            .copied()
    }

    /// Name of the first parameter block holding a non-finite entry.
    pub(crate) fn non_finite_block(&self) -> Option<&'static str> {
        if self.coords.iter().any(|g| !g.is_finite()) {
            Some("coordinate gradient")
        } else if self.primary_weights.iter().any(|g| !g.is_finite()) {
            Some("primary weight gradient")
        } else if self.user_weights.iter().any(|g| !g.is_finite()) {
            Some("user weight gradient")
        } else {
            None
        }
    }
}

/// Weighted squared distances `sum_k w_k^2 (y_ak - y_bk)^2` over `pairs`.
pub(crate) fn pair_distances(y: &[f64], k: usize, w2: &[f64], pairs: &[Pair]) -> Vec<f64> {
    par_map(pairs.len(), |p| {
        let (a, b) = pairs[p];
        let ra = &y[a * k..(a + 1) * k];
        let rb = &y[b * k..(b + 1) * k];
        ra.iter()
            .zip(rb)
            .zip(w2)
            .map(|((&u, &v), &w)| w * (u - v) * (u - v))
            .sum()
    })
}

/// Max-shifted exponentials `exp(-(delta - min))`, their sum, and the
/// log-normalizer `log sum exp(-delta)`.
pub(crate) fn softmax_parts(delta: &[f64]) -> (Vec<f64>, f64, f64) {
    let min = delta.iter().copied().fold(f64::INFINITY, f64::min);
    let expo = par_map(delta.len(), |p| (-(delta[p] - min)).exp());
    let z = ordered_sum(&expo);
    (expo, z, z.ln() - min)
}

/// Cross-entropy `-sum t log p` of one view, optionally accumulating
/// `scale` times its gradient.
fn view_term(
    state: &LatentState,
    view: View,
    target: &PairDistribution,
    scale: f64,
    grad: Option<&mut Gradient>,
) -> f64 {
    let coords = state.coords();
    let k = coords.ncols();
    let y = coords.as_slice().expect("standard layout coordinates");
    let w = state.weights(view);
    let w2: Vec<f64> = w.iter().map(|x| x * x).collect();
    let pairs = target.support();
    let t = target.probs();

    let delta = pair_distances(y, k, &w2, pairs);
    let (expo, z, lse) = softmax_parts(&delta);
    // -log p = delta + lse
    let terms = par_map(pairs.len(), |p| {
        if t[p] == 0.0 {
            0.0
        } else {
            t[p] * (delta[p] + lse)
        }
    });
    let cost = ordered_sum(&terms);

    if let Some(grad) = grad {
        let t_total = ordered_sum(t);
        let gy = grad
            .coords
            .as_slice_mut()
            .expect("standard layout gradient");
        let gw = match view {
            View::Primary => &mut grad.primary_weights,
            View::User => &mut grad.user_weights,
        };
        // dC/d(delta_ab) = t_ab - T p_ab
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let coef = scale * (t[p] - t_total * expo[p] / z);
            if coef == 0.0 {
                continue;
            }
            for c in 0..k {
                let diff = y[a * k + c] - y[b * k + c];
                let g = 2.0 * coef * w2[c] * diff;
                gy[a * k + c] += g;
                gy[b * k + c] -= g;
                if c >= SHARED_DIMS {
                    gw[c] += 2.0 * coef * w[c] * diff * diff;
                }
            }
        }
    }
    scale * cost
}

/// The fitting objective for a pair of normalized views.
///
/// The user view is optional; when it is absent or `view_balance` is 0 the
/// objective reduces to single-view symmetric SNE on the primary data.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    primary: &'a PairDistribution,
    user: Option<&'a PairDistribution>,
    config: ModelConfig,
}

impl<'a> Objective<'a> {
    pub fn new(
        primary: &'a PairDistribution,
        user: Option<&'a PairDistribution>,
        config: ModelConfig,
    ) -> Result<Self> {
        config.validate()?;
        if !primary.is_complete() {
            return Err(Error::SupportMismatch(
                "primary view distribution must cover all pairs".into(),
            ));
        }
        if let Some(user) = user {
            if user.n_items() != primary.n_items() {
                return Err(Error::SupportMismatch(format!(
                    "primary view has {} items but user view has {}",
                    primary.n_items(),
                    user.n_items()
                )));
            }
            if user.support().is_empty() {
                return Err(Error::EmptySupport);
            }
        }
        Ok(Self {
            primary,
            user,
            config,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn active_user(&self) -> Option<&'a PairDistribution> {
        self.user.filter(|_| self.config.view_balance != 0.0)
    }

    fn check_state(&self, state: &LatentState) -> Result<()> {
        if state.n_items() != self.primary.n_items() {
            return Err(Error::SupportMismatch(format!(
                "state has {} items but data has {}",
                state.n_items(),
                self.primary.n_items()
            )));
        }
        if !state.is_finite() {
            return Err(Error::NonFinite("latent state"));
        }
        Ok(())
    }

    fn penalty(&self, state: &LatentState) -> f64 {
        let s = self.config.sparsity_coeff;
        if s == 0.0 {
            return 0.0;
        }
        let l1 = |w: &[f64]| w[SHARED_DIMS..].iter().map(|x| x.abs()).sum::<f64>();
        s * (l1(state.weights(View::Primary)) + l1(state.weights(View::User)))
    }

    pub fn cost(&self, state: &LatentState) -> Result<f64> {
        self.check_state(state)?;
        let mut c = view_term(state, View::Primary, self.primary, 1.0, None);
        if let Some(user) = self.active_user() {
            c += view_term(state, View::User, user, self.config.view_balance, None);
        }
        Ok(c + self.penalty(state))
    }

    pub fn gradient(&self, state: &LatentState) -> Result<Gradient> {
        Ok(self.cost_and_gradient(state)?.1)
    }

    /// Cost and gradient in one pass over the pairs.
    pub fn cost_and_gradient(&self, state: &LatentState) -> Result<(f64, Gradient)> {
        self.check_state(state)?;
        let mut grad = Gradient::zeros(state.n_items(), state.latent_dims());
        let mut c = view_term(state, View::Primary, self.primary, 1.0, Some(&mut grad));
        if let Some(user) = self.active_user() {
            c += view_term(
                state,
                View::User,
                user,
                self.config.view_balance,
                Some(&mut grad),
            );
        }
        let s = self.config.sparsity_coeff;
        if s != 0.0 {
            for view in [View::Primary, View::User] {
                let w = state.weights(view);
                let gw = match view {
                    View::Primary => &mut grad.primary_weights,
                    View::User => &mut grad.user_weights,
                };
                for c in SHARED_DIMS..w.len() {
                    gw[c] += s * signum0(w[c]);
                }
            }
        }
        for gw in [&mut grad.primary_weights, &mut grad.user_weights] {
            gw[..SHARED_DIMS].fill(0.0);
        }
        Ok((c + self.penalty(state), grad))
    }
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
