use ndarray::Array2;

use crate::error::{Error, Result};

/// Number of shared (display) dimensions. Both views weight them by exactly 1.
pub const SHARED_DIMS: usize = 2;

/// Which of the two data views a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    /// The data the user wants visualized.
    Primary,
    /// Auxiliary data derived from the user (feedback, labels).
    User,
}

/// Latent coordinates and per-view diagonal weights.
///
/// Row `i` of `coords` is the concatenated latent vector of item `i`. Columns
/// 0 and 1 are the shared display coordinates; the remaining columns are
/// gated per view by the free entries of the weight vectors. The first two
/// entries of each weight vector are pinned to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState {
    coords: Array2<f64>,
    primary_weights: Vec<f64>,
    user_weights: Vec<f64>,
}

impl LatentState {
    /// State with the given coordinates and all weights equal to 1.
    pub fn new(coords: Array2<f64>) -> Result<Self> {
        let k = coords.ncols();
        Self::with_weights(coords, vec![1.0; k], vec![1.0; k])
    }

    /// State with explicit weights. The pinned entries must already be 1.
    pub fn with_weights(
        coords: Array2<f64>,
        primary_weights: Vec<f64>,
        user_weights: Vec<f64>,
    ) -> Result<Self> {
        let (n, k) = coords.dim();
        if k < SHARED_DIMS {
            return Err(Error::InvalidInput(format!(
                "latent dimension must be at least {SHARED_DIMS}, got {k}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 items, got {n}"
            )));
        }
        for (name, w) in [("primary", &primary_weights), ("user", &user_weights)] {
            if w.len() != k {
                return Err(Error::InvalidInput(format!(
                    "{name} weights have length {}, expected {k}",
                    w.len()
                )));
            }
            if w[..SHARED_DIMS].iter().any(|&x| x != 1.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} weights must have their first {SHARED_DIMS} entries equal to 1"
                )));
            }
        }
        let state = Self {
            coords: coords.as_standard_layout().into_owned(),
            primary_weights,
            user_weights,
        };
        if !state.is_finite() {
            return Err(Error::NonFinite("latent state"));
        }
        Ok(state)
    }

    pub fn n_items(&self) -> usize {
        self.coords.nrows()
    }

    pub fn latent_dims(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &Array2<f64> {
        &self.coords
    }

    pub fn weights(&self, view: View) -> &[f64] {
        match view {
            View::Primary => &self.primary_weights,
            View::User => &self.user_weights,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|x| x.is_finite())
            && self.primary_weights.iter().all(|x| x.is_finite())
            && self.user_weights.iter().all(|x| x.is_finite())
    }

    /// Mutable access to the free parameters: coordinates, and the unpinned
    /// tails of the primary and user weight vectors.
    pub(crate) fn free_parts_mut(&mut self) -> (&mut Array2<f64>, &mut [f64], &mut [f64]) {
        (
            &mut self.coords,
            &mut self.primary_weights[SHARED_DIMS..],
            &mut self.user_weights[SHARED_DIMS..],
        )
    }

    /// Number of free (optimized) scalar parameters.
    pub fn n_free(&self) -> usize {
        let k = self.latent_dims();
        self.coords.len() + 2 * (k - SHARED_DIMS)
    }

    /// Read free parameter `idx` in the flat order used by the optimizer:
    /// coordinates row-major, then free primary weights, then free user weights.
    pub fn free_param(&self, idx: usize) -> f64 {
        let ny = self.coords.len();
        let nw = self.latent_dims() - SHARED_DIMS;
        if idx < ny {
            let k = self.latent_dims();
            self.coords[[idx / k, idx % k]]
        } else if idx < ny + nw {
            self.primary_weights[SHARED_DIMS + idx - ny]
        } else {
            self.user_weights[SHARED_DIMS + idx - ny - nw]
        }
    }

    pub fn set_free_param(&mut self, idx: usize, value: f64) {
        let ny = self.coords.len();
        let nw = self.latent_dims() - SHARED_DIMS;
        if idx < ny {
            let k = self.latent_dims();
            self.coords[[idx / k, idx % k]] = value;
        } else if idx < ny + nw {
            self.primary_weights[SHARED_DIMS + idx - ny] = value;
        } else {
            self.user_weights[SHARED_DIMS + idx - ny - nw] = value;
        }
    }
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    #[test]
    fn rejects_unpinned_weights() {
        let y = array![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]];
        assert!(LatentState::with_weights(y.clone(), vec![1.0, 0.5, 1.0], vec![1.0; 3]).is_err());
        assert!(LatentState::with_weights(y, vec![1.0, 1.0, 0.5], vec![1.0, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn rejects_non_finite_and_small_shapes() {
        assert!(LatentState::new(array![[0.0, f64::NAN], [1.0, 1.0]]).is_err());
        assert!(LatentState::new(array![[0.0], [1.0]]).is_err());
        assert!(LatentState::new(array![[0.0, 1.0]]).is_err());
    }

    #[test]
    fn flat_free_parameter_order() {
        let y = array![[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]];
        let mut s = LatentState::with_weights(y, vec![1.0, 1.0, 6.0], vec![1.0, 1.0, 7.0]).unwrap();
        assert_eq!(s.n_free(), 8);
        let flat: Vec<f64> = (0..s.n_free()).map(|i| s.free_param(i)).collect();
        assert_eq!(flat, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        s.set_free_param(7, -1.0);
        assert_eq!(s.weights(View::User), &[1.0, 1.0, -1.0]);
    }
}
