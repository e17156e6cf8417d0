use std::collections::HashSet;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::model::{all_pairs, CountMatrix};
use crate::reduce::par_map;

/// Feature vectors for `n_items` identified items.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    values: Array2<f64>,
}

impl FeatureMatrix {
    pub fn new(ids: Vec<String>, values: Array2<f64>) -> Result<Self> {
        if ids.len() != values.nrows() {
            return Err(Error::InvalidInput(format!(
                "{} ids for {} feature rows",
                ids.len(),
                values.nrows()
            )));
        }
        if ids.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 items, got {}",
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate item id {dup:?}")));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        Ok(Self { ids, values })
    }

    pub fn n_items(&self) -> usize {
        self.ids.len()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    fn sq_distance(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Dense counts `exp(-||x_i - x_j||^2 / sigma^2)` over all pairs.
pub fn gaussian_similarity(features: &FeatureMatrix, sigma: f64) -> Result<CountMatrix> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    let pairs = all_pairs(features.n_items());
    let s2 = sigma * sigma;
    let counts = par_map(pairs.len(), |p| {
        let (i, j) = pairs[p];
        (-features.sq_distance(i, j) / s2).exp()
    });
    CountMatrix::dense(
        features.n_items(),
        pairs.iter().zip(counts).map(|(&(i, j), c)| (i, j, c)),
    )
}

/// Median of all pairwise Euclidean distances (mean of the middle two for
/// an even number of pairs).
pub fn median_sigma(features: &FeatureMatrix) -> Result<f64> {
    let pairs = all_pairs(features.n_items());
    let mut dist = par_map(pairs.len(), |p| {
        let (i, j) = pairs[p];
        features.sq_distance(i, j).sqrt()
    });
    let median = median_of(&mut dist);
    if median > 0.0 {
        Ok(median)
    } else {
        Err(Error::DegenerateFeatures)
    }
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}
