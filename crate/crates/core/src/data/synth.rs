//! Synthetic two-view data with known relevant and irrelevant structure.
//!
//! Primary features carry only the relevant classes. The user view carries
//! the relevant classes, an independent set of irrelevant classes that the
//! primary data knows nothing about, and a fraction of uniformly scattered
//! count mass.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{labels_to_counts, FeatureMatrix, LabelSet};
use crate::error::{Error, Result};
use crate::model::CountMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_items: usize,
    pub n_relevant_classes: usize,
    /// 0 disables the irrelevant labelling.
    pub n_irrelevant_classes: usize,
    pub feature_dim: usize,
    pub cluster_separation: f64,
    /// Fraction of user-view count mass scattered over random observed pairs.
    pub noise_rate: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n_items < 2 {
            return bad(format!("n_items must be at least 2, got {}", self.n_items));
        }
        if self.n_relevant_classes < 2 {
            return bad("need at least 2 relevant classes".into());
        }
        if self.n_irrelevant_classes == 1 {
            return bad("irrelevant classes must be 0 or at least 2".into());
        }
        if self.feature_dim < self.n_relevant_classes {
            return bad(format!(
                "feature_dim {} is smaller than the number of relevant classes {}",
                self.feature_dim, self.n_relevant_classes
            ));
        }
        if !(self.cluster_separation > 0.0 && self.cluster_separation.is_finite()) {
            return bad("cluster_separation must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return bad(format!(
                "noise_rate must lie in [0, 1], got {}",
                self.noise_rate
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub features: FeatureMatrix,
    pub user_counts: CountMatrix,
    pub relevant: LabelSet,
    pub irrelevant: LabelSet,
}

/// Two independent labellings both expressed in the primary features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualSyntheticSpec {
    pub n_items: usize,
    pub n_classes_a: usize,
    pub n_classes_b: usize,
    pub feature_dim: usize,
    pub cluster_separation: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct DualSyntheticData {
    pub features: FeatureMatrix,
    pub labels_a: LabelSet,
    pub labels_b: LabelSet,
}

pub fn item_ids(n_items: usize) -> Vec<String> {
    let width = (n_items.max(2) - 1).to_string().len();
    (0..n_items).map(|i| format!("item{i:0width$}")).collect()
}

fn shuffled_round_robin(n_items: usize, n_classes: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut classes: Vec<usize> = (0..n_items).map(|i| i % n_classes).collect();
    classes.shuffle(rng);
    classes
}

/// Unit Gaussian features, shifted by `separation` along axis `offset + c`
/// for every class `c` in each structure.
fn clustered_features(
    n_items: usize,
    dim: usize,
    separation: f64,
    structures: &[(&[usize], usize)],
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let mut x = Array2::from_shape_simple_fn((n_items, dim), || {
        let z: f64 = StandardNormal.sample(&mut *rng);
        z
    });
    for &(classes, offset) in structures {
        for (i, &c) in classes.iter().enumerate() {
            x[[i, offset + c]] += separation;
        }
    }
    x
}

/// Generate features, the noisy user view, and both ground-truth labellings.
///
/// Relevant classes are assigned round-robin; irrelevant classes round-robin
/// and then shuffled. Features carry the relevant classes on the first
/// `n_relevant_classes` axes and pure noise elsewhere.
pub fn synth_generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let n = spec.n_items;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let relevant_classes: Vec<usize> = (0..n).map(|i| i % spec.n_relevant_classes).collect();
    let irrelevant_classes = if spec.n_irrelevant_classes > 0 {
        shuffled_round_robin(n, spec.n_irrelevant_classes, &mut rng)
    } else {
        Vec::new()
    };
    let features = clustered_features(
        n,
        spec.feature_dim,
        spec.cluster_separation,
        &[(&relevant_classes, 0)],
        &mut rng,
    );

    let relevant = LabelSet::from_pairs(
        n,
        relevant_classes
            .iter()
            .enumerate()
            .map(|(i, c)| (i, format!("R{c}"))),
    )?;
    let irrelevant = LabelSet::from_pairs(
        n,
        irrelevant_classes
            .iter()
            .enumerate()
            .map(|(i, c)| (i, format!("I{c}"))),
    )?;

    let base = labels_to_counts(&relevant.union(&irrelevant)?, n)?;
    let user_counts = if spec.noise_rate > 0.0 {
        scatter_noise(&base, spec.noise_rate, &mut rng)?
    } else {
        base
    };

    Ok(SyntheticData {
        features: FeatureMatrix::new(item_ids(n), features)?,
        user_counts,
        relevant,
        irrelevant,
    })
}

/// Scale counts by `1 - rate` and spread `rate` of the original total in
/// equal shares over as many uniformly drawn observed pairs as are observed.
fn scatter_noise(base: &CountMatrix, rate: f64, rng: &mut ChaCha8Rng) -> Result<CountMatrix> {
    let pairs = base.pairs();
    let m = pairs.len();
    let share = rate * base.total() / m as f64;
    let mut counts: Vec<f64> = base.counts().iter().map(|c| c * (1.0 - rate)).collect();
    for _ in 0..m {
        counts[rng.random_range(0..m)] += share;
    }
    CountMatrix::with_observed(
        base.n_items(),
        pairs.iter().copied(),
        pairs.iter().zip(counts).map(|(&(i, j), c)| (i, j, c)),
    )
}

/// Primary features carrying two independent class structures on disjoint
/// axes: labelling A round-robin, labelling B shuffled round-robin.
pub fn synth_dual(spec: &DualSyntheticSpec) -> Result<DualSyntheticData> {
    if spec.n_classes_a < 2 || spec.n_classes_b < 2 {
        return Err(Error::InvalidInput(
            "both labellings need at least 2 classes".into(),
        ));
    }
    if spec.feature_dim < spec.n_classes_a + spec.n_classes_b {
        return Err(Error::InvalidInput(format!(
            "feature_dim {} cannot hold {} + {} class axes",
            spec.feature_dim, spec.n_classes_a, spec.n_classes_b
        )));
    }
    if !(spec.cluster_separation > 0.0 && spec.cluster_separation.is_finite()) {
        return Err(Error::InvalidInput(
            "cluster_separation must be positive".into(),
        ));
    }
    let n = spec.n_items;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a: Vec<usize> = (0..n).map(|i| i % spec.n_classes_a).collect();
    let b = shuffled_round_robin(n, spec.n_classes_b, &mut rng);
    let x = clustered_features(
        n,
        spec.feature_dim,
        spec.cluster_separation,
        &[(&a, 0), (&b, spec.n_classes_a)],
        &mut rng,
    );
    Ok(DualSyntheticData {
        features: FeatureMatrix::new(item_ids(n), x)?,
        labels_a: LabelSet::from_pairs(n, a.iter().enumerate().map(|(i, c)| (i, format!("A{c}"))))?,
        labels_b: LabelSet::from_pairs(n, b.iter().enumerate().map(|(i, c)| (i, format!("B{c}"))))?,
    })
}
