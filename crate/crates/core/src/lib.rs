//! Two-view latent factorization for user-relevant visualization.
//!
//! Given a primary relational view of `N` items and a second view derived
//! from a user (feedback counts, class labels), the model places every item
//! in a `K`-dimensional latent space. The first two dimensions are shared by
//! both views and form the 2-D display; the others are gated per view so that
//! variation present in only one view is explained away off-screen.
//!
//! * [`model`]: distributions, cost and analytic gradient
//! * [`optim`]: initialization, Adam fitting, finite-difference oracle
//! * [`data`]: similarity and co-membership counts, CSV I/O, synthetic data
//! * [`eval`]: leave-one-out k-NN separability
//! * [`plot`]: SVG scatterplots

pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod optim;
pub mod plot;
mod reduce;

pub use data::{FeatureMatrix, LabelSet, SyntheticSpec};
pub use error::{Error, Result};
pub use eval::{
    loo_knn_accuracy, separability_report, sne_baseline, KnnReport, SeparabilityReport,
};
pub use model::{
    CountMatrix, Gradient, LatentState, ModelConfig, Objective, Pair, PairDistribution, View,
};
pub use optim::{fit, fit_restarts, FitReport, OptimConfig, RestartSummary};
pub use reduce::ordered_sum;
