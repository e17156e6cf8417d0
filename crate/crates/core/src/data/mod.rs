//! Building the two views: feature similarities, label co-membership,
//! normalization, file I/O, and synthetic generators.

mod features;
pub mod io;
mod labels;
mod synth;

pub use crate::model::normalize;
pub use features::{gaussian_similarity, median_sigma, FeatureMatrix};
pub use labels::{labels_to_counts, LabelSet};
pub use synth::{
    item_ids, synth_dual, synth_generate, DualSyntheticData, DualSyntheticSpec, SyntheticData,
    SyntheticSpec,
};
