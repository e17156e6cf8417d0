//! Run configuration for `fit`: a flat TOML key-value file.
//!
//! ```toml
//! features = "features.csv"
//! labels = "labels.csv"        # or: counts = "user_counts.csv"
//! output_dir = "out"
//! latent_dims = 6
//! sigma = "median"             # or a positive number
//! restarts = 1
//! seed = 0
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use relvis_core::{ModelConfig, OptimConfig};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    features: PathBuf,
    labels: Option<PathBuf>,
    counts: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    latent_dims: Option<usize>,
    view_balance: Option<f64>,
    sparsity_coeff: Option<f64>,
    max_iters: Option<usize>,
    step_size: Option<f64>,
    moment_decay_1: Option<f64>,
    moment_decay_2: Option<f64>,
    grad_tol: Option<f64>,
    seed: Option<u64>,
    init_scale: Option<f64>,
    sigma: Option<SigmaValue>,
    restarts: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SigmaValue {
    Number(f64),
    Text(String),
}

/// Where the user view comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum UserSource {
    Labels(PathBuf),
    Counts(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaChoice {
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub features: PathBuf,
    pub user: UserSource,
    pub output_dir: PathBuf,
    pub model: ModelConfig,
    pub optim: OptimConfig,
    pub sigma: SigmaChoice,
    pub restarts: usize,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_raw(raw, base, overrides)
    }

    fn from_raw(raw: RawConfig, base: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let existing = |p: PathBuf, key: &str| {
            let p = resolve(p);
            if p.is_file() {
                Ok(p)
            } else {
                Err(CliError::Config(format!(
                    "{key}: no such file {}",
                    p.display()
                )))
            }
        };

        let features = existing(raw.features, "features")?;
        let user = match (raw.labels, raw.counts) {
            (Some(l), None) => UserSource::Labels(existing(l, "labels")?),
            (None, Some(c)) => UserSource::Counts(existing(c, "counts")?),
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either labels or counts, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "one of labels or counts is required".into(),
                ))
            }
        };
        let output_dir = overrides
            .output_dir
            .clone()
            .or(raw.output_dir.map(resolve))
            .ok_or_else(|| CliError::Config("output_dir is required".into()))?;

        let defaults = ModelConfig::default();
        let model = ModelConfig {
            latent_dims: raw.latent_dims.unwrap_or(defaults.latent_dims),
            view_balance: raw.view_balance.unwrap_or(defaults.view_balance),
            sparsity_coeff: raw.sparsity_coeff.unwrap_or(defaults.sparsity_coeff),
        };
        model
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if model.latent_dims < 4 {
            return Err(CliError::Config(format!(
                "latent_dims must be at least 4 to export view-specific coordinates, got {}",
                model.latent_dims
            )));
        }

        let defaults = OptimConfig::default();
        let optim = OptimConfig {
            max_iters: overrides
                .max_iters
                .or(raw.max_iters)
                .unwrap_or(defaults.max_iters),
            step_size: raw.step_size.unwrap_or(defaults.step_size),
            moment_decay_1: raw.moment_decay_1.unwrap_or(defaults.moment_decay_1),
            moment_decay_2: raw.moment_decay_2.unwrap_or(defaults.moment_decay_2),
            grad_tol: raw.grad_tol.unwrap_or(defaults.grad_tol),
            seed: overrides.seed.or(raw.seed).unwrap_or(defaults.seed),
            init_scale: raw.init_scale.unwrap_or(defaults.init_scale),
        };
        optim
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let sigma = match raw.sigma {
            None => SigmaChoice::Median,
            Some(SigmaValue::Text(t)) if t == "median" => SigmaChoice::Median,
            Some(SigmaValue::Number(s)) if s > 0.0 && s.is_finite() => SigmaChoice::Fixed(s),
            Some(other) => {
                return Err(CliError::Config(format!(
                    "sigma must be \"median\" or a positive number, got {other:?}"
                )))
            }
        };
        let restarts = overrides.restarts.or(raw.restarts).unwrap_or(1);
        if restarts == 0 {
            return Err(CliError::Config("restarts must be at least 1".into()));
        }

        Ok(Self {
            features,
            user,
            output_dir,
            model,
            optim,
            sigma,
            restarts,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::fs;

    use super::*;

    fn setup(config: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("f.csv"), "id,f1\na,1\nb,2\n").unwrap();
        fs::write(dir.path().join("l.csv"), "id,label\na,x\n").unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, config).unwrap();
        (dir, path)
    }

    #[test]
    fn defaults_and_relative_paths() {
        let (dir, path) = setup("features = \"f.csv\"\nlabels = \"l.csv\"\noutput_dir = \"out\"\n");
        let c = RunConfig::load(&path, &Overrides::default()).unwrap();
        assert_eq!(c.features, dir.path().join("f.csv"));
        assert_eq!(c.output_dir, dir.path().join("out"));
        assert_eq!(c.sigma, SigmaChoice::Median);
        assert_eq!(c.restarts, 1);
        assert_eq!(c.model, ModelConfig::default());
    }

    #[test]
    fn overrides_win() {
        let (_dir, path) = setup("features = \"f.csv\"\nlabels = \"l.csv\"\noutput_dir = \"out\"\nseed = 3\nsigma = 2.5\n");
        let o = Overrides {
            seed: Some(9),
            restarts: Some(4),
            ..Default::default()
        };
        let c = RunConfig::load(&path, &o).unwrap();
        assert_eq!(c.optim.seed, 9);
        assert_eq!(c.restarts, 4);
        assert_eq!(c.sigma, SigmaChoice::Fixed(2.5));
    }

    #[test]
    fn config_errors() {
        for text in [
            "features = \"f.csv\"\noutput_dir = \"o\"\n",
            "features = \"missing.csv\"\nlabels = \"l.csv\"\noutput_dir = \"o\"\n",
            "features = \"f.csv\"\nlabels = \"l.csv\"\noutput_dir = \"o\"\nbogus = 1\n",
            "features = \"f.csv\"\nlabels = \"l.csv\"\noutput_dir = \"o\"\nsigma = \"auto\"\n",
            "features = \"f.csv\"\nlabels = \"l.csv\"\noutput_dir = \"o\"\nlatent_dims = 2\n",
            "features = \"f.csv\"\nlabels = \"l.csv\"\noutput_dir = \"o\"\nstep_size = -1.0\n",
            "features = \"f.csv\"\nlabels = \"l.csv\"\n",
            "this is not toml",
        ] {
            let (_dir, path) = setup(text);
            assert!(
                matches!(
                    RunConfig::load(&path, &Overrides::default()),
                    Err(CliError::Config(_))
                ),
                "accepted {text:?}"
            );
        }
    }
}
