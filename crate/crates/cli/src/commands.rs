use std::io::Write;
use std::path::Path;

use relvis_core::data::{self, io, SyntheticSpec};
use relvis_core::model::{shared_coordinates, view_specific_coordinates};
use relvis_core::{fit_restarts, loo_knn_accuracy, plot, CountMatrix, View};
use serde_json::json;

use crate::config::{RunConfig, SigmaChoice, UserSource};
use crate::error::CliError;

/// Write every file to a temporary sibling first and rename only once all
/// of them have been written.
fn write_all(dir: &Path, files: &[(&str, String)]) -> Result<(), CliError> {
    let io_err = |p: &Path, e: std::io::Error| CliError::Data(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let mut tmp = tempfile::Builder::new()
            .prefix(&format!(".{name}."))
            .tempfile_in(dir)
            .map_err(|e| io_err(dir, e))?;
        tmp.write_all(contents.as_bytes())
            .map_err(|e| io_err(tmp.path(), e))?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| io_err(&target, e.error))?;
    }
    Ok(())
}

fn write_file(path: &Path, contents: String) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::Data(format!("invalid output path {}", path.display())))?;
    write_all(dir, &[(name, contents)])
}

pub fn fit(config: &RunConfig) -> Result<(), CliError> {
    let features = io::load_features(&config.features)?;
    let ids = features.ids().to_vec();
    let sigma = match config.sigma {
        SigmaChoice::Median => data::median_sigma(&features)?,
        SigmaChoice::Fixed(s) => s,
    };
    let primary = data::gaussian_similarity(&features, sigma)?;
    let user: CountMatrix = match &config.user {
        UserSource::Labels(path) => {
            let labels = io::load_labels(path, &ids)?;
            data::labels_to_counts(&labels, ids.len())?
        }
        UserSource::Counts(path) => io::load_counts(path, &ids)?,
    };

    let (state, report, restarts) = fit_restarts(
        &primary,
        Some(&user),
        &config.model,
        &config.optim,
        config.restarts,
    )?;

    let weights = {
        let mut s = String::from("k,wD,wF\n");
        let (wd, wf) = (state.weights(View::Primary), state.weights(View::User));
        for k in 0..state.latent_dims() {
            s.push_str(&format!("{k},{},{}\n", wd[k], wf[k]));
        }
        s
    };
    let report_json = json!({
        "cost_trace": report.cost_trace,
        "final_cost": report.final_cost(),
        "final_grad_norm": report.final_grad_norm,
        "iterations_run": report.iterations_run,
        "converged": report.converged,
        "restarts": restarts,
        "sigma": sigma,
        "seed": config.optim.seed,
        "model": config.model,
        "optim": config.optim,
    });

    write_all(
        &config.output_dir,
        &[
            (
                "coords_shared.csv",
                io::coords_csv(&ids, &shared_coordinates(&state)),
            ),
            (
                "coords_view_D.csv",
                io::coords_csv(&ids, &view_specific_coordinates(&state, View::Primary)?),
            ),
            (
                "coords_view_F.csv",
                io::coords_csv(&ids, &view_specific_coordinates(&state, View::User)?),
            ),
            ("weights.csv", weights),
            (
                "fit_report.json",
                serde_json::to_string_pretty(&report_json).expect("serializable report") + "\n",
            ),
        ],
    )
}

pub fn synth(spec: &SyntheticSpec, out: &Path) -> Result<(), CliError> {
    spec.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let data = data::synth_generate(spec)?;
    let ids = data.features.ids();
    write_all(
        out,
        &[
            ("features.csv", io::features_csv(&data.features)),
            ("labels_relevant.csv", io::labels_csv(&data.relevant, ids)),
            (
                "labels_irrelevant.csv",
                io::labels_csv(&data.irrelevant, ids),
            ),
            ("user_counts.csv", io::counts_csv(&data.user_counts, ids)),
        ],
    )
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Leave-one-out k-NN report as `{coords: {labels: report}}`, keyed by file stems.
pub fn eval(coords: &Path, labels: &Path, k: usize) -> Result<String, CliError> {
    if k == 0 {
        return Err(CliError::Config("--k must be at least 1".into()));
    }
    let (ids, xy) = io::load_coords(coords)?;
    let labelset = io::load_labels(labels, &ids)?;
    let report = loo_knn_accuracy(&xy, &labelset, k)?;
    let doc = json!({ stem(coords): { stem(labels): report } });
    Ok(serde_json::to_string_pretty(&doc).expect("serializable report"))
}

pub fn plot(coords: &Path, labels: &Path, out: &Path) -> Result<(), CliError> {
    let (ids, xy) = io::load_coords(coords)?;
    let text = std::fs::read_to_string(labels)
        .map_err(|e| CliError::Data(format!("{}: {e}", labels.display())))?;
    let records = if text.trim().is_empty() {
        Vec::new()
    } else {
        io::read_label_records(labels)?
    };
    let svg = plot::render_svg(&ids, &xy, &records)?;
    write_file(out, svg)
}
