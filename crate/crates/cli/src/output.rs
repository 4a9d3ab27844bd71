use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cvmetro::CurveData;
use serde_json::json;

use crate::CliError;

/// Shortest round-trip decimal; `inf`/`-inf` for diverging values.
fn fmt(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:?}")
    }
}

pub fn write_csv(path: &Path, curve: &CurveData) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(curve.header()).map_err(io)?;
    for i in 0..curve.len() {
        w.write_record(curve.row(i).into_iter().map(fmt)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub struct RunInfo<'a> {
    pub subcommand: &'a str,
    pub figures: Vec<&'a str>,
    pub seed: Option<u64>,
    pub params: &'a BTreeMap<String, String>,
}

/// Writes `<stem>.csv` and `<stem>.meta.json`.
pub fn write_outputs(dir: &Path, name: &str, curve: &CurveData, info: &RunInfo) -> Result<PathBuf, CliError> {
    curve.validate().map_err(|e| CliError::Numerical(format!("output curve: {e}")))?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let csv_path = dir.join(format!("{name}.csv"));
    write_csv(&csv_path, curve)?;
    let curve_params: BTreeMap<&str, &str> = curve.params.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let meta = json!({
        "subcommand": info.subcommand,
        "figures": info.figures,
        "columns": curve.header(),
        "x_label": curve.x_label,
        "y_label": curve.y_label,
        "rows": curve.len(),
        "provenance": {
            "version": env!("CARGO_PKG_VERSION"),
            "git": option_env!("CVMETRO_GIT_DESCRIBE").unwrap_or("unknown"),
            "seed": info.seed,
            "parameters": info.params,
            "model": curve_params,
        },
    });
    let meta_path = dir.join(format!("{name}.meta.json"));
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&meta_path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", meta_path.display())))?;
    Ok(csv_path)
}
