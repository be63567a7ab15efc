//! Optional JSON run configuration; explicit flags always win over the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<String>,
    pub gain: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub q: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
    pub depth: Option<usize>,
    pub out: Option<PathBuf>,
    pub cert: Option<PathBuf>,
    pub points: Option<String>,
    pub axes: Option<Vec<usize>>,
    pub range: Option<Vec<f64>>,
    pub res: Option<Vec<usize>>,
    pub fixed: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub conv_tol: Option<f64>,
    pub depth_scan: Option<usize>,
    pub x0: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Comma-separated float list ("1,-0.2,0"); entries must be finite.
pub fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::usage(format!("{what}: cannot parse '{s}' as a finite number"))
                })
        })
        .collect()
}

/// Points given inline ("x1,x2;y1,y2") or as a CSV file path with one point
/// per row.
pub fn parse_points(spec: &str, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let rows: Vec<String> = if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::usage(format!("cannot read points file {spec}: {e}")))?;
        text.lines().map(str::to_string).collect()
    } else {
        spec.split(';').map(str::to_string).collect()
    };

    let mut points = Vec::new();
    for (row_idx, row) in rows.iter().enumerate() {
        let trimmed = row.trim();
        if trimmed.is_empty() {
            continue;
        }
        let point = parse_float_list(trimmed, "point")
            .map_err(|e| CliError::usage(format!("row {}: {e}", row_idx + 1)))?;
        if point.len() != dim {
            return Err(CliError::usage(format!(
                "row {}: point has {} coordinates, system has {dim}",
                row_idx + 1,
                point.len()
            )));
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(CliError::usage("no points supplied".to_string()));
    }
    Ok(points)
}
