//! Model files: a versioned TOML document. Floats are written with 17
//! significant digits, which round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{FittedAdditiveModel, ModelParts};
use crate::dataio::QuantileBounds;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "wavereg-additive-model";
pub const MODEL_VERSION: i64 = 1;

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_array(values: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&fmt_f64(*v));
    }
    s.push(']');
    s
}

/// Renders a model as TOML text.
pub fn to_toml_string(model: &FittedAdditiveModel) -> String {
    let p = model.to_parts();
    let mut s = String::new();
    let _ = writeln!(s, "format = \"{MODEL_FORMAT}\"");
    let _ = writeln!(s, "version = {MODEL_VERSION}");
    let _ = writeln!(s, "filter_name = \"{}\"", p.filter_name);
    let _ = writeln!(s, "level = {}", p.level);
    let _ = writeln!(s, "predictors = {}", p.predictors);
    let _ = writeln!(s, "beta0 = {}", fmt_f64(p.beta0));
    let _ = writeln!(s, "y_mean = {}", fmt_f64(p.y_mean));
    let _ = writeln!(s, "y_std = {}", fmt_f64(p.y_std));
    let _ = writeln!(s, "beta_n = {}", fmt_f64(p.beta_n));
    let _ = writeln!(s, "sigma_hat = {}", fmt_f64(p.sigma_hat));
    let _ = writeln!(s, "x_min = {}", fmt_array(&p.x_min));
    let _ = writeln!(s, "x_max = {}", fmt_array(&p.x_max));
    let _ = writeln!(s, "c_star = {}", fmt_array(&p.coefficients));
    if let Some(b) = &p.quantile_bounds {
        let _ = writeln!(s, "\n[quantile_bounds]");
        let _ = writeln!(s, "coverage = {}", fmt_f64(b.coverage));
        let _ = writeln!(s, "lower = {}", fmt_array(&b.lower));
        let _ = writeln!(s, "upper = {}", fmt_array(&b.upper));
    }
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[allow(dead_code)]
    format: String,
    #[allow(dead_code)]
    version: i64,
    filter_name: String,
    level: u32,
    predictors: usize,
    beta0: f64,
    y_mean: f64,
    y_std: f64,
    beta_n: f64,
    sigma_hat: f64,
    x_min: Vec<f64>,
    x_max: Vec<f64>,
    c_star: Vec<f64>,
    quantile_bounds: Option<QuantileBounds>,
}

/// Parses a model from TOML text, checking the format tag and version first.
pub fn from_toml_str(text: &str) -> Result<FittedAdditiveModel> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Schema(format!("corrupt model file: {e}")))?;
    match table.get("format").and_then(|v| v.as_str()) {
        Some(MODEL_FORMAT) => {}
        Some(other) => return Err(Error::Schema(format!("unexpected format tag '{other}'"))),
        None => return Err(Error::Schema("missing format tag".into())),
    }
    let version = table
        .get("version")
        .and_then(|v| v.as_integer())
        .ok_or_else(|| Error::Schema("missing integer version".into()))?;
    if version != MODEL_VERSION {
        return Err(Error::Version {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    let file: ModelFile = table.try_into().map_err(|e| Error::Schema(format!("{e}")))?;
    FittedAdditiveModel::from_parts(ModelParts {
        filter_name: file.filter_name,
        level: file.level,
        predictors: file.predictors,
        coefficients: file.c_star,
        beta0: file.beta0,
        y_mean: file.y_mean,
        y_std: file.y_std,
        x_min: file.x_min,
        x_max: file.x_max,
        beta_n: file.beta_n,
        sigma_hat: file.sigma_hat,
        quantile_bounds: file.quantile_bounds,
    })
}

pub fn save_model(model: &FittedAdditiveModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_toml_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<FittedAdditiveModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_toml_str(&text)
}
