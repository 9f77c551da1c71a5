//! CSV ingestion, quantile restriction, shuffled splits and evaluation for
//! real data sets.

use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FittedAdditiveModel;
use crate::rng;

/// Predictors `x` (n × p) and response `y` in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
    pub target_name: String,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>, feature_names: Vec<String>, target_name: String) -> Result<Self> {
        if x.nrows() != y.len() || feature_names.len() != x.ncols() {
            return Err(Error::Shape(format!(
                "dataset parts disagree: x is {} x {}, y has {}, {} feature names",
                x.nrows(),
                x.ncols(),
                y.len(),
                feature_names.len()
            )));
        }
        if y.is_empty() {
            return Err(Error::Domain("dataset has no rows".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("dataset contains a non-finite value".into()));
        }
        Ok(Dataset {
            x,
            y,
            feature_names,
            target_name,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn predictors(&self) -> usize {
        self.x.ncols()
    }

    /// Feature names followed by the target name.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = self.feature_names.clone();
        names.push(self.target_name.clone());
        names
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let (x, y) = select_rows(&self.x, &self.y, rows);
        Dataset {
            x,
            y,
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
        }
    }
}

pub fn select_rows(x: &DMatrix<f64>, y: &[f64], rows: &[usize]) -> (DMatrix<f64>, Vec<f64>) {
    let xs = DMatrix::from_fn(rows.len(), x.ncols(), |r, j| x[(rows[r], j)]);
    let ys = rows.iter().map(|&i| y[i]).collect();
    (xs, ys)
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads the named numeric columns; returns row-major data and the row count.
fn read_columns(path: &Path, select: impl FnOnce(&[String]) -> Vec<String>) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(csv_error(path, "file is empty or has no header row"));
    }
    let names = select(&headers);
    let idx = names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| csv_error(path, format!("missing column '{name}'")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut data = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        // header is line 1
        let line = r + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        for (&i, name) in idx.iter().zip(&names) {
            let raw = record.get(i).unwrap_or("");
            let fail = |message: String| Error::Cell {
                row: line,
                column: name.clone(),
                message,
            };
            if raw.is_empty() {
                return Err(fail("empty cell".into()));
            }
            let v: f64 = raw.parse().map_err(|_| fail(format!("'{raw}' is not a number")))?;
            if !v.is_finite() {
                return Err(fail(format!("'{raw}' is not finite")));
            }
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(csv_error(path, "file has a header but no data rows"));
    }
    Ok((names, data, rows))
}

/// Reads `target` and `features` from a headed CSV file. An empty feature
/// list selects every column except the target.
pub fn load_csv(path: impl AsRef<Path>, target: &str, features: &[String]) -> Result<Dataset> {
    let path = path.as_ref();
    let (names, data, rows) = read_columns(path, |headers| {
        let mut names: Vec<String> = if features.is_empty() {
            headers.iter().filter(|h| *h != target).cloned().collect()
        } else {
            features.to_vec()
        };
        names.push(target.to_string());
        names
    })?;
    let p = names.len() - 1;
    if p == 0 {
        return Err(csv_error(path, "no feature columns selected"));
    }
    let full = DMatrix::from_row_slice(rows, p + 1, &data);
    let x = full.columns(0, p).into_owned();
    let y = full.column(p).iter().copied().collect();
    Dataset::new(x, y, names[..p].to_vec(), target.to_string())
}

/// Reads feature columns only. An empty list selects every column except
/// `exclude`.
pub fn load_features(
    path: impl AsRef<Path>,
    features: &[String],
    exclude: Option<&str>,
) -> Result<(DMatrix<f64>, Vec<String>)> {
    let path = path.as_ref();
    let (names, data, rows) = read_columns(path, |headers| {
        if features.is_empty() {
            headers
                .iter()
                .filter(|h| Some(h.as_str()) != exclude)
                .cloned()
                .collect()
        } else {
            features.to_vec()
        }
    })?;
    if names.is_empty() {
        return Err(csv_error(path, "no feature columns selected"));
    }
    Ok((DMatrix::from_row_slice(rows, names.len(), &data), names))
}

/// Writes features then target; floats use the shortest exact representation.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    writer
        .write_record(dataset.column_names())
        .map_err(|e| csv_error(path, e))?;
    for i in 0..dataset.len() {
        let mut row: Vec<String> = (0..dataset.predictors())
            .map(|j| dataset.x[(i, j)].to_string())
            .collect();
        row.push(dataset.y[i].to_string());
        writer.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Linear-interpolation empirical quantile of sorted data
/// (`h = (n − 1) q`, the common default definition).
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-coordinate box `[lower_j, upper_j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantileBounds {
    pub coverage: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl QuantileBounds {
    pub fn contains(&self, row: &[f64]) -> bool {
        row.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn contains_row(&self, x: &DMatrix<f64>, i: usize) -> bool {
        (0..x.ncols()).all(|j| x[(i, j)] >= self.lower[j] && x[(i, j)] <= self.upper[j])
    }
}

/// The central `coverage` quantile box of each column of `x`.
pub fn quantile_box(x: &DMatrix<f64>, coverage: f64) -> Result<QuantileBounds> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::Domain(format!("coverage must be in (0, 1], got {coverage}")));
    }
    if x.nrows() == 0 {
        return Err(Error::Domain("cannot take quantiles of an empty sample".into()));
    }
    let alpha = 1.0 - coverage;
    let mut lower = Vec::with_capacity(x.ncols());
    let mut upper = Vec::with_capacity(x.ncols());
    for j in 0..x.ncols() {
        let mut col: Vec<f64> = x.column(j).iter().copied().collect();
        col.sort_by(f64::total_cmp);
        lower.push(empirical_quantile(&col, alpha / 2.0));
        upper.push(empirical_quantile(&col, 1.0 - alpha / 2.0));
    }
    Ok(QuantileBounds { coverage, lower, upper })
}

/// Keeps the rows of `dataset` inside `bounds`.
pub fn apply_bounds(dataset: &Dataset, bounds: &QuantileBounds) -> Result<Dataset> {
    let rows: Vec<usize> = (0..dataset.len())
        .filter(|&i| bounds.contains_row(&dataset.x, i))
        .collect();
    if rows.is_empty() {
        return Err(Error::Domain("quantile restriction removed every row".into()));
    }
    Ok(dataset.subset(&rows))
}

/// Restricts to the central `coverage` quantile box, returning the bounds
/// for reuse at prediction time.
pub fn quantile_restrict(dataset: &Dataset, coverage: f64) -> Result<(Dataset, QuantileBounds)> {
    let bounds = quantile_box(&dataset.x, coverage)?;
    Ok((apply_bounds(dataset, &bounds)?, bounds))
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, 0));
    idx
}

/// Seeded shuffle, then the first `round(n · train_fraction)` rows train.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = dataset.len();
    let n_train = (n as f64 * train_fraction).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Domain(format!(
            "split of {n} rows at {train_fraction} leaves an empty side"
        )));
    }
    let idx = shuffled(n, seed);
    Ok((dataset.subset(&idx[..n_train]), dataset.subset(&idx[n_train..])))
}

/// Fold index in `0..k` for each of `n` rows; fold sizes differ by at most one.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Domain(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Domain(format!("k = {k} folds exceed the {n} available rows")));
    }
    let mut folds = vec![0; n];
    for (pos, &i) in shuffled(n, seed).iter().enumerate() {
        folds[i] = pos % k;
    }
    Ok(folds)
}

pub fn rmse(predicted: &[f64], observed: &[f64]) -> Result<f64> {
    if predicted.is_empty() {
        return Err(Error::Domain("RMSE of an empty set".into()));
    }
    if predicted.len() != observed.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} observations",
            predicted.len(),
            observed.len()
        )));
    }
    let ss: f64 = predicted.iter().zip(observed).map(|(p, o)| (p - o) * (p - o)).sum();
    Ok((ss / predicted.len() as f64).sqrt())
}

/// Test-set RMSE in response units.
pub fn evaluate(model: &FittedAdditiveModel, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Domain("empty test set".into()));
    }
    rmse(&model.predict(&test.x)?, &test.y)
}
