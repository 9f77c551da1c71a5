use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::params::{estimate_sigma, mean, sample_sd, select_beta, select_level, SigmaMethod};
use super::{FittedAdditiveModel, ModelParts};
use crate::dataio::{quantile_box, QuantileBounds};
use crate::design::{build_design, CoefficientLayout};
use crate::error::{Error, Result};
use crate::solver::{solve_lsq, solve_ridge};
use crate::wavelet::evaluator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub filter: String,
    pub level: Option<u32>,
    pub beta: Option<f64>,
    pub sigma_method: SigmaMethod,
    pub ridge_lambda: Option<f64>,
    /// Central coverage of the per-coordinate quantile box, e.g. `0.95`.
    pub quantile_restrict: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            filter: "coif24tap".into(),
            level: None,
            beta: None,
            sigma_method: SigmaMethod::MadDetail,
            ridge_lambda: None,
            quantile_restrict: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub level: u32,
    pub beta_n: f64,
    pub sigma_hat: f64,
    pub sigma_floored: bool,
    pub effective_rank: usize,
    pub columns: usize,
    pub rows_used: usize,
    pub dropped_rows: usize,
    /// Standardized in-sample fitted values `B c*` (untruncated).
    pub fitted: Vec<f64>,
}

fn check_finite(x: &DMatrix<f64>, y: &[f64]) -> Result<()> {
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("response value at row {i} is not finite")));
    }
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if !x[(i, j)].is_finite() {
                return Err(Error::Numeric(format!("predictor {j} at row {i} is not finite")));
            }
        }
    }
    Ok(())
}

/// Responses ordered lexicographically by their design rows (ties by the
/// response), so the detail-based noise estimate does not depend on the
/// order the rows were supplied in.
fn canonical_order(unit: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| {
        (0..unit.ncols())
            .map(|j| unit[(a, j)].total_cmp(&unit[(b, j)]))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| y[a].total_cmp(&y[b]))
    });
    idx.into_iter().map(|i| y[i]).collect()
}

/// Fits the additive model to raw data (`x`: n × p, `y`: n).
pub fn fit(x: &DMatrix<f64>, y: &[f64], config: &FitConfig) -> Result<(FittedAdditiveModel, FitReport)> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::Shape(format!("training data is {n} x {p}")));
    }
    if y.len() != n {
        return Err(Error::Shape(format!("{n} predictor rows but {} responses", y.len())));
    }
    check_finite(x, y)?;
    let ev = evaluator(&config.filter)?;

    let (rows, bounds): (Vec<usize>, Option<QuantileBounds>) = match config.quantile_restrict {
        Some(coverage) => {
            let b = quantile_box(x, coverage)?;
            let kept = (0..n).filter(|&i| b.contains_row(x, i)).collect::<Vec<_>>();
            if kept.is_empty() {
                return Err(Error::Domain("quantile restriction removed every row".into()));
            }
            (kept, Some(b))
        }
        None => ((0..n).collect(), None),
    };
    let n_used = rows.len();

    let (x_min, x_max) = match &bounds {
        Some(b) => (b.lower.clone(), b.upper.clone()),
        None => {
            let mut lo = vec![f64::INFINITY; p];
            let mut hi = vec![f64::NEG_INFINITY; p];
            for i in 0..n {
                for j in 0..p {
                    lo[j] = lo[j].min(x[(i, j)]);
                    hi[j] = hi[j].max(x[(i, j)]);
                }
            }
            (lo, hi)
        }
    };
    if let Some(j) = (0..p).find(|&j| !(x_max[j] > x_min[j])) {
        return Err(Error::Domain(format!(
            "predictor column {j} is degenerate (min = max = {})",
            x_min[j]
        )));
    }

    let y_used: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
    let y_mean = mean(&y_used);
    let sd = if n_used > 1 { sample_sd(&y_used) } else { 0.0 };
    // a constant response standardizes to zeros with unit scale
    let y_std = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
    let y_std_vec = DVector::from_iterator(n_used, y_used.iter().map(|v| (v - y_mean) / y_std));

    let level = match config.level {
        Some(j) => j,
        None => select_level(n_used)?,
    };
    let layout = CoefficientLayout::new(level, p);
    if level > 30 || layout.columns() > n_used {
        return Err(Error::Dimensionality {
            columns: p.saturating_mul(1usize.checked_shl(level).unwrap_or(usize::MAX)),
            rows: n_used,
        });
    }

    let mut unit = DMatrix::<f64>::zeros(n_used, p);
    for (r, &i) in rows.iter().enumerate() {
        for j in 0..p {
            unit[(r, j)] = ((x[(i, j)] - x_min[j]) / (x_max[j] - x_min[j])).clamp(0.0, 1.0);
        }
    }
    let design = build_design(&unit, level, &ev)?;
    let solution = match config.ridge_lambda {
        Some(lambda) => solve_ridge(design.matrix(), &y_std_vec, lambda)?,
        None => solve_lsq(design.matrix(), &y_std_vec)?,
    };
    let fitted = design.matrix() * &solution.coefficients;

    let sigma_hat = estimate_sigma(
        &canonical_order(&unit, y_std_vec.as_slice()),
        config.sigma_method,
        ev.filter(),
    )?;
    let (beta_n, sigma_floored) = match config.beta {
        Some(b) if b > 0.0 && b.is_finite() => (b, false),
        Some(b) => return Err(Error::Domain(format!("truncation threshold must be positive, got {b}"))),
        None => {
            let sel = select_beta(sigma_hat, n_used)?;
            (sel.beta, sel.sigma_floored)
        }
    };

    let model = FittedAdditiveModel::from_parts(ModelParts {
        filter_name: config.filter.clone(),
        level,
        predictors: p,
        coefficients: solution.coefficients.iter().copied().collect(),
        beta0: 0.0,
        y_mean,
        y_std,
        x_min,
        x_max,
        beta_n,
        sigma_hat,
        quantile_bounds: bounds,
    })?;
    let report = FitReport {
        level,
        beta_n,
        sigma_hat,
        sigma_floored,
        effective_rank: solution.effective_rank,
        columns: layout.columns(),
        rows_used: n_used,
        dropped_rows: n - n_used,
        fitted: fitted.iter().copied().collect(),
    };
    Ok((model, report))
}
