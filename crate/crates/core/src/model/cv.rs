use nalgebra::DMatrix;

use super::fit::{fit, FitConfig};
use crate::dataio::{kfold, rmse, select_rows};
use crate::design::CoefficientLayout;
use crate::error::{Error, Result};

/// Picks the truncation threshold from `grid` that minimizes the mean
/// out-of-fold RMSE (response units). Ties go to the larger threshold.
pub fn cv_select_beta(
    x: &DMatrix<f64>,
    y: &[f64],
    config: &FitConfig,
    folds: usize,
    grid: &[f64],
    seed: u64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Domain("threshold grid is empty".into()));
    }
    if let Some(b) = grid.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
        return Err(Error::Domain(format!("threshold candidates must be positive, got {b}")));
    }
    if folds < 2 {
        return Err(Error::Domain(format!(
            "cross-validation needs at least 2 folds, got {folds}"
        )));
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let assignment = kfold(x.nrows(), folds, seed)?;
    let mut totals = vec![0.0; grid.len()];
    for fold in 0..folds {
        let train: Vec<usize> = (0..x.nrows()).filter(|&i| assignment[i] != fold).collect();
        let test: Vec<usize> = (0..x.nrows()).filter(|&i| assignment[i] == fold).collect();
        if let Some(level) = config.level {
            let cols = CoefficientLayout::new(level, x.ncols()).columns();
            if train.len() < cols {
                return Err(Error::Dimensionality {
                    columns: cols,
                    rows: train.len(),
                });
            }
        }
        let (x_train, y_train) = select_rows(x, y, &train);
        let (x_test, y_test) = select_rows(x, y, &test);
        let mut cfg = config.clone();
        cfg.beta = None;
        let (model, _) = fit(&x_train, &y_train, &cfg)?;
        for (total, &beta) in totals.iter_mut().zip(grid) {
            let pred = model.with_beta(beta)?.predict(&x_test)?;
            *total += rmse(&pred, &y_test)?;
        }
    }
    let mut best = 0;
    for i in 1..grid.len() {
        let (a, b) = (totals[i], totals[best]);
        let tie = (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if a < b && !tie || tie && grid[i] > grid[best] {
            best = i;
        }
    }
    Ok(grid[best])
}
