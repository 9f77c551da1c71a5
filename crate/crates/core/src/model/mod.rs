//! The additive wavelet least-squares estimator.
//!
//! A fit standardizes the response, rescales each predictor to `[0, 1]`,
//! expands every component in periodized scaling functions at one level
//! `J` and solves a single minimum-norm least-squares problem. Predictions
//! are truncated at `β_n` on the standardized scale and mapped back.

mod cv;
mod fit;
mod io;
mod params;

pub use cv::cv_select_beta;
pub use fit::{fit, FitConfig, FitReport};
pub use io::{load_model, save_model, MODEL_FORMAT, MODEL_VERSION};
pub use params::{
    estimate_sigma, select_beta, select_level, truncate, BetaSelection, SigmaMethod, MAD_GAUSS, SIGMA_FLOOR,
};

use nalgebra::DMatrix;

use crate::dataio::QuantileBounds;
use crate::design::{predict_row, CoefficientLayout};
use crate::error::{Error, Result};
use crate::wavelet::{evaluator, ScalingEvaluator};

/// Points of the trapezoid rule used to center components.
pub const CENTERING_POINTS: usize = 1025;

/// A fitted additive model. Immutable; prediction is thread safe.
#[derive(Debug, Clone)]
pub struct FittedAdditiveModel {
    filter_name: String,
    level: u32,
    predictors: usize,
    coefficients: Vec<f64>,
    beta0: f64,
    y_mean: f64,
    y_std: f64,
    x_min: Vec<f64>,
    x_max: Vec<f64>,
    beta_n: f64,
    sigma_hat: f64,
    quantile_bounds: Option<QuantileBounds>,
    ev: ScalingEvaluator,
    component_means: Vec<f64>,
}

/// Raw parts of a model, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParts {
    pub filter_name: String,
    pub level: u32,
    pub predictors: usize,
    pub coefficients: Vec<f64>,
    pub beta0: f64,
    pub y_mean: f64,
    pub y_std: f64,
    pub x_min: Vec<f64>,
    pub x_max: Vec<f64>,
    pub beta_n: f64,
    pub sigma_hat: f64,
    pub quantile_bounds: Option<QuantileBounds>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PredictOptions {
    /// Reject inputs outside the training box instead of clipping them.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub values: Vec<f64>,
    /// Rows with at least one coordinate clipped to the training box.
    pub clipped_rows: usize,
}

impl FittedAdditiveModel {
    pub fn from_parts(parts: ModelParts) -> Result<Self> {
        let ModelParts {
            filter_name,
            level,
            predictors,
            coefficients,
            beta0,
            y_mean,
            y_std,
            x_min,
            x_max,
            beta_n,
            sigma_hat,
            quantile_bounds,
        } = parts;
        let ev = evaluator(&filter_name)?;
        let layout = CoefficientLayout::new(level, predictors);
        if level > 30 || predictors == 0 || coefficients.len() != layout.columns() {
            return Err(Error::Schema(format!(
                "expected {} coefficients for p = {predictors}, J = {level}, found {}",
                layout.columns(),
                coefficients.len()
            )));
        }
        if x_min.len() != predictors || x_max.len() != predictors {
            return Err(Error::Schema(
                "x_min/x_max length does not match the predictor count".into(),
            ));
        }
        if let Some(j) = (0..predictors).find(|&j| !(x_max[j] > x_min[j])) {
            return Err(Error::Domain(format!("predictor {j} has an empty range")));
        }
        if !(beta_n > 0.0) || !(y_std > 0.0) || !(sigma_hat >= 0.0) {
            return Err(Error::Schema(
                "beta_n and y_std must be positive, sigma_hat non-negative".into(),
            ));
        }
        let finite = coefficients
            .iter()
            .chain(&x_min)
            .chain(&x_max)
            .chain([&beta0, &y_mean, &y_std, &beta_n]);
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema("non-finite model parameter".into()));
        }
        let mut model = FittedAdditiveModel {
            filter_name,
            level,
            predictors,
            coefficients,
            beta0,
            y_mean,
            y_std,
            x_min,
            x_max,
            beta_n,
            sigma_hat,
            quantile_bounds,
            ev,
            component_means: Vec::new(),
        };
        model.component_means = (0..predictors).map(|j| model.component_mean(j)).collect();
        Ok(model)
    }

    pub fn to_parts(&self) -> ModelParts {
        ModelParts {
            filter_name: self.filter_name.clone(),
            level: self.level,
            predictors: self.predictors,
            coefficients: self.coefficients.clone(),
            beta0: self.beta0,
            y_mean: self.y_mean,
            y_std: self.y_std,
            x_min: self.x_min.clone(),
            x_max: self.x_max.clone(),
            beta_n: self.beta_n,
            sigma_hat: self.sigma_hat,
            quantile_bounds: self.quantile_bounds.clone(),
        }
    }

    pub fn filter_name(&self) -> &str {
        &self.filter_name
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn predictors(&self) -> usize {
        self.predictors
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn layout(&self) -> CoefficientLayout {
        CoefficientLayout::new(self.level, self.predictors)
    }

    /// Intercept on the standardized scale (zero: the mean is removed).
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// `β̂₀ = ȳ` on the response scale.
    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn y_std(&self) -> f64 {
        self.y_std
    }

    pub fn x_min(&self) -> &[f64] {
        &self.x_min
    }

    pub fn x_max(&self) -> &[f64] {
        &self.x_max
    }

    pub fn beta_n(&self) -> f64 {
        self.beta_n
    }

    pub fn sigma_hat(&self) -> f64 {
        self.sigma_hat
    }

    pub fn quantile_bounds(&self) -> Option<&QuantileBounds> {
        self.quantile_bounds.as_ref()
    }

    pub fn evaluator(&self) -> &ScalingEvaluator {
        &self.ev
    }

    /// Same model with a different truncation threshold.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!(
                "truncation threshold must be positive, got {beta}"
            )));
        }
        let mut m = self.clone();
        m.beta_n = beta;
        Ok(m)
    }

    /// Maps a raw input row into `[0, 1]^p`, clipping to the training box.
    /// Returns whether any coordinate was clipped.
    pub fn rescale_row(&self, raw: &[f64], out: &mut [f64], strict: bool) -> Result<bool> {
        if raw.len() != self.predictors {
            return Err(Error::Shape(format!(
                "model expects {} predictors, input row has {}",
                self.predictors,
                raw.len()
            )));
        }
        let mut clipped = false;
        for j in 0..self.predictors {
            let v = raw[j];
            if !v.is_finite() {
                return Err(Error::Numeric(format!("non-finite input {v} in predictor {j}")));
            }
            let (lo, hi) = (self.x_min[j], self.x_max[j]);
            let c = v.clamp(lo, hi);
            if c != v {
                if strict {
                    return Err(Error::Domain(format!(
                        "predictor {j} value {v} is outside the training range [{lo}, {hi}]"
                    )));
                }
                clipped = true;
            }
            out[j] = ((c - lo) / (hi - lo)).clamp(0.0, 1.0);
        }
        Ok(clipped)
    }

    /// Untruncated standardized score `B(u)ᵀ c*` at a point of `[0, 1]^p`.
    pub fn raw_score_unit(&self, unit: &[f64]) -> Result<f64> {
        let row = predict_row(unit, self.level, &self.ev)?;
        Ok(row.iter().zip(&self.coefficients).map(|(b, c)| b * c).sum::<f64>() + self.beta0)
    }

    /// Truncated standardized prediction at a point of `[0, 1]^p`.
    pub fn standardized_unit(&self, unit: &[f64]) -> Result<f64> {
        Ok(truncate(self.raw_score_unit(unit)?, self.beta_n))
    }

    pub fn predict_with(&self, x: &DMatrix<f64>, options: PredictOptions) -> Result<Prediction> {
        let mut unit = vec![0.0; self.predictors];
        let mut raw = vec![0.0; self.predictors];
        let mut values = Vec::with_capacity(x.nrows());
        let mut clipped_rows = 0;
        for i in 0..x.nrows() {
            if x.ncols() != self.predictors {
                return Err(Error::Shape(format!(
                    "model expects {} predictors, input has {}",
                    self.predictors,
                    x.ncols()
                )));
            }
            for j in 0..self.predictors {
                raw[j] = x[(i, j)];
            }
            if self.rescale_row(&raw, &mut unit, options.strict)? {
                clipped_rows += 1;
            }
            values.push(self.y_mean + self.y_std * self.standardized_unit(&unit)?);
        }
        Ok(Prediction { values, clipped_rows })
    }

    /// `ŷ = ȳ + s_y · T_β(B(x)ᵀ c*)` for each row of `x` (raw units).
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        Ok(self.predict_with(x, PredictOptions::default())?.values)
    }

    fn component_uncentered(&self, j: usize, x: f64) -> Result<f64> {
        let size = self.layout().block_size();
        let mut row = vec![0.0; size];
        let mut scratch = vec![0.0; self.ev.dim()];
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("component evaluation needs x in [0,1], got {x}")));
        }
        self.ev.periodized_row_into(self.level, x, &mut row, &mut scratch);
        let block = &self.coefficients[self.layout().block(j)];
        Ok(row.iter().zip(block).map(|(b, c)| b * c).sum())
    }

    fn component_mean(&self, j: usize) -> f64 {
        let m = CENTERING_POINTS - 1;
        let h = 1.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            acc += w * self.component_uncentered(j, i as f64 * h).unwrap_or(0.0);
        }
        acc * h
    }

    /// Centered component `f̂_j(x) = Σ_k c_{jk} φ^per_{Jk}(x) − ∫ f̂_j` on
    /// the standardized scale, for `x ∈ [0, 1]` and zero-based `j`.
    pub fn component(&self, j: usize, x: f64) -> Result<f64> {
        if j >= self.predictors {
            return Err(Error::Index {
                what: "predictor",
                index: j,
                bound: self.predictors,
            });
        }
        Ok(self.component_uncentered(j, x)? - self.component_means[j])
    }

    /// Untruncated score and all centered components at one point of
    /// `[0, 1]^p`, from a single basis evaluation.
    pub fn decompose_unit(&self, unit: &[f64]) -> Result<(f64, Vec<f64>)> {
        let row = predict_row(unit, self.level, &self.ev)?;
        let layout = self.layout();
        let mut score = self.beta0;
        let mut components = Vec::with_capacity(self.predictors);
        for j in 0..self.predictors {
            let block = layout.block(j);
            let v: f64 = row[block.clone()]
                .iter()
                .zip(&self.coefficients[block])
                .map(|(b, c)| b * c)
                .sum();
            score += v;
            components.push(v - self.component_means[j]);
        }
        Ok((score, components))
    }

    /// Standardized intercept after the component means are absorbed,
    /// so that `intercept + Σ_j component(j, x_j)` is the untruncated score.
    pub fn intercept(&self) -> f64 {
        self.beta0 + self.component_means.iter().sum::<f64>()
    }
}
