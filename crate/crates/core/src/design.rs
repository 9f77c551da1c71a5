//! Block design matrix `B` of periodized scaling functions.
//!
//! Row `i` is `B(x_i) = (φ^per_{J,0}(x_{i1}), …, φ^per_{J,2^J−1}(x_{i1}),
//! …, φ^per_{J,2^J−1}(x_{ip}))`. Predictor `j` (zero based here) owns the
//! column block `j·2^J .. (j+1)·2^J`.
//!
//! Every block row sums to `2^{J/2}`, so for `p ≥ 2` the block-sum columns
//! coincide and `rank(B) ≤ p·2^J − (p − 1)`. The solver handles the
//! deficiency; nothing is masked here.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::wavelet::ScalingEvaluator;

/// Mapping between `(predictor, translate)` pairs and column indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientLayout {
    level: u32,
    predictors: usize,
}

impl CoefficientLayout {
    pub fn new(level: u32, predictors: usize) -> Self {
        CoefficientLayout { level, predictors }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn predictors(&self) -> usize {
        self.predictors
    }

    /// `2^J`.
    pub fn block_size(&self) -> usize {
        1 << self.level
    }

    pub fn columns(&self) -> usize {
        self.predictors * self.block_size()
    }

    /// Column of translate `k` in the block of predictor `j` (zero based).
    pub fn column(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < self.predictors && k < self.block_size());
        j * self.block_size() + k
    }

    /// Inverse of [`Self::column`].
    pub fn position(&self, column: usize) -> (usize, usize) {
        (column / self.block_size(), column % self.block_size())
    }

    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        let s = self.block_size();
        j * s..(j + 1) * s
    }
}

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    matrix: DMatrix<f64>,
    layout: CoefficientLayout,
}

impl DesignMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn layout(&self) -> CoefficientLayout {
        self.layout
    }

    pub fn level(&self) -> u32 {
        self.layout.level
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn columns(&self) -> usize {
        self.matrix.ncols()
    }
}

fn check_unit_interval(x: f64, what: impl FnOnce() -> String) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{} = {x} is outside [0, 1]", what())))
    }
}

/// Builds `B` for the rows of `x` (n × p, entries in `[0, 1]`).
///
/// Rows are filled in parallel; each entry depends only on its own input,
/// so the result does not depend on the thread count.
pub fn build_design(x: &DMatrix<f64>, level: u32, ev: &ScalingEvaluator) -> Result<DesignMatrix> {
    let (n, p) = x.shape();
    let layout = CoefficientLayout::new(level, p);
    if p == 0 || n == 0 {
        return Err(Error::Shape(format!("design input is {n} x {p}")));
    }
    if level >= 31 || layout.columns() > n {
        return Err(Error::Dimensionality {
            columns: p.saturating_mul(1usize.checked_shl(level).unwrap_or(usize::MAX)),
            rows: n,
        });
    }
    for i in 0..n {
        for j in 0..p {
            check_unit_interval(x[(i, j)], || format!("X[{i}, {j}]"))?;
        }
    }
    let cols = layout.columns();
    let mut rows = vec![0.0; n * cols];
    rows.par_chunks_mut(cols).enumerate().for_each(|(i, out)| {
        let mut scratch = vec![0.0; ev.dim()];
        for j in 0..p {
            ev.periodized_row_into(level, x[(i, j)], &mut out[layout.block(j)], &mut scratch);
        }
    });
    Ok(DesignMatrix {
        matrix: DMatrix::from_row_slice(n, cols, &rows),
        layout,
    })
}

/// The row `B(x)` for a single point, in the layout of [`build_design`].
pub fn predict_row(x: &[f64], level: u32, ev: &ScalingEvaluator) -> Result<Vec<f64>> {
    let layout = CoefficientLayout::new(level, x.len());
    for (j, &v) in x.iter().enumerate() {
        check_unit_interval(v, || format!("x[{j}]"))?;
    }
    let mut row = vec![0.0; layout.columns()];
    let mut scratch = vec![0.0; ev.dim()];
    for (j, &v) in x.iter().enumerate() {
        ev.periodized_row_into(level, v, &mut row[layout.block(j)], &mut scratch);
    }
    Ok(row)
}
