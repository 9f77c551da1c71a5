//! Point evaluation of scaling functions with the Daubechies–Lagarias
//! matrix product.
//!
//! For `t ∈ [0, 1)` let `v(t) = (φ(t), φ(t+1), …, φ(t+L−2))`. The
//! refinement equation gives `v(t/2) = T0·v(t)` and `v((t+1)/2) = T1·v(t)`
//! with `(T_d)_{ij} = √2·h_{2i+d−j}`. Reading the binary digits
//! `t = 0.d1 d2 d3…` therefore yields
//!
//! ```text
//! v(t) = T_{d1} T_{d2} ··· T_{dm} · v(0.d_{m+1} …)
//! ```
//!
//! The product converges to a rank-one matrix whose columns all equal
//! `v(t)`. Digits past `depth` are taken as zero, so the tail vector is
//! `v(0)` (the integer samples of φ, the unit eigenvector of `T0`) and the
//! result is the exact value of φ at `t` truncated to `depth` digits.
//! `x` is right-continuous at dyadic rationals.

use nalgebra::{DMatrix, DVector};

use super::filters::WaveletFilter;
use crate::error::{Error, Result};

/// Default number of binary digits consumed per evaluation. Fractional
/// parts of an `f64` carry at most 52 bits, so this evaluates φ at the
/// represented point up to rounding.
pub const DEFAULT_DEPTH: usize = 52;

/// Digits are packed into a `u64`.
pub const MAX_DEPTH: usize = 64;

/// Precomputed Daubechies–Lagarias matrices for one filter.
#[derive(Debug, Clone)]
pub struct ScalingEvaluator {
    filter: WaveletFilter,
    dim: usize,
    t0: Vec<f64>,
    t1: Vec<f64>,
    integer_values: Vec<f64>,
    depth: usize,
}

impl ScalingEvaluator {
    pub fn new(filter: WaveletFilter) -> Result<Self> {
        Self::with_depth(filter, DEFAULT_DEPTH)
    }

    pub fn with_depth(filter: WaveletFilter, depth: usize) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::Domain(format!(
                "evaluation depth must be in 1..={MAX_DEPTH}, got {depth}"
            )));
        }
        let dim = filter.support_len();
        let h = filter.coefficients();
        let entry = |d: usize, i: usize, j: usize| -> f64 {
            let idx = (2 * i + d) as isize - j as isize;
            if idx >= 0 && (idx as usize) < h.len() {
                std::f64::consts::SQRT_2 * h[idx as usize]
            } else {
                0.0
            }
        };
        let mut t0 = vec![0.0; dim * dim];
        let mut t1 = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                t0[i * dim + j] = entry(0, i, j);
                t1[i * dim + j] = entry(1, i, j);
            }
        }
        let integer_values = unit_eigenvector(&t0, dim)?;
        Ok(ScalingEvaluator {
            filter,
            dim,
            t0,
            t1,
            integer_values,
            depth,
        })
    }

    pub fn filter(&self) -> &WaveletFilter {
        &self.filter
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Dimension of the transition matrices, `L − 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t0(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.t0)
    }

    pub fn t1(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.t1)
    }

    /// φ at the integers `0, …, L−2`.
    pub fn integer_values(&self) -> &[f64] {
        &self.integer_values
    }

    /// Writes `φ(t + i)` for `i = 0..L−1` into `out`. `t` must lie in `[0, 1)`.
    pub fn translates_into(&self, t: f64, out: &mut [f64]) {
        debug_assert!((0.0..1.0).contains(&t));
        debug_assert_eq!(out.len(), self.dim);
        let digits = binary_digits(t, self.depth);
        let dim = self.dim;
        out.copy_from_slice(&self.integer_values);
        let mut stack = [0.0; 32];
        let mut heap = Vec::new();
        let scratch: &mut [f64] = if dim <= stack.len() {
            &mut stack[..dim]
        } else {
            heap.resize(dim, 0.0);
            &mut heap
        };
        for pos in (0..self.depth).rev() {
            let m = if digits >> pos & 1 == 1 { &self.t1 } else { &self.t0 };
            for (i, s) in scratch.iter_mut().enumerate() {
                let row = &m[i * dim..(i + 1) * dim];
                *s = row.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
            }
            out.copy_from_slice(scratch);
        }
    }

    /// `φ(t + i)` for `i = 0..L−1`.
    pub fn translates(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.translates_into(t, &mut out);
        out
    }

    /// φ(x); zero outside `[0, L−1)`.
    pub fn eval_phi(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("cannot evaluate phi at {x}")));
        }
        if x < 0.0 || x >= self.dim as f64 {
            return Ok(0.0);
        }
        let m = x.floor();
        let t = x - m;
        Ok(self.translates(t)[m as usize])
    }

    /// `φ^per_{J,k}(x) = Σ_l 2^{J/2} φ(2^J (x − l) − k)` for `x ∈ [0, 1]`.
    pub fn eval_phi_periodized(&self, level: u32, k: usize, x: f64) -> Result<f64> {
        let size = 1usize << level;
        if k >= size {
            return Err(Error::Index {
                what: "periodized translate",
                index: k,
                bound: size,
            });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!(
                "periodized evaluation needs x in [0,1], got {x}"
            )));
        }
        let scale = size as f64;
        let u = scale * x - k as f64;
        let support = self.dim as f64;
        // l ranges over integers with 0 <= u - scale*l < L-1
        let l_lo = ((u - support) / scale).floor() as i64;
        let l_hi = (u / scale).floor() as i64;
        let mut acc = 0.0;
        for l in l_lo..=l_hi {
            acc += self.eval_phi(u - scale * l as f64)?;
        }
        Ok(scale.sqrt() * acc)
    }

    /// Accumulates `φ^per_{J,k}(x)` for every `k` into `row`
    /// (length `2^J`), using a single matrix-product chain.
    pub fn periodized_row_into(&self, level: u32, x: f64, row: &mut [f64], scratch: &mut [f64]) {
        let size = 1usize << level;
        debug_assert_eq!(row.len(), size);
        let u = size as f64 * x;
        let m = u.floor();
        let t = u - m;
        let m = m as i64;
        self.translates_into(t, scratch);
        let norm = (size as f64).sqrt();
        for (i, &v) in scratch.iter().enumerate() {
            let k = (m - i as i64).rem_euclid(size as i64) as usize;
            row[k] += norm * v;
        }
    }

    /// The raw product `T_{d1} ··· T_{d_depth}` for the fractional part of `x`.
    pub fn product_matrix(&self, x: f64) -> DMatrix<f64> {
        let t = x - x.floor();
        let t0 = self.t0();
        let t1 = self.t1();
        let mut p = DMatrix::<f64>::identity(self.dim, self.dim);
        let digits = binary_digits(t, self.depth);
        for pos in 0..self.depth {
            p = if digits >> pos & 1 == 1 { &p * &t1 } else { &p * &t0 };
        }
        p
    }

    /// Largest spread between the columns of [`Self::product_matrix`].
    pub fn column_spread(&self, x: f64) -> f64 {
        let p = self.product_matrix(x);
        let mut spread: f64 = 0.0;
        for i in 0..self.dim {
            let row = p.row(i);
            let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
            spread = spread.max(hi - lo);
        }
        spread
    }
}

/// Bit `i` holds the `(i+1)`-th binary digit of `t`.
fn binary_digits(mut t: f64, depth: usize) -> u64 {
    let mut digits = 0u64;
    for pos in 0..depth {
        t *= 2.0;
        if t >= 1.0 {
            t -= 1.0;
            digits |= 1 << pos;
        }
    }
    digits
}

/// Solves `(T0 − I) v = 0`, `Σ v = 1`.
fn unit_eigenvector(t0: &[f64], dim: usize) -> Result<Vec<f64>> {
    let mut a = DMatrix::from_row_slice(dim, dim, t0) - DMatrix::<f64>::identity(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    // replace the last equation with the normalisation
    for j in 0..dim {
        a[(dim - 1, j)] = 1.0;
    }
    b[dim - 1] = 1.0;
    let v = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("integer samples of phi are not determined".into()))?;
    Ok(v.iter().copied().collect())
}
