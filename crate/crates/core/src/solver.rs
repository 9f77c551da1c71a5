//! Minimum-norm least squares through a singular value decomposition.
//!
//! Tall systems are first reduced with a Householder QR; the triangular
//! factor is then decomposed by one-sided Jacobi rotations, which keep full
//! accuracy on exactly rank-deficient input. Normal equations are never
//! formed. Singular values at or below `rank_tolerance · σ_max` are treated
//! as zero, which is what removes the `(p − 1)`-dimensional null space of an
//! additive design matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverOptions {
    /// Relative rank tolerance. `None` means `ε · max(n, m)`.
    pub rank_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub coefficients: DVector<f64>,
    pub effective_rank: usize,
    pub residual_norm: f64,
    /// Relative tolerance that was applied to the singular values.
    pub rank_tolerance: f64,
}

impl LsqSolution {
    pub fn fitted(&self, b: &DMatrix<f64>) -> DVector<f64> {
        b * &self.coefficients
    }
}

fn validate(b: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if b.nrows() == 0 || b.ncols() == 0 {
        return Err(Error::Shape(format!(
            "empty design matrix {} x {}",
            b.nrows(),
            b.ncols()
        )));
    }
    if b.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "design has {} rows but the response has {} entries",
            b.nrows(),
            y.len()
        )));
    }
    if b.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite entry in least-squares input".into()));
    }
    Ok(())
}

pub fn default_rank_tolerance(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

const MAX_SWEEPS: usize = 80;

/// One-sided Jacobi: rotates the columns of `a` in place until they are
/// mutually orthogonal, so that `A_in · V = A_out`. Returns `V`.
///
/// Columns whose norm falls below `rel_tol · ‖A‖_F / √m` are left alone;
/// that bound never exceeds `rel_tol · σ_max`, so such columns are
/// discarded by the rank cutoff anyway.
fn jacobi_orthogonalize(a: &mut DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let (rows, m) = a.shape();
    let mut v = DMatrix::<f64>::identity(m, m);
    let frob2: f64 = a.iter().map(|x| x * x).sum();
    let floor = rel_tol * rel_tol * frob2 / m as f64;
    let eps = f64::EPSILON * (m as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..m {
            for j in i + 1..m {
                let (ci, cj) = two_columns(a.as_mut_slice(), rows, i, j);
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for (x, y) in ci.iter().zip(cj.iter()) {
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if alpha <= floor || beta <= floor || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(ci, cj, c, s);
                let (vi, vj) = two_columns(v.as_mut_slice(), m, i, j);
                rotate(vi, vj, c, s);
            }
        }
        if !rotated {
            return Ok(v);
        }
    }
    Err(Error::Numeric(format!(
        "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
    )))
}

fn two_columns(data: &mut [f64], rows: usize, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(i < j);
    let (head, tail) = data.split_at_mut(j * rows);
    (&mut head[i * rows..(i + 1) * rows], &mut tail[..rows])
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (p, q) = (*a, *b);
        *a = c * p - s * q;
        *b = s * p + c * q;
    }
}

/// `min ‖Bc − y‖² + λ‖c‖²`; `λ = 0` is the minimum-norm solution.
fn solve_filtered(b: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, options: SolverOptions) -> Result<LsqSolution> {
    validate(b, y)?;
    let rel_tol = options
        .rank_tolerance
        .unwrap_or_else(|| default_rank_tolerance(b.nrows(), b.ncols()));
    if !(rel_tol >= 0.0) {
        return Err(Error::Domain(format!(
            "rank tolerance must be non-negative, got {rel_tol}"
        )));
    }
    let (n, m) = b.shape();
    // reduce to a square triangular problem with the same singular values
    let (mut w, z) = if n > m {
        let qr = b.clone().qr();
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        (qr.r(), qty.rows(0, m).into_owned())
    } else {
        (b.clone(), y.clone())
    };
    let v = jacobi_orthogonalize(&mut w, rel_tol)?;
    let sigma: Vec<f64> = (0..m).map(|i| w.column(i).norm()).collect();
    let s_max = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * s_max;
    let mut coefficients = DVector::<f64>::zeros(m);
    let mut rank = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if s > cutoff {
            rank += 1;
            // ‖w_i‖ = σ_i, so w_i·z / (σ² + λ) is σ_i (u_i·z) / (σ² + λ)
            coefficients.axpy(w.column(i).dot(&z) / (s * s + lambda), &v.column(i), 1.0);
        }
    }
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric("least-squares solution is not finite".into()));
    }
    let residual_norm = (b * &coefficients - y).norm();
    Ok(LsqSolution {
        coefficients,
        effective_rank: rank,
        residual_norm,
        rank_tolerance: rel_tol,
    })
}

/// Minimum-norm minimiser of `‖Bc − y‖²`.
pub fn solve_lsq(b: &DMatrix<f64>, y: &DVector<f64>) -> Result<LsqSolution> {
    solve_filtered(b, y, 0.0, SolverOptions::default())
}

pub fn solve_lsq_with(b: &DMatrix<f64>, y: &DVector<f64>, options: SolverOptions) -> Result<LsqSolution> {
    solve_filtered(b, y, 0.0, options)
}

/// Ridge-regularised solve, `min ‖Bc − y‖² + λ‖c‖²`.
pub fn solve_ridge(b: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<LsqSolution> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "ridge penalty must be a finite non-negative number, got {lambda}"
        )));
    }
    solve_filtered(b, y, lambda, SolverOptions::default())
}
