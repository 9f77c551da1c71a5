//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerical code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.random::<f64>())
}

/// Spectral decomposition of the Gram matrix `BᵀB`, with eigenvalues at
/// or below `1e−11 · λ_max` dropped.
fn gram_spectrum(b: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = (b.transpose() * b).symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > 1e-11 * max { l } else { 0.0 })
        .collect();
    (keep, eig.eigenvectors)
}

/// Minimum-norm least-squares solution `B⁺y = V Λ⁺ Vᵀ Bᵀ y`.
pub fn pinv_solve(b: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let (lambda, v) = gram_spectrum(b);
    let bty = b.transpose() * y;
    let mut x = DVector::zeros(b.ncols());
    for (i, &l) in lambda.iter().enumerate() {
        if l > 0.0 {
            x += v.column(i) * (v.column(i).dot(&bty) / l);
        }
    }
    x
}

pub fn numerical_rank(b: &DMatrix<f64>) -> usize {
    gram_spectrum(b).0.iter().filter(|&&l| l > 0.0).count()
}

/// Ridge solution from the normal equations via Cholesky.
pub fn ridge_normal_equations(b: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let m = b.ncols();
    let g = b.transpose() * b + DMatrix::identity(m, m) * lambda;
    g.cholesky().expect("SPD").solve(&(b.transpose() * y))
}

/// Composite Simpson rule on [a, b] with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    assert!(m.is_multiple_of(2));
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// φ at the dyadic points i/2^depth of [0, L−1] by the cascade recursion
/// φ(x) = √2 Σ h_k φ(2x − k), seeded with the integer samples.
pub fn cascade(h: &[f64], integer_values: &[f64], depth: u32) -> Vec<f64> {
    let support = h.len() - 1;
    let mut vals: Vec<f64> = (0..=support)
        .map(|i| integer_values.get(i).copied().unwrap_or(0.0))
        .collect();
    for d in 1..=depth {
        let half = 1isize << (d - 1);
        let prev = vals;
        vals = (0..=support << d)
            .map(|i| {
                let acc: f64 = h
                    .iter()
                    .enumerate()
                    .filter_map(|(k, hk)| {
                        let idx = i as isize - k as isize * half;
                        (idx >= 0 && (idx as usize) < prev.len()).then(|| hk * prev[idx as usize])
                    })
                    .sum();
                std::f64::consts::SQRT_2 * acc
            })
            .collect();
    }
    vals
}
