//! The nine test functions on `[0, 1]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

pub const BASELINE_COUNT: usize = 9;

/// Value of baseline function `index` (1..=9) at `x`.
///
/// `f1` is `sin(2πx)/√2`.
pub fn eval_baseline(index: usize, x: f64) -> Result<f64> {
    let v = match index {
        1 => FRAC_1_SQRT_2 * (2.0 * PI * x).sin(),
        2 => 1.0 - 4.0 * (x - 0.5).abs(),
        3 => -(4.0 * PI * x + 1.0).cos(),
        4 => 8.0 * (x - 0.5).powi(2) - 2.0 / 3.0,
        5 => FRAC_1_SQRT_2 * (2.0 * PI * x).cos(),
        6 => FRAC_1_SQRT_2 * (4.0 * PI * x).cos(),
        7 => {
            -0.5275
                + 4.0 * (-500.0 * (x - 0.23).powi(2)).exp()
                + 2.0 * (-2000.0 * (x - 0.33).powi(2)).exp()
                + 4.0 * (-8000.0 * (x - 0.47).powi(2)).exp()
                + 3.0 * (-16000.0 * (x - 0.69).powi(2)).exp()
                + (-32000.0 * (x - 0.83).powi(2)).exp()
        }
        8 => 0.2 * (4.0 * PI * x + 1.0).cos() + 0.1 * (24.0 * PI * x + 1.0).cos(),
        9 => {
            let cubic = if x > 0.5 && x <= 0.8 {
                2.0 * x.powi(3)
            } else if x > 0.8 && x <= 1.0 {
                2.0 * (x - 1.0).powi(3)
            } else {
                0.0
            };
            -0.1744 + cubic
        }
        other => {
            return Err(Error::Index {
                what: "baseline function (1-based)",
                index: other,
                bound: BASELINE_COUNT + 1,
            })
        }
    };
    Ok(v)
}

/// Sum of the baselines, one per coordinate: `f(x) = Σ_j f_{j+1}(x_j)`.
pub fn additive_truth(row: &[f64]) -> f64 {
    row.iter()
        .enumerate()
        .map(|(j, &x)| eval_baseline(j % BASELINE_COUNT + 1, x).unwrap_or(0.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(eval_baseline(2, 0.5).unwrap(), 1.0);
        assert!(eval_baseline(5, 0.25).unwrap().abs() < 1e-16);
        assert!((eval_baseline(9, 0.7).unwrap() - 0.5116).abs() < 1e-12);
        assert_eq!(eval_baseline(9, 0.5).unwrap(), -0.1744);
        assert!(eval_baseline(0, 0.5).is_err());
        assert!(eval_baseline(10, 0.5).is_err());
    }

    #[test]
    fn bounded_and_nearly_centered() {
        // Simpson on a fine grid: the spikes of f7 are ~0.004 wide
        let m = 200_000;
        let h = 1.0 / m as f64;
        for i in 1..=BASELINE_COUNT {
            let mut integral = 0.0;
            let mut sup: f64 = 0.0;
            for k in 0..=m {
                let x = k as f64 * h;
                let v = eval_baseline(i, x).unwrap();
                let w = if k == 0 || k == m {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                integral += w * v;
                sup = sup.max(v.abs());
            }
            integral *= h / 3.0;
            assert!(integral.abs() < 0.01, "f{i} integral {integral}");
            assert!(sup < 5.0, "f{i} sup {sup}");
        }
    }
}
