//! Random designs on `[0, 1]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignDistribution {
    Uniform,
    /// `Beta(3/2, 3/2)`.
    Beta3Half,
}

impl std::str::FromStr for DesignDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(DesignDistribution::Uniform),
            "beta_3half" | "beta" | "beta-3half" => Ok(DesignDistribution::Beta3Half),
            other => Err(Error::Config(format!("unknown design '{other}' (uniform, beta_3half)"))),
        }
    }
}

impl std::fmt::Display for DesignDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DesignDistribution::Uniform => "uniform",
            DesignDistribution::Beta3Half => "beta_3half",
        })
    }
}

const BISECTION_TOL: f64 = 1e-10;

/// `I_x(3/2, 3/2)`, the regularized incomplete beta function, in closed form:
/// with `x = sin²θ`, `I = (2θ − sin(4θ)/2) / π`.
pub fn beta_3half_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let theta = x.sqrt().asin();
    (2.0 * theta - 0.5 * (4.0 * theta).sin()) / std::f64::consts::PI
}

/// Inverse of [`beta_3half_cdf`] by bisection to `1e-10`.
pub fn beta_3half_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if beta_3half_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl DesignDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match self {
            DesignDistribution::Uniform => u,
            DesignDistribution::Beta3Half => beta_3half_quantile(u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_matches_integrated_density() {
        // density x^{1/2}(1−x)^{1/2} / B(3/2,3/2), B = π/8; midpoint rule
        let m = 200_000;
        let mut acc = 0.0;
        for k in 0..m {
            let x = (k as f64 + 0.5) / m as f64;
            acc += (x * (1.0 - x)).sqrt() * 8.0 / std::f64::consts::PI / m as f64;
            if (k + 1) % 40_000 == 0 {
                let xe = (k + 1) as f64 / m as f64;
                assert!((acc - beta_3half_cdf(xe)).abs() < 1e-7, "x = {xe}");
            }
        }
        assert!((beta_3half_cdf(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for u in [1e-6, 0.1, 0.3, 0.5, 0.77, 0.999] {
            let x = beta_3half_quantile(u);
            assert!((beta_3half_cdf(x) - u).abs() < 1e-9);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            "uniform".parse::<DesignDistribution>().unwrap(),
            DesignDistribution::Uniform
        );
        assert_eq!(
            "beta_3half".parse::<DesignDistribution>().unwrap(),
            DesignDistribution::Beta3Half
        );
        assert!("normal".parse::<DesignDistribution>().is_err());
    }
}
