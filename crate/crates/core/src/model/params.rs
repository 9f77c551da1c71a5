//! Data-driven parameter rules: resolution level, noise scale and the
//! truncation threshold.

use crate::error::{Error, Result};
use crate::wavelet::{dwt, WaveletFilter};

/// Gaussian consistency constant of the median absolute deviation.
pub const MAD_GAUSS: f64 = 0.6745;

/// Replacement for a zero noise estimate.
pub const SIGMA_FLOOR: f64 = 1e-12;

/// `J(n) = 1 + ⌊log₂ n − log₂(ln n · (ln n + 1))⌋`, clamped at zero.
pub fn select_level(n: usize) -> Result<u32> {
    if n < 8 {
        return Err(Error::Domain(format!("level selection needs n >= 8, got {n}")));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let j = 1.0 + (nf.log2() - (ln * (ln + 1.0)).log2()).floor();
    Ok(j.max(0.0) as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMethod {
    /// Sample standard deviation of the response.
    SampleSd,
    /// Median absolute finest-level detail coefficient over 0.6745.
    #[default]
    MadDetail,
}

impl std::str::FromStr for SigmaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sample_sd" | "sample-sd" => Ok(SigmaMethod::SampleSd),
            "mad_detail" | "mad-detail" | "mad" => Ok(SigmaMethod::MadDetail),
            other => Err(Error::Config(format!("unknown sigma method '{other}'"))),
        }
    }
}

impl std::fmt::Display for SigmaMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SigmaMethod::SampleSd => "sample_sd",
            SigmaMethod::MadDetail => "mad_detail",
        })
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (`n − 1` denominator).
pub(crate) fn sample_sd(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Noise scale of `y`. For [`SigmaMethod::MadDetail`] the DWT runs over the
/// longest power-of-two prefix of `y`, in the given order.
pub fn estimate_sigma(y: &[f64], method: SigmaMethod, filter: &WaveletFilter) -> Result<f64> {
    if y.len() < 4 {
        return Err(Error::Domain(format!(
            "noise estimation needs at least 4 samples, got {}",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite response value".into()));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Ok(0.0);
    }
    Ok(match method {
        SigmaMethod::SampleSd => sample_sd(y),
        SigmaMethod::MadDetail => {
            let mut abs: Vec<f64> = dwt::finest_details(y, filter).into_iter().map(f64::abs).collect();
            median(&mut abs) / MAD_GAUSS
        }
    })
}

/// Truncation threshold together with whether the noise floor was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSelection {
    pub beta: f64,
    pub sigma_floored: bool,
}

/// `β_n = 4 σ √(ln n)`; a zero σ is replaced by [`SIGMA_FLOOR`].
pub fn select_beta(sigma: f64, n: usize) -> Result<BetaSelection> {
    if n < 2 {
        return Err(Error::Domain(format!("truncation threshold needs n >= 2, got {n}")));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!(
            "noise scale must be finite and non-negative, got {sigma}"
        )));
    }
    let sigma_floored = sigma == 0.0;
    let s = if sigma_floored { SIGMA_FLOOR } else { sigma };
    Ok(BetaSelection {
        beta: 4.0 * s * (n as f64).ln().sqrt(),
        sigma_floored,
    })
}

/// `T_β(v)`: identity on `[−β, β]`, clamped outside.
pub fn truncate(value: f64, beta: f64) -> f64 {
    value.clamp(-beta, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::make_filter;
    use proptest::prelude::*;

    #[test]
    fn level_formula() {
        // log2(n) - log2(ln n (ln n + 1)) evaluated by hand
        assert_eq!(select_level(256).unwrap(), 3);
        assert_eq!(select_level(512).unwrap(), 4);
        assert_eq!(select_level(1024).unwrap(), 5);
        assert_eq!(select_level(2048).unwrap(), 5);
        assert_eq!(select_level(4096).unwrap(), 6);
        assert!(select_level(7).is_err());
        assert_eq!(select_level(8).unwrap(), 1);
    }

    #[test]
    fn beta_formula() {
        // n = e^4 is not an integer; at n = 55, ln n = 4.007
        let b = select_beta(0.5, 55).unwrap();
        assert!((b.beta - 2.0 * 55f64.ln().sqrt()).abs() < 1e-15);
        assert!((b.beta - 4.0).abs() < 1e-2);
        let b = select_beta(1.0, 2).unwrap();
        assert!((b.beta - 4.0 * 2f64.ln().sqrt()).abs() < 1e-12);
        assert!((b.beta - 3.330_218_444).abs() < 1e-8);
        assert!(!b.sigma_floored);
        let z = select_beta(0.0, 100).unwrap();
        assert!(z.sigma_floored);
        assert!((z.beta - 4e-12 * 100f64.ln().sqrt()).abs() < 1e-24);
        assert!(select_beta(1.0, 1).is_err());
        assert!(select_beta(-1.0, 10).is_err());
    }

    #[test]
    fn sigma_on_constants() {
        let f = make_filter("db4tap").unwrap();
        let y = vec![2.5; 64];
        assert_eq!(estimate_sigma(&y, SigmaMethod::SampleSd, &f).unwrap(), 0.0);
        assert!(estimate_sigma(&y, SigmaMethod::MadDetail, &f).unwrap() < 1e-12);
        assert!(estimate_sigma(&y[..3], SigmaMethod::SampleSd, &f).is_err());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("mad_detail".parse::<SigmaMethod>().unwrap(), SigmaMethod::MadDetail);
        assert_eq!("sample_sd".parse::<SigmaMethod>().unwrap(), SigmaMethod::SampleSd);
        assert!("iqr".parse::<SigmaMethod>().is_err());
    }

    proptest! {
        #[test]
        fn truncation_is_bounded_monotone_identity(a in -1e3f64..1e3, b in -1e3f64..1e3, beta in 1e-6f64..100.0) {
            let ta = truncate(a, beta);
            prop_assert!(ta.abs() <= beta);
            if a.abs() <= beta { prop_assert_eq!(ta, a); }
            if a <= b { prop_assert!(ta <= truncate(b, beta)); }
        }
    }
}
