//! Registry of orthonormal scaling filters.
//!
//! Coefficients are the published tables (Daubechies 1992, normalised so
//! that they sum to √2). Every entry is checked against the filter
//! invariants when it is loaded.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;
const ORTHO_TOL: f64 = 1e-10;

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB4TAP: [f64; 4] = [
    0.482_962_913_144_534_16,
    0.836_516_303_737_807_9,
    0.224_143_868_042_013_4,
    -0.129_409_522_551_260_37,
];

const COIF24TAP: [f64; 24] = [
    0.000_892_313_902_537_003,
    -0.001_629_492_425_226_786,
    -0.007_346_167_936_268_051,
    0.016_068_947_131_575_03,
    0.026_682_304_669_604_83,
    -0.081_266_710_249_193_73,
    -0.056_077_319_603_569_26,
    0.415_308_427_000_682_27,
    0.782_238_934_424_282_6,
    0.434_386_033_114_356_53,
    -0.066_627_472_366_817_17,
    -0.096_220_424_535_952_64,
    0.039_334_422_605_589_15,
    0.025_082_253_337_949_61,
    -0.015_211_728_187_697_211,
    -0.005_658_283_800_130_883_5,
    0.003_751_434_697_146_086_6,
    0.001_266_561_078_925_660_3,
    -0.000_589_020_224_633_216_5,
    -0.000_259_974_337_122_256_8,
    6.233_885_431_278_719e-5,
    3.122_986_159_919_526_5e-5,
    -3.259_647_940_030_751e-6,
    -1.784_990_914_493_346_9e-6,
];

/// Names accepted by [`make_filter`].
pub const FILTER_NAMES: [&str; 3] = ["haar", "db4tap", "coif24tap"];

/// Orthonormal low-pass filter `h` of a compactly supported scaling
/// function, `φ(x) = √2 Σ_k h_k φ(2x − k)`, supported on `[0, L−1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: String,
    coefficients: Vec<f64>,
    vanishing_moments: usize,
}

impl WaveletFilter {
    /// Builds a filter from raw coefficients, rejecting anything that is not
    /// an orthonormal scaling filter.
    pub fn new(name: &str, coefficients: Vec<f64>, vanishing_moments: usize) -> Result<Self> {
        let filter = WaveletFilter {
            name: name.to_string(),
            coefficients,
            vanishing_moments,
        };
        filter.check()?;
        Ok(filter)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of taps `L`.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn vanishing_moments(&self) -> usize {
        self.vanishing_moments
    }

    /// Right end of the support of φ, `L − 1`.
    pub fn support_len(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// High-pass (wavelet) filter `g_k = (−1)^k h_{L−1−k}`.
    pub fn highpass(&self) -> Vec<f64> {
        let l = self.len();
        (0..l)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * self.coefficients[l - 1 - k]
            })
            .collect()
    }

    /// `Σ_k h_k h_{k+2m}` for the given shift.
    pub fn autocorrelation(&self, m: isize) -> f64 {
        let h = &self.coefficients;
        let l = h.len() as isize;
        (0..l)
            .filter_map(|k| {
                let j = k + 2 * m;
                (0..l).contains(&j).then(|| h[k as usize] * h[j as usize])
            })
            .sum()
    }

    fn check(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidFilter {
            name: self.name.clone(),
            reason,
        };
        let l = self.len();
        if l < 2 || !l.is_multiple_of(2) {
            return Err(bad(format!("length {l} must be even and at least 2")));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(bad("non-finite coefficient".into()));
        }
        let sum: f64 = self.coefficients.iter().sum();
        if (sum - SQRT_2).abs() > SUM_TOL {
            return Err(bad(format!("coefficient sum {sum} differs from sqrt(2)")));
        }
        for m in 0..(l / 2) as isize {
            let target = if m == 0 { 1.0 } else { 0.0 };
            let r = self.autocorrelation(m);
            if (r - target).abs() > ORTHO_TOL {
                return Err(bad(format!("orthonormality residual {r} at shift {m}")));
            }
        }
        Ok(())
    }
}

/// Looks up a filter by name.
pub fn make_filter(name: &str) -> Result<WaveletFilter> {
    let (coefficients, moments): (&[f64], usize) = match name {
        "haar" => (&HAAR, 1),
        "db4tap" => (&DB4TAP, 2),
        "coif24tap" => (&COIF24TAP, 8),
        other => return Err(Error::UnknownFilter(other.to_string())),
    };
    WaveletFilter::new(name, coefficients.to_vec(), moments)
}
