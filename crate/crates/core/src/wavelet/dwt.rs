//! Periodic pyramid discrete wavelet transform.

use super::filters::WaveletFilter;

/// One analysis step on a periodic signal of even length.
/// Returns `(approximation, detail)`, each of half length.
pub fn analysis_step(signal: &[f64], filter: &WaveletFilter) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let h = filter.coefficients();
    let g = filter.highpass();
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (m, (&hm, &gm)) in h.iter().zip(&g).enumerate() {
            let y = signal[(2 * k + m) % n];
            a += hm * y;
            d += gm * y;
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

/// Full pyramid down to `levels` steps. The signal length must be divisible
/// by `2^levels`. Detail bands are returned finest first.
pub fn dwt_periodic(signal: &[f64], filter: &WaveletFilter, levels: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert!(
        signal.len().is_multiple_of(1 << levels),
        "signal length must be divisible by 2^levels"
    );
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, filter);
        approx = a;
        details.push(d);
    }
    (approx, details)
}

/// Finest-scale detail coefficients of the longest power-of-two prefix of
/// `signal`. Empty when fewer than two samples are available.
pub fn finest_details(signal: &[f64], filter: &WaveletFilter) -> Vec<f64> {
    if signal.len() < 2 {
        return Vec::new();
    }
    let len = 1usize << (usize::BITS - 1 - signal.len().leading_zeros());
    analysis_step(&signal[..len], filter).1
}
