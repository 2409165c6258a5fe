//! Thin real-FFT helpers over rustfft for one-shot transforms.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward DFT of a real signal, returning bins `0..=n/2`. `n` must be even.
pub(crate) fn rfft(signal: &[f64]) -> Vec<Complex64> {
    let n = signal.len();
    debug_assert!(n % 2 == 0, "rfft length must be even");
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = signal.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft.process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf
}

/// Inverse of [`rfft`]: reconstruct the real length-`n` signal from bins
/// `0..=n/2` using conjugate symmetry. Includes the `1/n` normalization.
pub(crate) fn irfft(half_spectrum: &[Complex64], n: usize) -> Vec<f64> {
    debug_assert_eq!(half_spectrum.len(), n / 2 + 1);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    let mut buf = vec![Complex64::ZERO; n];
    buf[..half_spectrum.len()].copy_from_slice(half_spectrum);
    for k in 1..n / 2 {
        buf[n - k] = half_spectrum[k].conj();
    }
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x: Vec<f64> = (0..64).map(|i| (i as f64 * 0.7).sin() + 0.2).collect();
        let spec = rfft(&x);
        assert_eq!(spec.len(), 33);
        let back = irfft(&spec, 64);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dc_bin_is_sum() {
        let x = vec![1.0; 16];
        let spec = rfft(&x);
        assert!((spec[0].re - 16.0).abs() < 1e-12);
        for k in 1..spec.len() {
            assert!(spec[k].norm() < 1e-12);
        }
    }
}
