//! Fourier tools for smooth 2π-periodic samples on an equispaced grid.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

fn forward(values: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

fn inverse_real(mut modes: Vec<Complex<f64>>) -> Vec<f64> {
    let n = modes.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut modes);
    modes.iter().map(|c| c.re / n as f64).collect()
}

/// Signed wavenumber of FFT bin `k`.
fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// First derivative by trigonometric interpolation. The Nyquist mode of an
/// even-length grid is dropped.
pub fn derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut modes = forward(values);
    for (k, c) in modes.iter_mut().enumerate() {
        if n.is_multiple_of(2) && k == n / 2 {
            *c = Complex::new(0.0, 0.0);
        } else {
            *c *= Complex::new(0.0, wavenumber(k, n));
        }
    }
    inverse_real(modes)
}

/// Largest Fourier magnitude in the two highest resolved bands relative to
/// the largest magnitude overall. Small values mean the grid resolves the
/// field.
pub fn tail_ratio(values: &[f64]) -> f64 {
    let n = values.len();
    let modes = forward(values);
    let peak = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let cutoff = (n / 2).saturating_sub(1) as f64;
    let tail = modes
        .iter()
        .enumerate()
        .filter(|(k, _)| wavenumber(*k, n).abs() >= cutoff)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    tail / peak
}

/// Periodic trapezoid rule for `∫_0^{2π} f(u) du`, summed in index order.
pub fn periodic_integral(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    values.iter().sum::<f64>() * (2.0 * std::f64::consts::PI / n)
}
