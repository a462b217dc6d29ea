//! Internal spectral helpers shared by the transform modules.
//!
//! All routines are thin layers over `rustfft`: centered transforms are
//! expressed through pre/post parity twiddles, convolutions are linear
//! (zero-padded) rather than circular, and fractional shifts keep real
//! data real by treating the Nyquist bin with a cosine factor.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct FftEngine {
    planner: FftPlanner<f64>,
}

impl FftEngine {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }

    pub fn forward(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        self.planner.plan_fft_forward(len)
    }

    pub fn inverse(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        self.planner.plan_fft_inverse(len)
    }
}

/// Linear (zero-padded) convolution of `a` and `b`, both of length `n`,
/// returning the central output window `out[i] = sum_j a[j] b[i + offset - j]`
/// for `i` in `0..n`. `offset` selects which slice of the full 2n-1 length
/// convolution maps to the lattice.
pub(crate) fn linear_convolve_window(
    engine: &mut FftEngine,
    a: &[Complex64],
    b: &[Complex64],
    offset: usize,
) -> Vec<Complex64> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    let m = 2 * n;
    let fwd = engine.forward(m);
    let inv = engine.inverse(m);

    let mut fa = vec![Complex64::ZERO; m];
    let mut fb = vec![Complex64::ZERO; m];
    fa[..n].copy_from_slice(a);
    fb[..n].copy_from_slice(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / m as f64;
    (0..n).map(|i| fa[i + offset] * scale).collect()
}

/// Shift real samples right by `delta` lattice steps using band-limited
/// (spectral) interpolation. The Nyquist bin is scaled by `cos(pi delta)`
/// so the output stays exactly real. The shift is circular; callers must
/// ensure the data decays before the wrap matters.
pub(crate) fn fractional_shift_real(engine: &mut FftEngine, data: &mut [f64], delta: f64) {
    let n = data.len();
    if delta == 0.0 {
        return;
    }
    let fwd = engine.forward(n);
    let inv = engine.inverse(n);
    let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    let step = -std::f64::consts::TAU * delta / n as f64;
    for (m, v) in buf.iter_mut().enumerate() {
        if m == n / 2 {
            *v *= (std::f64::consts::PI * delta).cos();
        } else {
            let freq = if m < n / 2 {
                m as f64
            } else {
                m as f64 - n as f64
            };
            *v *= Complex64::from_polar(1.0, step * freq);
        }
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    for (out, v) in data.iter_mut().zip(buf.iter()) {
        *out = v.re * scale;
    }
}

/// Band-limited 2x upsampling of real samples (trigonometric interpolation;
/// output `2n` samples with `out[2j] = in[j]` exactly).
pub(crate) fn upsample2_real(engine: &mut FftEngine, data: &[f64]) -> Vec<f64> {
    let n = data.len();
    let m = 2 * n;
    let fwd = engine.forward(n);
    let inv = engine.inverse(m);
    let mut spec: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut spec);
    let mut padded = vec![Complex64::ZERO; m];
    for k in 0..n / 2 {
        padded[k] = spec[k];
    }
    // split the Nyquist bin between its two aliases
    padded[n / 2] = spec[n / 2] * 0.5;
    padded[m - n / 2] = spec[n / 2] * 0.5;
    for k in n / 2 + 1..n {
        padded[k + n] = spec[k];
    }
    inv.process(&mut padded);
    let scale = 1.0 / n as f64;
    padded.iter().map(|v| v.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_fractional_shift_matches_roll() {
        let mut engine = FftEngine::new();
        let n = 32;
        let data: Vec<f64> = (0..n)
            .map(|i| (-((i as f64 - 10.0) / 3.0).powi(2)).exp())
            .collect();
        let mut shifted = data.clone();
        fractional_shift_real(&mut engine, &mut shifted, 3.0);
        for i in 0..n {
            let src = (i + n - 3) % n;
            assert!((shifted[i] - data[src]).abs() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn half_sample_shift_of_band_limited_wave() {
        let mut engine = FftEngine::new();
        let n = 64;
        let wave = |x: f64| (std::f64::consts::TAU * 3.0 * x / n as f64).cos();
        let data: Vec<f64> = (0..n).map(|i| wave(i as f64)).collect();
        let mut shifted = data.clone();
        fractional_shift_real(&mut engine, &mut shifted, 0.5);
        for i in 0..n {
            assert!((shifted[i] - wave(i as f64 - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn upsample_keeps_even_samples() {
        let mut engine = FftEngine::new();
        let data: Vec<f64> = (0..16)
            .map(|i| (-((i as f64 - 8.0) / 2.5).powi(2)).exp())
            .collect();
        let fine = upsample2_real(&mut engine, &data);
        assert_eq!(fine.len(), 32);
        for (j, &x) in data.iter().enumerate() {
            assert!((fine[2 * j] - x).abs() < 1e-13);
        }
    }

    #[test]
    fn convolution_against_direct_sum() {
        let mut engine = FftEngine::new();
        let n = 8;
        let a: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(i as f64 * 0.3 - 1.0, 0.1 * i as f64))
            .collect();
        let b: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), -0.2))
            .collect();
        let offset = n / 2;
        let got = linear_convolve_window(&mut engine, &a, &b, offset);
        for i in 0..n {
            let mut want = Complex64::ZERO;
            for j in 0..n {
                let bi = i as isize + offset as isize - j as isize;
                if bi >= 0 && (bi as usize) < n {
                    want += a[j] * b[bi as usize];
                }
            }
            assert!((got[i] - want).norm() < 1e-12, "i={i}");
        }
    }
}
