//! Multi-dimensional complex FFTs over flat row-major buffers.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// In-place transform of a `len^dim` array along every axis, unnormalized.
pub(crate) fn transform(data: &mut [Complex64], len: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), len.pow(dim as u32));
    let fft = plan(len, direction);
    let total = data.len();
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut lines = vec![Complex64::new(0.0, 0.0); total];
    for axis in 0..dim {
        let stride = len.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let outer = total / (len * stride);
        // gather lines contiguously, transform them in one batch, scatter back
        let mut pos = 0;
        for o in 0..outer {
            let base = o * len * stride;
            for inner in 0..stride {
                for t in 0..len {
                    lines[pos] = data[base + inner + t * stride];
                    pos += 1;
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        let mut pos = 0;
        for o in 0..outer {
            let base = o * len * stride;
            for inner in 0..stride {
                for t in 0..len {
                    data[base + inner + t * stride] = lines[pos];
                    pos += 1;
                }
            }
        }
    }
}

/// Physical samples to normalized coefficients: `f̂_k = N^{-d} Σ_x f(x) e^{-iξ·x}`.
pub(crate) fn forward(data: &mut [Complex64], len: usize, dim: usize) {
    transform(data, len, dim, FftDirection::Forward);
    let norm = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= norm;
    }
}

/// Normalized coefficients to physical samples: `f(x) = Σ_k f̂_k e^{iξ·x}`.
pub(crate) fn inverse(data: &mut [Complex64], len: usize, dim: usize) {
    transform(data, len, dim, FftDirection::Inverse);
}

/// Signed frequency of FFT bin `i` out of `len`.
#[inline]
pub(crate) fn signed(i: usize, len: usize) -> i64 {
    if i < len / 2 {
        i as i64
    } else {
        i as i64 - len as i64
    }
}

#[inline]
fn bin(k: i64, len: usize) -> usize {
    if k < 0 {
        (k + len as i64) as usize
    } else {
        k as usize
    }
}

/// Embed `len^dim` coefficients into a zero-padded `padded^dim` spectrum.
pub(crate) fn pad(coeffs: &[Complex64], len: usize, padded: usize, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); padded.pow(dim as u32)];
    for (idx, &c) in coeffs.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut rest = idx;
        let mut target = 0usize;
        let mut stride = 1usize;
        for _ in 0..dim {
            let i = rest % len;
            rest /= len;
            target += bin(signed(i, len), padded) * stride;
            stride *= padded;
        }
        out[target] = c;
    }
    out
}

/// Inverse of [`pad`]: keep the `len^dim` low modes of a padded spectrum.
pub(crate) fn truncate(padded_coeffs: &[Complex64], padded: usize, len: usize, dim: usize) -> Vec<Complex64> {
    let total = len.pow(dim as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut rest = idx;
        let mut source = 0usize;
        let mut stride = 1usize;
        for _ in 0..dim {
            let i = rest % len;
            rest /= len;
            source += bin(signed(i, len), padded) * stride;
            stride *= padded;
        }
        *slot = padded_coeffs[source];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_round_trip() {
        let len: usize = 8;
        let dim = 3;
        let orig: Vec<Complex64> = (0..len.pow(3))
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&mut data, len, dim);
        inverse(&mut data, len, dim);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_lands_in_its_bin() {
        let len: usize = 8;
        // f(x) = e^{i (2 x_0 - 3 x_1)} sampled at x_a = 2π i_a / len
        let mut data: Vec<Complex64> = (0..len * len)
            .map(|idx| {
                let (i0, i1) = (idx / len, idx % len);
                let phase = 2.0 * std::f64::consts::PI * (2.0 * i0 as f64 - 3.0 * i1 as f64) / len as f64;
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        forward(&mut data, len, 2);
        let target = 2 * len + (len - 3);
        for (idx, c) in data.iter().enumerate() {
            let expect = if idx == target { 1.0 } else { 0.0 };
            assert!((c.norm() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn pad_truncate_inverse() {
        let len: usize = 8;
        let coeffs: Vec<Complex64> = (0..len * len).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let padded = pad(&coeffs, len, 12, 2);
        let back = truncate(&padded, 12, len, 2);
        assert_eq!(coeffs, back);
    }
}
