//! Adaptive Gauss–Kronrod quadrature and Wynn-accelerated oscillatory tails.

use crate::error::{Error, Result};

// 15-point Kronrod nodes on [-1, 1] (nonnegative half) with the embedded
// 7-point Gauss weights at the odd positions.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and `|K15 − G7|` on `[a, b]`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive bisection until the summed error estimate meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_intervals: usize) -> Result<(f64, f64)> {
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return Ok((total, err));
        }
        if parts.len() >= max_intervals {
            return Err(Error::QuadratureDivergence { estimate: err, target });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Wynn epsilon extrapolation of a sequence of partial sums; returns the
/// last diagonal estimate and the change from the previous one.
pub fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    if n < 3 {
        let last = sums.last().copied().unwrap_or(0.0);
        let prev = if n >= 2 { sums[n - 2] } else { 0.0 };
        return (last, (last - prev).abs());
    }
    // columns ε_k of the epsilon table; even k are estimates
    let mut prev_col = vec![0.0; n + 1];
    let mut col: Vec<f64> = sums.to_vec();
    let mut best = (sums[n - 1], (sums[n - 1] - sums[n - 2]).abs());
    let mut k = 1;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let diff = col[i + 1] - col[i];
            let base = if k == 1 { 0.0 } else { prev_col[i + 1] };
            if diff == 0.0 {
                // sequence already converged at this depth
                return if k % 2 == 1 { (col[i + 1], 0.0) } else { best };
            }
            next.push(base + 1.0 / diff);
        }
        prev_col = col;
        col = next;
        k += 1;
        if k % 2 == 1 && col.len() >= 2 {
            let m = col.len();
            best = (col[m - 1], (col[m - 1] - col[m - 2]).abs());
        }
    }
    best
}

/// `∫_0^∞ f` for integrands oscillating with half-period `half_period`,
/// summing per-half-period integrals and extrapolating with Wynn epsilon.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(f: F, half_period: f64, tol: f64, max_terms: usize) -> Result<(f64, f64)> {
    let mut sums = Vec::with_capacity(max_terms);
    let mut acc = 0.0;
    let mut last_est = f64::NAN;
    for i in 0..max_terms {
        let a = i as f64 * half_period;
        let (v, _) = integrate(&f, a, a + half_period, tol * 1e-3, 1e-14, 200)?;
        acc += v;
        sums.push(acc);
        if i >= 8 {
            let start = sums.len().saturating_sub(24);
            let (est, change) = wynn_epsilon(&sums[start..]);
            let delta = if last_est.is_nan() { change } else { (est - last_est).abs().max(change) };
            if delta <= tol {
                return Ok((est, delta));
            }
            last_est = est;
        }
    }
    Err(Error::QuadratureDivergence { estimate: (acc - last_est).abs(), target: tol })
}
