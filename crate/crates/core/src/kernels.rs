//! The five vertical kernels, the signed operators `ℒ^{(j,±)}`, and the
//! one-dimensional inverse Fourier transform oracle.
//!
//! For a tangential mode of magnitude `κ` all kernels have the form
//! `(c0 + c1 κ|z|) e^{−κ|z|} (sgn z)^σ`, so against a piecewise-constant
//! profile every operator is a fixed combination of six exponential
//! moments, each computed exactly by a forward/backward sweep over slabs:
//!
//! ```text
//! A0 = ∫_0^x e^{−κ(x−y)} g      A1 = ∫_0^x κ(x−y) e^{−κ(x−y)} g
//! B0 = ∫_x^∞ e^{−κ(y−x)} g      B1 = ∫_x^∞ κ(y−x) e^{−κ(y−x)} g
//! R0 = ∫_0^∞ e^{−κ(x+y)} g      R1 = ∫_0^∞ κ(x+y) e^{−κ(x+y)} g
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::grid::Grid;
use crate::quadrature;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    K1,
    K2,
    K3,
    K4,
    K5,
}

impl KernelId {
    pub const ALL: [KernelId; 5] = [KernelId::K1, KernelId::K2, KernelId::K3, KernelId::K4, KernelId::K5];

    /// From the one-based kernel number.
    pub fn from_index(j: usize) -> Result<Self> {
        match j {
            1 => Ok(Self::K1),
            2 => Ok(Self::K2),
            3 => Ok(Self::K3),
            4 => Ok(Self::K4),
            5 => Ok(Self::K5),
            _ => Err(Error::InvalidArgument(format!("kernel index {j} not in 1..=5"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::K1 => 1,
            Self::K2 => 2,
            Self::K3 => 3,
            Self::K4 => 4,
            Self::K5 => 5,
        }
    }

    /// `(c0, c1, odd)` in `(c0 + c1 κ|z|) e^{−κ|z|} (sgn z)^odd`.
    fn shape(self) -> (f64, f64, bool) {
        match self {
            Self::K1 => (1.0, 0.0, false),
            Self::K2 => (1.0, 0.0, true),
            Self::K3 => (1.0, 1.0, false),
            Self::K4 => (0.0, 1.0, true),
            Self::K5 => (1.0, -1.0, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

/// Kernel with the sign of its reflected part, i.e. `ℒ^{(j,±)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedKernel {
    pub id: KernelId,
    pub sign: Sign,
}

impl SignedKernel {
    pub const fn new(id: KernelId, sign: Sign) -> Self {
        Self { id, sign }
    }
}

/// `K^{(j)}(κ, z)` with `sgn(0) = 0`.
pub fn kernel_value(id: KernelId, kappa: f64, z: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kernel frequency κ = {kappa} must be positive")));
    }
    let (c0, c1, odd) = id.shape();
    let t = kappa * z.abs();
    let v = (c0 + c1 * t) * (-t).exp();
    Ok(if odd {
        if z > 0.0 {
            v
        } else if z < 0.0 {
            -v
        } else {
            0.0
        }
    } else {
        v
    })
}

/// Moments `[A0, A1, B0, B1, R0, R1, g(x)]` at one height.
pub type Moments = [Complex64; 7];

/// Weights turning [`Moments`] into `ℒ^{(j,±)}`.
pub fn value_weights(k: SignedKernel) -> [f64; 7] {
    let (c0, c1, odd) = k.id.shape();
    let s = if odd { -1.0 } else { 1.0 };
    let pm = k.sign.factor();
    [c0, c1, s * c0, s * c1, pm * c0, pm * c1, 0.0]
}

/// Weights turning [`Moments`] into `∂_x ℒ^{(j,±)}`, using
/// `A0′ = g − κA0`, `A1′ = κ(A0 − A1)`, `B0′ = κB0 − g`, `B1′ = κ(B1 − B0)`,
/// `R0′ = −κR0`, `R1′ = κ(R0 − R1)`.
pub fn derivative_weights(k: SignedKernel, kappa: f64) -> [f64; 7] {
    let [a0, a1, b0, b1, r0, r1, _] = value_weights(k);
    [
        kappa * (a1 - a0),
        -kappa * a1,
        kappa * (b0 - b1),
        kappa * b1,
        kappa * (r1 - r0),
        -kappa * r1,
        a0 - b0,
    ]
}

pub fn combine(w: &[f64; 7], m: &Moments) -> Complex64 {
    w.iter().zip(m).fold(ZERO, |acc, (w, m)| if *w == 0.0 { acc } else { acc + m * *w })
}

/// `1 − e^{−t}`.
#[inline]
fn phi1(t: f64) -> f64 {
    -(-t).exp_m1()
}

/// `1 − e^{−t}(1 + t)`, accurate for small `t`.
#[inline]
fn phi2(t: f64) -> f64 {
    if t < 0.1 {
        // Σ_{k≥2} (−1)^k (k−1) t^k / k!
        let mut term = t * t / 2.0;
        let mut sum = 0.0;
        for k in 2..14 {
            sum += (k - 1) as f64 * term;
            term *= -t / (k + 1) as f64;
        }
        sum
    } else {
        phi1(t) - t * (-t).exp()
    }
}

/// Exact slab sweep for one mode of one scalar component.
#[derive(Debug, Clone)]
pub struct ModeSweep {
    kappa: f64,
    h: f64,
    g: Vec<Complex64>,
    tail: Complex64,
    p0: Vec<Complex64>,
    p1: Vec<Complex64>,
    q0: Vec<Complex64>,
    q1: Vec<Complex64>,
}

impl ModeSweep {
    pub fn new(kappa: f64, h: f64, g: Vec<Complex64>, tail: Complex64) -> Self {
        let m = g.len();
        let t = kappa * h;
        let e = (-t).exp();
        let w0 = phi1(t) / kappa;
        let w1 = phi2(t) / kappa;
        let mut p0 = vec![ZERO; m + 1];
        let mut p1 = vec![ZERO; m + 1];
        for i in 0..m {
            p0[i + 1] = p0[i] * e + g[i] * w0;
            p1[i + 1] = (p0[i] * t + p1[i]) * e + g[i] * w1;
        }
        let mut q0 = vec![ZERO; m + 1];
        let mut q1 = vec![ZERO; m + 1];
        q0[m] = tail / kappa;
        q1[m] = tail / kappa;
        for i in (0..m).rev() {
            q0[i] = q0[i + 1] * e + g[i] * w0;
            q1[i] = (q0[i + 1] * t + q1[i + 1]) * e + g[i] * w1;
        }
        Self { kappa, h, g, tail, p0, p1, q0, q1 }
    }

    /// `∫_0^∞ e^{−κy} g` and `∫_0^∞ κy e^{−κy} g`.
    pub fn moments_at_zero(&self) -> (Complex64, Complex64) {
        (self.q0[0], self.q1[0])
    }

    /// Moments at height `x ∈ [0, ∞]`.
    pub fn moments(&self, x: f64) -> Moments {
        let k = self.kappa;
        let (m0, m1) = self.moments_at_zero();
        if x.is_infinite() {
            let v = self.tail / k;
            return [v, v, v, v, ZERO, ZERO, self.tail];
        }
        let ex = (-k * x).exp();
        let r0 = m0 * ex;
        let r1 = (m0 * (k * x) + m1) * ex;
        let m = self.g.len();
        let top = m as f64 * self.h;
        if x >= top {
            let delta = x - top;
            let t = k * delta;
            let e = (-t).exp();
            let a0 = self.p0[m] * e + self.tail * (phi1(t) / k);
            let a1 = (self.p0[m] * t + self.p1[m]) * e + self.tail * (phi2(t) / k);
            let b = self.tail / k;
            return [a0, a1, b, b, r0, r1, self.tail];
        }
        let i = ((x / self.h).floor() as usize).min(m - 1);
        let lo = i as f64 * self.h;
        let t = k * (x - lo);
        let e = (-t).exp();
        let gi = self.g[i];
        let a0 = self.p0[i] * e + gi * (phi1(t) / k);
        let a1 = (self.p0[i] * t + self.p1[i]) * e + gi * (phi2(t) / k);
        let u = k * ((lo + self.h) - x).max(0.0);
        let eu = (-u).exp();
        let b0 = self.q0[i + 1] * eu + gi * (phi1(u) / k);
        let b1 = (self.q0[i + 1] * u + self.q1[i + 1]) * eu + gi * (phi2(u) / k);
        [a0, a1, b0, b1, r0, r1, gi]
    }
}

/// Vertical profile of component `c` at mode `idx`, and its tail value.
pub fn mode_profile(g: &HalfSpaceField, c: usize, idx: usize) -> (Vec<Complex64>, Complex64) {
    let slabs = g.slabs().iter().map(|s| s.coeff(c, idx)).collect();
    let tail = g.tail().map_or(ZERO, |t| t.coeff(c, idx));
    (slabs, tail)
}

pub fn sweep(g: &HalfSpaceField, c: usize, idx: usize) -> ModeSweep {
    let (slabs, tail) = mode_profile(g, c, idx);
    ModeSweep::new(g.grid().kappa(idx), g.grid().slab_width(), slabs, tail)
}

const MODE_CHUNK: usize = 512;

/// Evaluate a per-mode rule in parallel. `rule(idx, out)` fills
/// `out[o * heights + h]` for every active mode; the result holds one
/// coefficient vector per `(o, h)` pair.
pub fn evaluate_modes<F>(grid: &Grid, outputs: usize, heights: usize, rule: F) -> Vec<Vec<Complex64>>
where
    F: Fn(usize, &mut [Complex64]) + Sync,
{
    let modes = grid.modes();
    let width = outputs * heights;
    let chunks: Vec<(usize, Vec<Complex64>)> = (0..modes.div_ceil(MODE_CHUNK))
        .into_par_iter()
        .map(|ch| {
            let start = ch * MODE_CHUNK;
            let end = (start + MODE_CHUNK).min(modes);
            let mut buf = vec![ZERO; (end - start) * width];
            for idx in start..end {
                if grid.is_active(idx) {
                    rule(idx, &mut buf[(idx - start) * width..(idx - start + 1) * width]);
                }
            }
            (start, buf)
        })
        .collect();
    let mut out = vec![vec![ZERO; modes]; width];
    for (start, buf) in chunks {
        for (local, row) in buf.chunks(width).enumerate() {
            for (slot, v) in row.iter().enumerate() {
                out[slot][start + local] = *v;
            }
        }
    }
    out
}

/// Collect `evaluate_modes` output into a half-space field. `raw` holds
/// `components × heights` vectors where the heights are the slab centers,
/// optionally followed by `∞` (becoming the tail).
pub fn assemble(grid: Grid, components: usize, with_tail: bool, raw: Vec<Vec<Complex64>>) -> Result<HalfSpaceField> {
    let heights = grid.slabs() + usize::from(with_tail);
    let mut per_height: Vec<Vec<Complex64>> = vec![Vec::with_capacity(components * grid.modes()); heights];
    for (slot, v) in raw.into_iter().enumerate() {
        per_height[slot % heights].extend(v);
    }
    let mut fields = per_height
        .into_iter()
        .map(|c| TangentialField::from_coefficients(grid, components, c))
        .collect::<Result<Vec<_>>>()?;
    let tail = if with_tail { fields.pop() } else { None };
    HalfSpaceField::from_slabs(grid, fields, tail)
}

/// Collect `components` coefficient vectors at one height.
pub fn assemble_level(grid: Grid, raw: Vec<Vec<Complex64>>) -> Result<TangentialField> {
    let components = raw.len();
    TangentialField::from_coefficients(grid, components, raw.into_iter().flatten().collect())
}

/// Evaluation heights for a field: slab centers, plus `∞` if it has a tail.
pub fn field_heights(grid: &Grid, with_tail: bool) -> Vec<f64> {
    let mut h = grid.slab_centers();
    if with_tail {
        h.push(f64::INFINITY);
    }
    h
}

fn apply_at(k: SignedKernel, g: &HalfSpaceField, heights: &[f64], derivative: bool) -> Vec<Vec<Complex64>> {
    let grid = *g.grid();
    let comps = g.components();
    let wv = value_weights(k);
    evaluate_modes(&grid, comps, heights.len(), |idx, out| {
        let kappa = grid.kappa(idx);
        let w = if derivative { derivative_weights(k, kappa) } else { wv };
        for c in 0..comps {
            let s = sweep(g, c, idx);
            for (hi, &x) in heights.iter().enumerate() {
                out[c * heights.len() + hi] = combine(&w, &s.moments(x));
            }
        }
    })
}

/// `ℒ^{(j,±)}[G](·, x)` component-wise; `x = ∞` gives the limit value.
pub fn l_operator(k: SignedKernel, g: &HalfSpaceField, x: f64) -> Result<TangentialField> {
    check_height(x)?;
    let raw = apply_at(k, g, &[x], false);
    finite(assemble_level(*g.grid(), raw)?)
}

/// `∂_{x_n} ℒ^{(j,±)}[G](·, x)`.
pub fn l_operator_derivative(k: SignedKernel, g: &HalfSpaceField, x: f64) -> Result<TangentialField> {
    check_height(x)?;
    let raw = apply_at(k, g, &[x], true);
    finite(assemble_level(*g.grid(), raw)?)
}

/// `ℒ^{(j,±)}[G]` sampled at slab centers, with the `x → ∞` limit as tail
/// when `G` has one.
pub fn l_operator_field(k: SignedKernel, g: &HalfSpaceField) -> Result<HalfSpaceField> {
    let with_tail = g.tail().is_some();
    let heights = field_heights(g.grid(), with_tail);
    let raw = apply_at(k, g, &heights, false);
    let out = assemble(*g.grid(), g.components(), with_tail, raw)?;
    if !out.max_abs_coeff().is_finite() {
        return Err(Error::Overflow("non-finite kernel accumulation".into()));
    }
    Ok(out)
}

fn check_height(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("height {x} must be nonnegative")))
    }
}

fn finite(f: TangentialField) -> Result<TangentialField> {
    if f.max_abs_coeff().is_finite() {
        Ok(f)
    } else {
        Err(Error::Overflow("non-finite kernel accumulation".into()))
    }
}

fn trace_with<F>(g: &HalfSpaceField, rule: F) -> Result<TangentialField>
where
    F: Fn(Complex64, Complex64) -> Complex64 + Sync,
{
    let grid = *g.grid();
    let comps = g.components();
    let raw = evaluate_modes(&grid, comps, 1, |idx, out| {
        for (c, slot) in out.iter_mut().enumerate() {
            let (m0, m1) = sweep(g, c, idx).moments_at_zero();
            *slot = rule(m0, m1);
        }
    });
    finite(assemble_level(grid, raw)?)
}

/// `ℒ^{(1,+)}[G](·, 0) = 2∫_0^∞ e^{−|∇′|y} G dy`.
pub fn trace_l1_plus(g: &HalfSpaceField) -> Result<TangentialField> {
    trace_with(g, |m0, _| m0 * 2.0)
}

/// `ℒ^{(3,+)}[G](·, 0) = 2∫_0^∞ (1 + |∇′|y) e^{−|∇′|y} G dy`.
pub fn trace_l3_plus(g: &HalfSpaceField) -> Result<TangentialField> {
    trace_with(g, |m0, m1| (m0 + m1) * 2.0)
}

/// `ℒ^{(4,−)}[G](·, 0) = −2∫_0^∞ |∇′|y e^{−|∇′|y} G dy`.
pub fn trace_l4_minus(g: &HalfSpaceField) -> Result<TangentialField> {
    trace_with(g, |_, m1| m1 * -2.0)
}

pub use crate::spectral::poisson_apply;

/// Quadrature and closed form of one of the five one-dimensional inverse
/// Fourier transform identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub quadrature: f64,
    pub closed_form: f64,
    /// Scale against which the error is measured; equals `|closed_form|`
    /// for the three identities without a sign-changing factor.
    pub envelope: f64,
    pub error_estimate: f64,
}

impl OracleValue {
    pub fn relative_error(&self) -> f64 {
        (self.quadrature - self.closed_form).abs() / self.envelope
    }
}

fn symbol(j: usize, kappa: f64, t: Complex64) -> Complex64 {
    let d = t * t + kappa * kappa;
    let i = Complex64::new(0.0, 1.0);
    match j {
        1 => 1.0 / d,
        2 => i * t / d,
        3 => 1.0 / (d * d),
        4 => i * t / (d * d),
        _ => t * t / (d * d),
    }
}

/// Right-hand sides of the five identities.
pub fn inverse_ft_closed_form(j: usize, kappa: f64, z: f64) -> f64 {
    let a = kappa * z.abs();
    let e = (-a).exp();
    let sgn = if z > 0.0 {
        1.0
    } else if z < 0.0 {
        -1.0
    } else {
        0.0
    };
    match j {
        1 => e / (2.0 * kappa),
        2 => -0.5 * sgn * e,
        3 => e * (1.0 + a) / (4.0 * kappa.powi(3)),
        4 => -z * e / (4.0 * kappa),
        _ => e * (1.0 - a) / (4.0 * kappa),
    }
}

fn envelope(j: usize, kappa: f64, z: f64) -> f64 {
    let a = kappa * z.abs();
    let e = (-a).exp();
    match j {
        4 => (1.0 + a) * e / (4.0 * kappa * kappa),
        5 => (1.0 + a) * e / (4.0 * kappa),
        _ => inverse_ft_closed_form(j, kappa, z).abs(),
    }
}

/// `(1/2π)∫_ℝ e^{izt} m_j(t) dt` by quadrature, with the closed form.
///
/// The contour is shifted to `Im t = c`, `c = sgn(z) max(0, κ − 1/|z|)`,
/// which removes the `e^{−κ|z|}` cancellation; the shifted integrand obeys
/// `f(−t) = conj f(t)`, so only `(1/π)∫_0^∞ Re f` is computed, by half-period
/// panels accelerated with Wynn's epsilon algorithm.
pub fn inverse_ft_oracle(j: usize, kappa: f64, z: f64) -> Result<OracleValue> {
    if !(1..=5).contains(&j) {
        return Err(Error::InvalidArgument(format!("identity index {j} not in 1..=5")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("need κ > 0 and finite z, got κ = {kappa}, z = {z}")));
    }
    let closed_form = inverse_ft_closed_form(j, kappa, z);
    let env = envelope(j, kappa, z);
    let tol = 1e-9 * env;
    let (integral, error_estimate) = if z == 0.0 {
        if j == 2 || j == 4 {
            (0.0, 0.0)
        } else {
            // t = u / (1 − u)
            let f = |u: f64| {
                if u >= 1.0 {
                    return 0.0;
                }
                let t = u / (1.0 - u);
                symbol(j, kappa, Complex64::new(t, 0.0)).re / ((1.0 - u) * (1.0 - u))
            };
            quadrature::integrate(f, 0.0, 1.0, tol, 1e-13, 2000)?
        }
    } else {
        let c = z.signum() * (kappa - 1.0 / z.abs()).max(0.0);
        let f = |t: f64| {
            let w = Complex64::new(t, c);
            ((Complex64::new(0.0, z) * w).exp() * symbol(j, kappa, w)).re
        };
        let half = PI / z.abs();
        quadrature::integrate_oscillatory(f, half, tol * PI, 4000)?
    };
    let quadrature = integral / PI;
    Ok(OracleValue { quadrature, closed_form, envelope: env, error_estimate: error_estimate / PI })
}

/// Largest `c` with `ratio(x) e^{c 2^j x} <= bound` at every sampled
/// `(x, ratio)`; `+∞` when no sample constrains it.
pub fn envelope_rate(samples: &[(f64, f64)], j: i32, bound: f64) -> f64 {
    let scale = 2f64.powi(j);
    samples
        .iter()
        .filter(|(x, r)| *x > 0.0 && *r > 0.0)
        .map(|(x, r)| (bound / r).ln() / (scale * x))
        .fold(f64::INFINITY, f64::min)
}
