//! Tangential Fourier analysis: multipliers, Riesz transforms, derivatives,
//! Littlewood–Paley blocks and dealiased products.
//!
//! Axis indices are zero-based: `axis = 0..d`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{HalfSpaceField, TangentialField};
use crate::grid::Grid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Apply the symbol `m(ξ′, |ξ′|)` to every component. The zero mode and
/// Nyquist modes are never evaluated and stay zero.
pub fn apply_multiplier<M>(f: &TangentialField, m: M) -> Result<TangentialField>
where
    M: Fn(&[f64; 3], f64) -> Complex64,
{
    let grid = *f.grid();
    let modes = grid.modes();
    let mut symbol = vec![Complex64::new(0.0, 0.0); modes];
    for (idx, s) in symbol.iter_mut().enumerate() {
        if !grid.is_active(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        let kappa = grid.kappa(idx);
        let v = m(&xi, kappa);
        if !(v.re.is_finite() && v.im.is_finite()) {
            let k = grid.wavenumber(idx);
            return Err(Error::NonFiniteSymbol { wavevector: k[..grid.dim()].to_vec() });
        }
        *s = v;
    }
    let mut coeffs = f.coeffs().to_vec();
    for chunk in coeffs.chunks_mut(modes) {
        for (c, s) in chunk.iter_mut().zip(&symbol) {
            *c *= s;
        }
    }
    TangentialField::from_coefficients(grid, f.components(), coeffs)
}

/// Real radial symbol `m(|ξ′|)`.
pub fn apply_radial<M>(f: &TangentialField, m: M) -> Result<TangentialField>
where
    M: Fn(f64) -> f64,
{
    apply_multiplier(f, |_, k| Complex64::new(m(k), 0.0))
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis >= grid.dim() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for d = {}", grid.dim())));
    }
    Ok(())
}

/// `ℛ_axis`, symbol `iξ′_axis / |ξ′|`.
pub fn riesz_transform(axis: usize, f: &TangentialField) -> Result<TangentialField> {
    check_axis(f.grid(), axis)?;
    apply_multiplier(f, |xi, k| I * (xi[axis] / k))
}

/// `∂_axis`, symbol `iξ′_axis`.
pub fn partial(axis: usize, f: &TangentialField) -> Result<TangentialField> {
    check_axis(f.grid(), axis)?;
    apply_multiplier(f, |xi, _| I * xi[axis])
}

/// Gradient of a scalar field; `d` components.
pub fn tangential_grad(f: &TangentialField) -> Result<TangentialField> {
    if f.components() != 1 {
        return Err(Error::ComponentMismatch { expected: 1, found: f.components() });
    }
    let parts = (0..f.grid().dim()).map(|a| partial(a, f)).collect::<Result<Vec<_>>>()?;
    TangentialField::stack(&parts.iter().collect::<Vec<_>>())
}

/// Divergence of a `d`-vector field.
pub fn tangential_div(v: &TangentialField) -> Result<TangentialField> {
    let d = v.grid().dim();
    if v.components() != d {
        return Err(Error::ComponentMismatch { expected: d, found: v.components() });
    }
    let mut out = TangentialField::zeros(*v.grid(), 1);
    for a in 0..d {
        out = &out + &partial(a, &v.select(&[a]))?;
    }
    Ok(out)
}

/// `Δ′`, symbol `−|ξ′|²`.
pub fn laplacian(f: &TangentialField) -> Result<TangentialField> {
    apply_radial(f, |k| -k * k)
}

/// `e^{−x|∇′|}`.
pub fn poisson_apply(x: f64, f: &TangentialField) -> Result<TangentialField> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("Poisson height {x} must be nonnegative")));
    }
    if x == 0.0 {
        return Ok(f.clone());
    }
    apply_radial(f, |k| (-x * k).exp())
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn bump(rho: f64) -> f64 {
    if rho <= 1.0 {
        1.0
    } else if rho >= 2.0 {
        0.0
    } else {
        let t = rho - 1.0;
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Annulus symbol `φ̂_j(κ) = χ(2^{−j}κ) − χ(2^{−j+1}κ)`, supported in `[2^{j−1}, 2^{j+1}]`.
pub fn block_symbol(j: i32, kappa: f64) -> f64 {
    let s = 2f64.powi(-j);
    bump(s * kappa) - bump(2.0 * s * kappa)
}

/// `Δ_j f`; identically zero outside the grid's dyadic range.
pub fn lp_block(j: i32, f: &TangentialField) -> Result<TangentialField> {
    if !f.grid().dyadic_range().contains(j) {
        return Ok(TangentialField::zeros(*f.grid(), f.components()));
    }
    apply_radial(f, |k| block_symbol(j, k))
}

/// All blocks over the dyadic range, in increasing `j`.
pub fn lp_blocks(f: &TangentialField) -> Result<Vec<(i32, TangentialField)>> {
    f.grid().dyadic_range().iter().map(|j| Ok((j, lp_block(j, f)?))).collect()
}

/// `Σ_j φ̂_j(κ)` over the range; equals one on every represented nonzero frequency.
pub fn partition_sum(grid: &Grid, kappa: f64) -> f64 {
    grid.dyadic_range().iter().map(|j| block_symbol(j, kappa)).sum()
}

/// Padded length used for dealiased products.
pub fn padded_len(points: usize) -> usize {
    3 * points / 2
}

/// Physical samples of each component on the `3N/2` grid.
pub fn to_padded_physical(f: &TangentialField) -> Vec<Vec<f64>> {
    let grid = f.grid();
    let (n, d) = (grid.points(), grid.dim());
    let p = padded_len(n);
    (0..f.components())
        .map(|c| {
            let mut data = fft::pad(f.component(c), n, p, d);
            fft::inverse(&mut data, p, d);
            data.into_iter().map(|z| z.re).collect()
        })
        .collect()
}

/// Spectral truncation of padded physical samples back to the `N` grid.
pub fn from_padded_physical(grid: &Grid, components: &[Vec<f64>]) -> Result<TangentialField> {
    let (n, d) = (grid.points(), grid.dim());
    let p = padded_len(n);
    let mut coeffs = Vec::with_capacity(components.len() * grid.modes());
    for values in components {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut data, p, d);
        coeffs.extend(fft::truncate(&data, p, n, d));
    }
    TangentialField::from_coefficients(*grid, components.len(), coeffs)
}

/// Dealiased pointwise product of two scalar fields.
pub fn product(f: &TangentialField, g: &TangentialField) -> Result<TangentialField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("product of fields on different grids".into()));
    }
    if f.components() != 1 || g.components() != 1 {
        return Err(Error::InvalidArgument("product expects scalar fields".into()));
    }
    let pf = to_padded_physical(f).pop().unwrap();
    let pg = to_padded_physical(g).pop().unwrap();
    let prod: Vec<f64> = pf.iter().zip(&pg).map(|(a, b)| a * b).collect();
    from_padded_physical(f.grid(), &[prod])
}

/// Dealiased outer product: component `k * c_g + l` is `f_k g_l`.
pub fn outer_product(f: &TangentialField, g: &TangentialField) -> Result<TangentialField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("product of fields on different grids".into()));
    }
    let pf = to_padded_physical(f);
    let pg = if std::ptr::eq(f, g) { pf.clone() } else { to_padded_physical(g) };
    let mut out = Vec::with_capacity(pf.len() * pg.len());
    for a in &pf {
        for b in &pg {
            out.push(a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<f64>>());
        }
    }
    from_padded_physical(f.grid(), &out)
}

/// Slab-wise (and tail-wise) outer product of two half-space fields.
/// The product has a tail only when both factors do.
pub fn outer_product_field(f: &HalfSpaceField, g: &HalfSpaceField) -> Result<HalfSpaceField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("product of half-space fields on different grids".into()));
    }
    let slabs = f
        .slabs()
        .par_iter()
        .zip(g.slabs().par_iter())
        .map(|(a, b)| outer_product(a, b))
        .collect::<Result<Vec<_>>>()?;
    let tail = match (f.tail(), g.tail()) {
        (Some(a), Some(b)) => Some(outer_product(a, b)?),
        _ => None,
    };
    HalfSpaceField::from_slabs(*f.grid(), slabs, tail)
}

/// Paraproduct split `fg = T_f g + R(f, g) + T_g f`.
#[derive(Debug, Clone)]
pub struct Bony {
    pub low_high: TangentialField,
    pub resonant: TangentialField,
    pub high_low: TangentialField,
}

impl Bony {
    pub fn sum(&self) -> TangentialField {
        &(&self.low_high + &self.resonant) + &self.high_low
    }
}

/// Bony decomposition of scalar `f, g`: `T_f g = Σ_k S_{k−3}f Δ_k g`,
/// `R = Σ_{|k−ℓ|≤2} Δ_k f Δ_ℓ g`, `T_g f = Σ_k Δ_k f S_{k−3}g`.
pub fn bony_decompose(f: &TangentialField, g: &TangentialField) -> Result<Bony> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("Bony decomposition on different grids".into()));
    }
    if f.components() != 1 || g.components() != 1 {
        return Err(Error::InvalidArgument("Bony decomposition expects scalar fields".into()));
    }
    let grid = *f.grid();
    let fb: Vec<Vec<f64>> = lp_blocks(f)?.iter().map(|(_, b)| to_padded_physical(b).pop().unwrap()).collect();
    let gb: Vec<Vec<f64>> = lp_blocks(g)?.iter().map(|(_, b)| to_padded_physical(b).pop().unwrap()).collect();
    let len = fb.first().map_or(0, Vec::len);
    let mut th = vec![0.0; len];
    let mut rr = vec![0.0; len];
    let mut ht = vec![0.0; len];
    for (k, fk) in fb.iter().enumerate() {
        for (l, gl) in gb.iter().enumerate() {
            let target = if l + 3 <= k {
                &mut ht
            } else if k + 3 <= l {
                &mut th
            } else {
                &mut rr
            };
            for ((t, a), b) in target.iter_mut().zip(fk).zip(gl) {
                *t += a * b;
            }
        }
    }
    Ok(Bony {
        low_high: from_padded_physical(&grid, &[th])?,
        resonant: from_padded_physical(&grid, &[rr])?,
        high_low: from_padded_physical(&grid, &[ht])?,
    })
}
