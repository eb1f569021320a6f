//! Independent check of `u^w[F]`: extend `F` to the whole line in `x_n`
//! (even in the second index for tangential columns, odd for the normal
//! column), expand it in a Fourier series of period `P = 16 X_max`, apply
//! `(δ_kℓ − ξ_kξ_ℓ/|ξ|²) iξ_m / |ξ|²` and sum back at the slab centers.
//!
//! Slab values are piecewise constant, so the series coefficients are exact:
//! the cell DFT `D(r)` is periodic in the vertical index with period
//! `K = P/h`, and each cell contributes `(h/P) sinc(ζh/2)` after centering.
//! Summing aliases `j = r + aK` for `|a| ≤ aliases` and folding into `K`
//! bins leaves one `K`-point inverse transform per component.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::field::HalfSpaceField;
use crate::fft;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Vertical resolution of the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionConfig {
    /// Number of bins per period, `K = P/h`; must be a multiple of `2M`.
    pub bins_per_slab: usize,
    /// Alias shells `|a| ≤ aliases` summed per bin.
    pub aliases: usize,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        Self { bins_per_slab: 16, aliases: 512 }
    }
}

/// Oracle samples of `u^w[F]` on the slab centers, keyed by mode index.
#[derive(Debug, Clone)]
pub struct ReflectionSolution {
    /// `(mode, values[k][m])`
    pub modes: Vec<(usize, Vec<Vec<Complex64>>)>,
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Run the oracle on every mode where `F` has data.
pub fn reflection_oracle(force: &HalfSpaceField, cfg: ReflectionConfig) -> Result<ReflectionSolution> {
    let grid = *force.grid();
    let n = grid.ambient_dim();
    if force.components() != n * n {
        return Err(Error::ComponentMismatch { expected: n * n, found: force.components() });
    }
    if force.has_nonzero_tail() {
        return Err(Error::InvalidArgument("reflection oracle needs a force without tail".into()));
    }
    let m_slabs = grid.slabs();
    let h = grid.slab_width();
    let k_bins = cfg.bins_per_slab * m_slabs;
    if cfg.bins_per_slab < 2 || k_bins % (2 * m_slabs) != 0 {
        return Err(Error::InvalidArgument(format!("bins_per_slab = {} must be an even number >= 2", cfg.bins_per_slab)));
    }
    let period = k_bins as f64 * h;
    let active: Vec<usize> = (0..grid.modes())
        .filter(|&idx| grid.is_active(idx) && idx < grid.conjugate_index(idx))
        .filter(|&idx| force.slabs().iter().any(|s| (0..n * n).any(|c| s.coeff(c, idx) != ZERO)))
        .collect();
    let mut modes: Vec<(usize, Vec<Vec<Complex64>>)> = active
        .par_iter()
        .map(|&idx| (idx, solve_mode(force, idx, n, k_bins, period, h, cfg.aliases)))
        .collect();
    // real fields: the conjugate mode carries the conjugate profile
    let mirrored: Vec<_> = modes
        .iter()
        .map(|(idx, v)| {
            let conj = v.iter().map(|row| row.iter().map(|z| z.conj()).collect()).collect();
            (grid.conjugate_index(*idx), conj)
        })
        .collect();
    modes.extend(mirrored);
    modes.sort_by_key(|m| m.0);
    Ok(ReflectionSolution { modes })
}

fn solve_mode(force: &HalfSpaceField, idx: usize, n: usize, k_bins: usize, period: f64, h: f64, aliases: usize) -> Vec<Vec<Complex64>> {
    let grid = force.grid();
    let m_slabs = grid.slabs();
    let xi = grid.wavevector(idx);
    let kappa2 = grid.kappa(idx).powi(2);
    // cell DFTs of the extended components over z ∈ [−X, −X + K h)
    let dfts: Vec<Vec<Complex64>> = (0..n * n)
        .map(|c| {
            let odd = c % n == n - 1;
            let mut cells = vec![ZERO; k_bins];
            for m in 0..m_slabs {
                let v = force.slab(m).coeff(c, idx);
                cells[m_slabs + m] = v;
                cells[m_slabs - 1 - m] = if odd { -v } else { v };
            }
            fft::transform(&mut cells, k_bins, 1, FftDirection::Forward);
            cells
        })
        .collect();
    let mut bins = vec![vec![ZERO; k_bins]; n];
    let a = aliases as i64;
    let kb = k_bins as i64;
    let mut div = vec![ZERO; n];
    let mut full = [0.0; 4];
    full[..n - 1].copy_from_slice(&xi[..n - 1]);
    for r in 0..kb {
        let r_signed = if r < kb / 2 { r } else { r - kb };
        for shell in -a..=a {
            let j = r_signed + shell * kb;
            let zeta = 2.0 * PI * j as f64 / period;
            full[n - 1] = zeta;
            let xi2 = kappa2 + zeta * zeta;
            let weight = h / period * sinc(0.5 * zeta * h);
            // (div F^w)_l
            for (l, slot) in div.iter_mut().enumerate() {
                let mut s = ZERO;
                for m in 0..n {
                    s += dfts[l * n + m][r as usize] * full[m];
                }
                *slot = Complex64::new(-s.im, s.re);
            }
            let proj: Complex64 = (0..n).map(|l| div[l] * full[l]).sum::<Complex64>() / xi2;
            for k in 0..n {
                bins[k][r as usize] += (div[k] - proj * full[k]) * (weight / xi2);
            }
        }
    }
    // u(z_m) = Σ_r B(r) e^{2πi r (M + m)/K}
    bins.into_iter()
        .map(|mut b| {
            fft::transform(&mut b, k_bins, 1, FftDirection::Inverse);
            (0..m_slabs).map(|m| b[m_slabs + m]).collect()
        })
        .collect()
}

impl ReflectionSolution {
    /// `max |u_oracle − u| / max |u_oracle|` over the oracle's modes, all
    /// components and slab centers.
    pub fn relative_error(&self, u: &HalfSpaceField) -> f64 {
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for (idx, rows) in &self.modes {
            for (k, row) in rows.iter().enumerate() {
                for (m, v) in row.iter().enumerate() {
                    err = err.max((u.slab(m).coeff(k, *idx) - v).norm());
                    scale = scale.max(v.norm());
                }
            }
        }
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::random;
    use crate::stokes::{reflection_force, whole_space_solution};

    #[test]
    fn matches_kernel_engine() {
        for d in [2, 3] {
            let g = Grid::new(d, 8, 4.0 * PI, 8, 2.0).unwrap();
            let f = reflection_force(g, 2, 2, &mut random::rng(9)).unwrap();
            let u = whole_space_solution(&f).unwrap();
            let o = reflection_oracle(&f, ReflectionConfig::default()).unwrap();
            let e = o.relative_error(&u);
            assert!(e < 1e-6, "d = {d}: {e}");
        }
    }
}
