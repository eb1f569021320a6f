//! Seeded band-limited random data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{HalfSpaceField, TangentialField};
use crate::grid::Grid;

pub type DataRng = ChaCha8Rng;

pub fn rng(seed: u64) -> DataRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real field with independent uniform coefficients on the modes
/// `0 < |k|_∞ <= kmax`, amplitude decaying like `(1 + |k|)^{-decay}`.
pub fn band_limited(grid: Grid, components: usize, kmax: i64, decay: f64, rng: &mut DataRng) -> TangentialField {
    let mut f = TangentialField::zeros(grid, components);
    for c in 0..components {
        for idx in 0..grid.modes() {
            if !grid.is_active(idx) {
                continue;
            }
            let k = grid.wavenumber(idx);
            let kinf = k.iter().map(|v| v.abs()).max().unwrap();
            if kinf > kmax {
                continue;
            }
            // visit each conjugate pair once
            if grid.conjugate_index(idx) < idx {
                continue;
            }
            let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            let amp = (1.0 + norm.sqrt()).powf(-decay);
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
            f.set_mode(c, idx, z);
        }
    }
    f
}

/// Smooth vertical shapes used to build separable random half-space data.
pub fn vertical_shape(kind: usize, y: f64, scale: f64) -> f64 {
    let t = y / scale;
    match kind % 3 {
        0 => t * (-t).exp(),
        1 => (-t * t).exp(),
        _ => (1.0 - t) * (-t).exp(),
    }
}

/// `Σ_i T_i(x′) φ_i(x_n)` with `terms` random tangential factors and smooth
/// vertical shapes sampled at slab centers; no tail.
pub fn separable(grid: Grid, components: usize, kmax: i64, terms: usize, rng: &mut DataRng) -> Result<HalfSpaceField> {
    let centers = grid.slab_centers();
    let parts: Vec<(TangentialField, usize, f64)> = (0..terms)
        .map(|i| {
            let t = band_limited(grid, components, kmax, 1.0, rng);
            let scale = rng.gen_range(0.5..2.5);
            (t, i, scale)
        })
        .collect();
    HalfSpaceField::from_slab_fn(grid, None, |m| {
        let mut s = TangentialField::zeros(grid, components);
        for (t, kind, scale) in &parts {
            s = s.axpy(vertical_shape(*kind, centers[m], *scale), t).expect("same grid");
        }
        s
    })
}
