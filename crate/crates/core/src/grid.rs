//! Discretization of the half space: a periodic tangential torus of `N^d`
//! points and `M` piecewise-constant vertical slabs of width `X_max / M`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tangential torus plus vertical slab layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    points: usize,
    period: f64,
    slabs: usize,
    height: f64,
}

impl Grid {
    /// `dim` tangential axes of `points` samples over period `period`, and
    /// `slabs` vertical cells covering `(0, height)`.
    pub fn new(dim: usize, points: usize, period: f64, slabs: usize, height: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("tangential dimension {dim} not in {{2, 3}}")));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {points} must be a power of two >= 4")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period L = {period} must be positive")));
        }
        if slabs == 0 {
            return Err(Error::InvalidGrid("slab count M must be positive".into()));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::InvalidGrid(format!("X_max = {height} must be positive")));
        }
        Ok(Self { dim, points, period, slabs, height })
    }

    /// Default desk-scale grid for the ambient dimension `n`:
    /// `n = 3` uses `N = M = 64`, `n = 4` uses `N = M = 32`; both `L = 16π`, `X_max = 8`.
    pub fn desk(n: usize) -> Result<Self> {
        match n {
            3 => Self::new(2, 64, 16.0 * PI, 64, 8.0),
            4 => Self::new(3, 32, 16.0 * PI, 32, 8.0),
            _ => Err(Error::InvalidGrid(format!("no desk grid for n = {n}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient dimension `n = d + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn slabs(&self) -> usize {
        self.slabs
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn slab_width(&self) -> f64 {
        self.height / self.slabs as f64
    }

    /// Number of tangential modes `N^d`.
    pub fn modes(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Physical cell volume `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        (self.period / self.points as f64).powi(self.dim as i32)
    }

    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn kappa_min(&self) -> f64 {
        self.fundamental()
    }

    pub fn kappa_max(&self) -> f64 {
        PI * self.points as f64 * (self.dim as f64).sqrt() / self.period
    }

    pub fn dyadic_range(&self) -> DyadicRange {
        DyadicRange::for_band(self.kappa_min(), self.kappa_max())
    }

    /// Slab centers `(m + 1/2) h`.
    pub fn slab_centers(&self) -> Vec<f64> {
        let h = self.slab_width();
        (0..self.slabs).map(|m| (m as f64 + 0.5) * h).collect()
    }

    /// Integer wavevector of flat mode index `idx` (row-major, signed frequencies).
    pub fn wavenumber(&self, idx: usize) -> [i64; 3] {
        let n = self.points;
        let mut k = [0i64; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            let i = rest % n;
            rest /= n;
            k[axis] = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        }
        k
    }

    /// Physical wavevector `ξ′ = 2π k / L` (unused axes are zero).
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.wavenumber(idx);
        let f = self.fundamental();
        [k[0] as f64 * f, k[1] as f64 * f, k[2] as f64 * f]
    }

    pub fn kappa(&self, idx: usize) -> f64 {
        let xi = self.wavevector(idx);
        (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
    }

    /// Flat index of a signed integer wavevector, if representable.
    pub fn mode_index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let n = self.points as i64;
        let mut idx = 0usize;
        for &ka in k {
            if ka < -n / 2 || ka >= n / 2 {
                return None;
            }
            let i = if ka < 0 { ka + n } else { ka };
            idx = idx * self.points + i as usize;
        }
        Some(idx)
    }

    /// Index of `-k`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.points;
        let mut out = 0usize;
        let mut stride = 1usize;
        let mut rest = idx;
        for _ in 0..self.dim {
            let i = rest % n;
            rest /= n;
            out += ((n - i) % n) * stride;
            stride *= n;
        }
        out
    }

    /// Whether the mode has a component at the unpaired frequency `-N/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let k = self.wavenumber(idx);
        let half = (self.points / 2) as i64;
        k[..self.dim].iter().any(|&ka| ka == -half)
    }

    /// Whether the mode carries data: nonzero and not Nyquist.
    pub fn is_active(&self, idx: usize) -> bool {
        idx != 0 && !self.is_nyquist(idx)
    }

    /// Companion grid for the dyadic rescaling `f ↦ λ^α f(λ·)`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.dim, self.points, self.period / lambda, self.slabs, self.height / lambda)
    }

    pub fn same_torus(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.points == other.points && self.period == other.period
    }

    /// Precomputed `(ξ′, |ξ′|)` for every mode.
    pub fn frequency_table(&self) -> Vec<([f64; 3], f64)> {
        (0..self.modes())
            .map(|idx| {
                let xi = self.wavevector(idx);
                (xi, (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt())
            })
            .collect()
    }
}

/// Active Littlewood–Paley indices for a finite frequency band.
///
/// Chosen with `2^{j_min} <= κ_min` and `2^{j_max} >= κ_max`, so the finite
/// dyadic sum telescopes to one on every represented nonzero frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl DyadicRange {
    pub fn for_band(kappa_min: f64, kappa_max: f64) -> Self {
        let j_min = kappa_min.log2().floor() as i32;
        let j_max = kappa_max.log2().ceil() as i32;
        Self { j_min, j_max }
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.j_max < self.j_min
    }
}
