//! Spectral field containers.
//!
//! A [`TangentialField`] stores normalized Fourier coefficients of a real
//! `c`-component function on the tangential torus. The zero mode and the
//! unpaired Nyquist modes are kept identically zero, which realizes the
//! "modulo polynomials" quotient of homogeneous spaces and keeps every odd
//! symbol Hermitian.
//!
//! A [`HalfSpaceField`] stacks one tangential field per vertical slab
//! (piecewise constant in `x_n`) and optionally a constant tail for
//! `x_n > X_max`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct TangentialField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl TangentialField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Self { grid, components, coeffs: vec![ZERO; components * grid.modes()] }
    }

    /// Wrap raw coefficients (`components × N^d`, component-major).
    /// The zero mode and Nyquist modes are cleared.
    pub fn from_coefficients(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.modes() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for {components} components, got {}",
                components * grid.modes(),
                coeffs.len()
            )));
        }
        let mut f = Self { grid, components, coeffs };
        f.clean();
        Ok(f)
    }

    /// Transform real physical samples (`components × N^d`, row-major).
    pub fn from_physical(grid: Grid, components: usize, values: &[f64]) -> Result<Self> {
        let modes = grid.modes();
        if components == 0 || values.len() != components * modes {
            return Err(Error::InvalidArgument(format!(
                "expected {} physical values for {components} components, got {}",
                components * modes,
                values.len()
            )));
        }
        let mut coeffs: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for chunk in coeffs.chunks_mut(modes) {
            fft::forward(chunk, grid.points(), grid.dim());
        }
        Self::from_coefficients(grid, components, coeffs)
    }

    /// Build from a function of the physical position `x′ ∈ [0, L)^d`.
    pub fn from_fn<F>(grid: Grid, components: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, &[f64; 3]) -> f64,
    {
        let n = grid.points();
        let dx = grid.period() / n as f64;
        let modes = grid.modes();
        let mut values = vec![0.0; components * modes];
        for c in 0..components {
            for idx in 0..modes {
                let mut x = [0.0; 3];
                let mut rest = idx;
                for axis in (0..grid.dim()).rev() {
                    x[axis] = (rest % n) as f64 * dx;
                    rest /= n;
                }
                values[c * modes + idx] = f(c, &x);
            }
        }
        Self::from_physical(grid, components, &values)
    }

    fn clean(&mut self) {
        let modes = self.grid.modes();
        for c in 0..self.components {
            self.coeffs[c * modes] = ZERO;
        }
        for idx in 0..modes {
            if self.grid.is_nyquist(idx) {
                for c in 0..self.components {
                    self.coeffs[c * modes + idx] = ZERO;
                }
            }
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let m = self.grid.modes();
        &self.coeffs[c * m..(c + 1) * m]
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of component `c` at mode `idx`.
    pub fn coeff(&self, c: usize, idx: usize) -> Complex64 {
        self.coeffs[c * self.grid.modes() + idx]
    }

    /// Set a coefficient and its Hermitian partner, keeping the field real.
    pub fn set_mode(&mut self, c: usize, idx: usize, value: Complex64) {
        if !self.grid.is_active(idx) {
            return;
        }
        let m = self.grid.modes();
        let conj = self.grid.conjugate_index(idx);
        self.coeffs[c * m + idx] = value;
        self.coeffs[c * m + conj] = value.conj();
        if conj == idx {
            self.coeffs[c * m + idx].im = 0.0;
        }
    }

    /// Extract a subset of components.
    pub fn select(&self, components: &[usize]) -> Self {
        let m = self.grid.modes();
        let mut coeffs = Vec::with_capacity(components.len() * m);
        for &c in components {
            coeffs.extend_from_slice(self.component(c));
        }
        Self { grid: self.grid, components: components.len(), coeffs }
    }

    /// Concatenate components of several fields on one grid.
    pub fn stack(parts: &[&TangentialField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("empty stack".into()))?;
        let mut coeffs = Vec::new();
        let mut components = 0;
        for p in parts {
            if p.grid != first.grid {
                return Err(Error::GridMismatch("stacked fields live on different grids".into()));
            }
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(Self { grid: first.grid, components, coeffs })
    }

    /// Real physical samples, `components × N^d`.
    pub fn to_physical(&self) -> Vec<f64> {
        self.physical_complex().into_iter().map(|z| z.re).collect()
    }

    /// Complex physical samples; the imaginary part measures Hermitian defects.
    pub fn physical_complex(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        for chunk in data.chunks_mut(self.grid.modes()) {
            fft::inverse(chunk, self.grid.points(), self.grid.dim());
        }
        data
    }

    /// Largest violation of `f̂(-k) = conj f̂(k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.grid.modes();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            for idx in 0..m {
                let conj = self.grid.conjugate_index(idx);
                let d = (self.coeffs[c * m + idx] - self.coeffs[c * m + conj].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| *z == ZERO)
    }

    /// `sqrt(Σ |f̂|²)` over all components; `L^{d/2}` times this is the `L²` norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            components: self.components,
            coeffs: self.coeffs.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            components: self.components,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b * alpha).collect(),
        })
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("tangential fields on different grids".into()));
        }
        if self.components != other.components {
            return Err(Error::ComponentMismatch { expected: self.components, found: other.components });
        }
        Ok(())
    }

    /// Transport to the companion grid of a dyadic rescaling:
    /// `g(x′) = λ^power f(λ x′)` lives on `grid.rescaled(λ)`.
    pub fn rescaled(&self, lambda: f64, power: i32) -> Result<Self> {
        let grid = self.grid.rescaled(lambda)?;
        let factor = lambda.powi(power);
        Ok(Self {
            grid,
            components: self.components,
            coeffs: self.coeffs.iter().map(|z| z * factor).collect(),
        })
    }

    /// Re-home identical coefficients onto another grid with the same torus
    /// sampling (used when only the vertical layout changes).
    pub(crate) fn with_grid(&self, grid: Grid) -> Self {
        debug_assert!(grid.dim() == self.grid.dim() && grid.points() == self.grid.points());
        Self { grid, components: self.components, coeffs: self.coeffs.clone() }
    }
}

impl Add for &TangentialField {
    type Output = TangentialField;
    fn add(self, rhs: Self) -> TangentialField {
        self.axpy(1.0, rhs).expect("incompatible tangential fields")
    }
}

impl Sub for &TangentialField {
    type Output = TangentialField;
    fn sub(self, rhs: Self) -> TangentialField {
        self.axpy(-1.0, rhs).expect("incompatible tangential fields")
    }
}

impl Mul<f64> for &TangentialField {
    type Output = TangentialField;
    fn mul(self, rhs: f64) -> TangentialField {
        self.scaled(rhs)
    }
}

/// Piecewise-constant-in-`x_n` field on the slab stack, plus optional tail.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceField {
    grid: Grid,
    components: usize,
    slabs: Vec<TangentialField>,
    tail: Option<TangentialField>,
}

impl HalfSpaceField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Self {
            grid,
            components,
            slabs: vec![TangentialField::zeros(grid, components); grid.slabs()],
            tail: None,
        }
    }

    pub fn from_slabs(grid: Grid, slabs: Vec<TangentialField>, tail: Option<TangentialField>) -> Result<Self> {
        if slabs.len() != grid.slabs() {
            return Err(Error::GridMismatch(format!("expected {} slabs, got {}", grid.slabs(), slabs.len())));
        }
        let components = slabs[0].components();
        for s in slabs.iter().chain(tail.iter()) {
            if !s.grid().same_torus(&grid) {
                return Err(Error::GridMismatch("slab torus differs from the half-space grid".into()));
            }
            if s.components() != components {
                return Err(Error::ComponentMismatch { expected: components, found: s.components() });
            }
        }
        let slabs = slabs.into_iter().map(|s| s.with_grid(grid)).collect();
        let tail = tail.map(|t| t.with_grid(grid));
        Ok(Self { grid, components, slabs, tail })
    }

    /// The `x_n`-independent field equal to `profile` on every slab and in the tail.
    pub fn constant(grid: Grid, profile: &TangentialField) -> Result<Self> {
        if !profile.grid().same_torus(&grid) {
            return Err(Error::GridMismatch("profile torus differs from the half-space grid".into()));
        }
        let p = profile.with_grid(grid);
        Ok(Self {
            grid,
            components: p.components(),
            slabs: vec![p.clone(); grid.slabs()],
            tail: Some(p),
        })
    }

    /// Build from a function of the slab index producing tangential profiles.
    pub fn from_slab_fn<F>(grid: Grid, tail: Option<TangentialField>, f: F) -> Result<Self>
    where
        F: FnMut(usize) -> TangentialField,
    {
        let slabs: Vec<_> = (0..grid.slabs()).map(f).collect();
        Self::from_slabs(grid, slabs, tail)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn slabs(&self) -> &[TangentialField] {
        &self.slabs
    }

    pub fn slab(&self, m: usize) -> &TangentialField {
        &self.slabs[m]
    }

    pub fn tail(&self) -> Option<&TangentialField> {
        self.tail.as_ref()
    }

    /// Tail present and not identically zero.
    pub fn has_nonzero_tail(&self) -> bool {
        self.tail.as_ref().is_some_and(|t| !t.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.slabs.iter().all(|s| s.is_zero()) && !self.has_nonzero_tail()
    }

    /// Slab values followed by the tail (zero when absent).
    pub fn tail_or_zero(&self) -> TangentialField {
        self.tail.clone().unwrap_or_else(|| TangentialField::zeros(self.grid, self.components))
    }

    pub fn select(&self, components: &[usize]) -> Self {
        Self {
            grid: self.grid,
            components: components.len(),
            slabs: self.slabs.iter().map(|s| s.select(components)).collect(),
            tail: self.tail.as_ref().map(|t| t.select(components)),
        }
    }

    pub fn map_slabs<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&TangentialField) -> Result<TangentialField>,
    {
        let slabs = self.slabs.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let tail = self.tail.as_ref().map(&mut f).transpose()?;
        Self::from_slabs(self.grid, slabs, tail)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            components: self.components,
            slabs: self.slabs.iter().map(|s| s.scaled(factor)).collect(),
            tail: self.tail.as_ref().map(|t| t.scaled(factor)),
        }
    }

    /// `self + alpha * other`; the tail is present if either operand has one.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("half-space fields on different grids".into()));
        }
        if self.components != other.components {
            return Err(Error::ComponentMismatch { expected: self.components, found: other.components });
        }
        let slabs = self
            .slabs
            .iter()
            .zip(&other.slabs)
            .map(|(a, b)| a.axpy(alpha, b))
            .collect::<Result<Vec<_>>>()?;
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (Some(t), None) => Some(t.clone()),
            (None, Some(t)) => Some(t.scaled(alpha)),
            (Some(a), Some(b)) => Some(a.axpy(alpha, b)?),
        };
        Ok(Self { grid: self.grid, components: self.components, slabs, tail })
    }

    /// Companion field of the dyadic rescaling `λ^power f(λ x′, λ x_n)`.
    pub fn rescaled(&self, lambda: f64, power: i32) -> Result<Self> {
        let grid = self.grid.rescaled(lambda)?;
        let slabs = self.slabs.iter().map(|s| s.rescaled(lambda, power)).collect::<Result<Vec<_>>>()?;
        let tail = self.tail.as_ref().map(|t| t.rescaled(lambda, power)).transpose()?;
        Ok(Self { grid, components: self.components, slabs, tail })
    }

    /// Largest coefficient magnitude over slabs and tail.
    pub fn max_abs_coeff(&self) -> f64 {
        self.slabs
            .iter()
            .chain(self.tail.iter())
            .fold(0.0, |m, s| m.max(s.max_abs_coeff()))
    }
}

impl Add for &HalfSpaceField {
    type Output = HalfSpaceField;
    fn add(self, rhs: Self) -> HalfSpaceField {
        self.axpy(1.0, rhs).expect("incompatible half-space fields")
    }
}

impl Sub for &HalfSpaceField {
    type Output = HalfSpaceField;
    fn sub(self, rhs: Self) -> HalfSpaceField {
        self.axpy(-1.0, rhs).expect("incompatible half-space fields")
    }
}
