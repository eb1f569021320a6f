//! Asymptotic profile of non-decaying solutions: the modified
//! `(n−1)`-dimensional limit system and the decay ladder
//! `D(R) = ‖u − ū‖_{L̃^∞(R,∞; Ḃ^{d/p−1}_{p,r})}`.

use num_complex::Complex64;

use crate::besov::{self, CLIndex};
use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::fixed_point::{self, IterationReport, SolverConfig};
use crate::grid::Grid;
use crate::kernels;
use crate::spectral;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Stopping rule and exponents for the limit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConfig {
    pub p: f64,
    pub r: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl LimitConfig {
    pub fn from_solver(cfg: &SolverConfig) -> Self {
        Self { p: cfg.p, r: cfg.r, tol: cfg.tol, max_iter: cfg.max_iter }
    }

    pub fn norm(&self, u: &TangentialField) -> f64 {
        besov::besov_norm(u, &besov::boundary_index(u.grid().dim(), self.p, self.r))
    }

    pub fn force_norm(&self, f: &TangentialField) -> f64 {
        let d = f.grid().dim();
        besov::besov_norm(f, &besov::BesovIndex { s: d as f64 / self.p - 2.0, p: self.p, r: self.r })
    }
}

/// `ū = (ū′, ū_n)` on the tangential torus.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileField {
    pub u: TangentialField,
}

/// Per-iteration differences of the limit-system Picard loop.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub differences: Vec<f64>,
    pub norm: f64,
    pub pde_residual: f64,
    pub divergence_residual: f64,
}

fn require_n4(grid: &Grid) -> Result<()> {
    if grid.ambient_dim() != 4 {
        return Err(Error::Inadmissible(format!(
            "the limit system needs n - 1 >= 3; got n = {}",
            grid.ambient_dim()
        )));
    }
    Ok(())
}

/// Per-mode right-hand side `ĝ_k = Σ_{m<n−1} iξ_m Ĝ_{k,m}` of the limit
/// system for an `n × n` tensor `G`.
fn tangential_divergence(g: &TangentialField, idx: usize, n: usize) -> Vec<Complex64> {
    let xi = g.grid().wavevector(idx);
    (0..n)
        .map(|k| (0..n - 1).map(|m| I * xi[m] * g.coeff(k * n + m, idx)).sum())
        .collect()
}

/// `(−Δ′)^{−1} ℙ′ div′ G′` for tangential rows and `(−Δ′)^{−1} div′ G_n`
/// for the normal row.
pub fn limit_linear(g: &TangentialField) -> Result<TangentialField> {
    let grid = *g.grid();
    let n = grid.ambient_dim();
    if g.components() != n * n {
        return Err(Error::ComponentMismatch { expected: n * n, found: g.components() });
    }
    let d = n - 1;
    let raw = kernels::evaluate_modes(&grid, n, 1, |idx, out| {
        let xi = grid.wavevector(idx);
        let k2 = grid.kappa(idx).powi(2);
        let div = tangential_divergence(g, idx, n);
        let proj: Complex64 = (0..d).map(|l| div[l] * xi[l]).sum::<Complex64>() / k2;
        for k in 0..d {
            out[k] = (div[k] - proj * xi[k]) / k2;
        }
        out[d] = div[d] / k2;
    });
    kernels::assemble_level(grid, raw)
}

/// `Φ[v] = limit_linear(F̄ − v⊗v)`.
pub fn limit_map(v: &TangentialField, fbar: &TangentialField) -> Result<TangentialField> {
    let vv = spectral::outer_product(v, v)?;
    limit_linear(&fbar.axpy(-1.0, &vv)?)
}

/// Relative spectral residual of the limit system:
/// `κ²û′ + ℙ′ div′(ū′⊗ū′ − F̄′)` and `κ²û_n + div′(ū_n ū′ − F̄_n)`, measured
/// against `max(‖κ²û‖, ‖div′F̄‖)`; and `‖ξ′·û′‖/‖κû′‖`.
pub fn limit_residuals(u: &TangentialField, fbar: &TangentialField) -> Result<(f64, f64)> {
    let grid = *u.grid();
    let n = grid.ambient_dim();
    let d = n - 1;
    let uu = spectral::outer_product(u, u)?;
    let g = uu.axpy(-1.0, fbar)?;
    let (mut res, mut scale, mut div, mut div_scale) = (0.0, 0.0, 0.0, 0.0);
    for idx in 0..grid.modes() {
        if !grid.is_active(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        let k2 = grid.kappa(idx).powi(2);
        let dg = tangential_divergence(&g, idx, n);
        let df = tangential_divergence(fbar, idx, n);
        let proj: Complex64 = (0..d).map(|l| dg[l] * xi[l]).sum::<Complex64>() / k2;
        for k in 0..n {
            let uk = u.coeff(k, idx);
            let nl = if k < d { dg[k] - proj * xi[k] } else { dg[k] };
            res += (uk * k2 + nl).norm_sqr();
            scale += f64::max((uk * k2).norm_sqr(), df[k].norm_sqr());
        }
        let dv: Complex64 = (0..d).map(|l| u.coeff(l, idx) * xi[l]).sum();
        div += dv.norm_sqr();
        div_scale += k2 * (0..d).map(|l| u.coeff(l, idx).norm_sqr()).sum::<f64>();
    }
    let rel = |a: f64, b: f64| if b == 0.0 { a.sqrt() } else { (a / b).sqrt() };
    Ok((rel(res, scale), rel(div, div_scale)))
}

/// Picard iteration for the limit system from `ū⁽⁰⁾ = Φ[0]`.
pub fn limit_system_solve(fbar: &TangentialField, cfg: &LimitConfig) -> Result<(ProfileField, LimitReport)> {
    require_n4(fbar.grid())?;
    let n = fbar.grid().ambient_dim();
    let zero = TangentialField::zeros(*fbar.grid(), n);
    let mut u = limit_map(&zero, fbar)?;
    let mut differences = Vec::new();
    loop {
        let next = limit_map(&u, fbar)?;
        let diff = cfg.norm(&next.axpy(-1.0, &u)?);
        if !diff.is_finite() {
            return Err(Error::InfiniteNorm("limit-system iterate".into()));
        }
        differences.push(diff);
        u = next;
        if diff <= cfg.tol {
            break;
        }
        if differences.len() >= cfg.max_iter {
            let k = differences.len();
            let ratios = differences.windows(2).map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] }).collect();
            return Err(Error::NotConverged { iterations: k, ratios });
        }
    }
    let (pde_residual, divergence_residual) = limit_residuals(&u, fbar)?;
    let norm = cfg.norm(&u);
    Ok((ProfileField { u }, LimitReport { differences, norm, pde_residual, divergence_residual }))
}

/// Limit-system counterpart of `Ĉ₀`: `2 · max` of the linear ratio
/// `‖Φ_lin F̄‖/‖F̄‖` and the bilinear ratio over seeded trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileCalibration {
    pub c1: f64,
    pub delta1: f64,
    pub epsilon1: f64,
}

/// Calibrate `δ̂₁ ≤ δ̂₀` and `ε̂₁ ≤ ε̂₀`.
pub fn calibrate_profile(grid: Grid, cfg: &LimitConfig, trials: usize, seed: u64, delta0: f64, epsilon0: f64) -> Result<ProfileCalibration> {
    require_n4(&grid)?;
    let n = grid.ambient_dim();
    let kmax = (grid.points() / 4) as i64;
    let mut worst: f64 = 1.0;
    for t in 0..trials as u64 {
        let mut rng = crate::random::rng(seed.wrapping_add(t));
        let f = crate::random::band_limited(grid, n * n, kmax, 1.0, &mut rng);
        let u = limit_linear(&f)?;
        let v = limit_linear(&crate::random::band_limited(grid, n * n, kmax, 1.0, &mut rng))?;
        let lin = cfg.norm(&u) / cfg.force_norm(&f);
        let bil = cfg.norm(&limit_linear(&spectral::outer_product(&u, &v)?)?) / (cfg.norm(&u) * cfg.norm(&v));
        for x in [lin, bil] {
            if !x.is_finite() {
                return Err(Error::InfiniteNorm("profile calibration ratio".into()));
            }
            worst = worst.max(x);
        }
    }
    let c1 = fixed_point::CALIBRATION_SAFETY * worst;
    Ok(ProfileCalibration { c1, delta1: delta0.min(1.0 / (12.0 * c1 * c1)), epsilon1: epsilon0.min(1.0 / (4.0 * c1)) })
}

/// `‖u − ū‖_{L̃^∞(R,∞; Ḃ^{d/p−1}_{p,r})}`.
pub fn profile_distance(u: &HalfSpaceField, profile: &ProfileField, r_height: f64, p: f64, r: f64) -> Result<f64> {
    if u.tail().is_none() {
        return Err(Error::InvalidArgument("profile distance needs a field with tail".into()));
    }
    let ubar = HalfSpaceField::constant(*u.grid(), &profile.u)?;
    let diff = u.axpy(-1.0, &ubar)?;
    let cl = CLIndex::new(f64::INFINITY, r_height, f64::INFINITY)?;
    Ok(besov::chemin_lerner_norm(&diff, &cl, &besov::boundary_index(u.grid().dim(), p, r)))
}

/// Outcome of `theorem2_verify`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `(R, D(R))` for `R = k X_max / 8`, `k = 0..8`.
    pub ladder: Vec<(f64, f64)>,
    pub solution: IterationReport,
    pub limit: LimitReport,
    pub profile: ProfileField,
}

impl DecayReport {
    pub fn non_increasing(&self) -> bool {
        self.ladder.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    /// `D(7X_max/8) / D(0)`, `0` when `D(0) = 0`.
    pub fn decay_ratio(&self) -> f64 {
        let first = self.ladder.first().map_or(0.0, |x| x.1);
        let last = self.ladder.last().map_or(0.0, |x| x.1);
        if first == 0.0 {
            0.0
        } else {
            last / first
        }
    }
}

/// Solve the half-space problem with the `x_n`-independent force `F̄` (held
/// as slabs and tail), solve the limit system, and tabulate `D(R)`.
pub fn theorem2_verify(a: &TangentialField, fbar: &TangentialField, cfg: &SolverConfig) -> Result<DecayReport> {
    require_n4(&cfg.grid)?;
    if cfg.q.is_finite() {
        return Err(Error::Inadmissible("the profile setting needs q = ∞".into()));
    }
    let grid = cfg.grid;
    let force = HalfSpaceField::constant(grid, &fbar.with_grid(grid))?;
    let lcfg = LimitConfig::from_solver(cfg);
    let (profile, limit) = limit_system_solve(fbar, &lcfg)?;
    let (u, solution) = fixed_point::picard_solve(a, &force, cfg, None)?;
    let x = grid.height();
    let ladder = (0..8)
        .map(|k| {
            let r_h = k as f64 * x / 8.0;
            Ok((r_h, profile_distance(&u, &profile, r_h, cfg.p, cfg.r)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayReport { ladder, solution, limit, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(3, 8, 2.0 * PI, 8, 4.0).unwrap()
    }

    fn lcfg() -> LimitConfig {
        LimitConfig { p: 2.0, r: 2.0, tol: 1e-12, max_iter: 100 }
    }

    #[test]
    fn rejects_n3() {
        let g = Grid::new(2, 8, 2.0 * PI, 4, 2.0).unwrap();
        assert!(matches!(limit_system_solve(&TangentialField::zeros(g, 9), &lcfg()), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn small_force_solves_limit_system() {
        let g = grid();
        let f = random::band_limited(g, 16, 2, 1.0, &mut random::rng(1));
        let f = f.scaled(0.05 / lcfg().force_norm(&f));
        let (u, rep) = limit_system_solve(&f, &lcfg()).unwrap();
        assert!(!u.u.is_zero());
        assert!(rep.pde_residual < 1e-9, "{}", rep.pde_residual);
        assert!(rep.divergence_residual < 1e-12);
    }

    #[test]
    fn distance_ignores_slabs_below_r() {
        let g = grid();
        let ubar = random::band_limited(g, 4, 2, 1.0, &mut random::rng(2));
        let prof = ProfileField { u: ubar.clone() };
        let bump = random::band_limited(g, 4, 2, 1.0, &mut random::rng(3));
        let u = HalfSpaceField::constant(g, &ubar).unwrap();
        assert_eq!(profile_distance(&u, &prof, 0.0, 2.0, 2.0).unwrap(), 0.0);
        let slabs: Vec<_> = (0..g.slabs()).map(|m| if m == 0 { &ubar + &bump } else { ubar.clone() }).collect();
        let u = HalfSpaceField::from_slabs(g, slabs, Some(ubar.clone())).unwrap();
        assert!(profile_distance(&u, &prof, 0.0, 2.0, 2.0).unwrap() > 0.0);
        assert_eq!(profile_distance(&u, &prof, g.slab_width(), 2.0, 2.0).unwrap(), 0.0);
    }
}
