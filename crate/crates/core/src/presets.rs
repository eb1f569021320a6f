//! Analytic data presets for the solvers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::fixed_point::SolverConfig;
use crate::profile::{self, LimitConfig};
use crate::random;

pub const PRESETS: [&str; 7] = [
    "zero",
    "single-mode",
    "gaussian-bump",
    "tail-constant-force",
    "profile-consistent",
    "profile-perturbed",
    "single-block",
];

/// Preset request. With `radius = Some(δ)` the data are rescaled so that
/// `‖a‖ + ‖F‖ = amplitude · δ`; otherwise the unit shape is multiplied by
/// `amplitude`.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetSpec {
    pub name: String,
    pub amplitude: f64,
    pub radius: Option<f64>,
    pub seed: u64,
}

impl PresetSpec {
    pub fn new(name: &str, amplitude: f64) -> Self {
        Self { name: name.into(), amplitude, radius: None, seed: 0 }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Boundary data, force, and for `x_n`-independent presets the profile force.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetData {
    pub boundary: TangentialField,
    pub force: HalfSpaceField,
    pub fbar: Option<TangentialField>,
}

/// Block index used by `single-block`: the mode sits at `κ = 2^j` exactly,
/// where only `Δ_j` is nonzero.
pub const SINGLE_BLOCK_J: i32 = 0;

/// Build preset data for `cfg.grid`.
pub fn preset(spec: &PresetSpec, cfg: &SolverConfig) -> Result<PresetData> {
    let grid = cfg.grid;
    let n = grid.ambient_dim();
    let d = n - 1;
    let zero_a = TangentialField::zeros(grid, n);
    let zero_f = HalfSpaceField::zeros(grid, n * n);
    let fund = grid.fundamental();
    let data = match spec.name.as_str() {
        "zero" => PresetData { boundary: zero_a, force: zero_f, fbar: None },
        "single-mode" => {
            let k = (2.0 * fund, fund);
            let boundary = TangentialField::from_fn(grid, n, |c, x| match c {
                0 => (k.0 * x[0] + k.1 * x[1]).cos(),
                c if c == d => (k.0 * x[0] + k.1 * x[1]).sin(),
                _ => 0.0,
            })?;
            PresetData { boundary, force: zero_f, fbar: None }
        }
        "gaussian-bump" => {
            let l = grid.period();
            let sigma = l / 16.0;
            let gauss = move |x: &[f64; 3], shift: f64| {
                let mut r2 = 0.0;
                for (a, &xa) in x.iter().enumerate().take(d) {
                    let c = if a == 0 { 0.5 * l + shift } else { 0.5 * l };
                    r2 += (xa - c).powi(2);
                }
                (-0.5 * r2 / (sigma * sigma)).exp()
            };
            let boundary = TangentialField::from_fn(grid, n, |c, x| match c {
                0 => gauss(x, 0.0),
                c if c == d => gauss(x, sigma),
                _ => 0.0,
            })?;
            let profile = TangentialField::from_fn(grid, n * n, |c, x| if c == 0 || c == d * n { gauss(x, -sigma) } else { 0.0 })?;
            let centers = grid.slab_centers();
            let force = HalfSpaceField::from_slab_fn(grid, None, |m| profile.scaled(centers[m] * (-centers[m]).exp()))?;
            PresetData { boundary, force, fbar: None }
        }
        "tail-constant-force" => {
            let fbar = random::band_limited(grid, n * n, (grid.points() / 8) as i64, 1.0, &mut random::rng(spec.seed));
            let force = HalfSpaceField::constant(grid, &fbar)?;
            PresetData { boundary: zero_a, force, fbar: Some(fbar) }
        }
        "profile-consistent" | "profile-perturbed" => return profile_preset(spec, cfg),
        "single-block" => {
            let kappa = 2f64.powi(SINGLE_BLOCK_J);
            let boundary = TangentialField::from_fn(grid, n, |c, x| if c == 0 { (kappa * x[0]).cos() } else { 0.0 })?;
            PresetData { boundary, force: zero_f, fbar: None }
        }
        other => return Err(Error::InvalidArgument(format!("unknown preset `{other}`"))),
    };
    scale(data, spec, cfg)
}

fn scale(data: PresetData, spec: &PresetSpec, cfg: &SolverConfig) -> Result<PresetData> {
    let factor = match spec.radius {
        None => spec.amplitude,
        Some(radius) => {
            let norm = cfg.data_norm(&data.boundary, &data.force);
            if norm == 0.0 {
                return Ok(data);
            }
            if !norm.is_finite() {
                return Err(Error::InfiniteNorm(format!("preset `{}` has infinite data norm for q = {}", spec.name, cfg.q)));
            }
            spec.amplitude * radius / norm
        }
    };
    Ok(PresetData {
        boundary: data.boundary.scaled(factor),
        force: data.force.scaled(factor),
        fbar: data.fbar.map(|f| f.scaled(factor)),
    })
}

/// `F̄` band-limited, `ū` from the limit system and `a = ū` (consistent) or
/// `a = ū + b` with `b` supported on `κ ≥ 1` (perturbed). The force is
/// shrunk until `‖a‖ + ‖F̄‖` meets the requested size.
fn profile_preset(spec: &PresetSpec, cfg: &SolverConfig) -> Result<PresetData> {
    let grid = cfg.grid;
    let n = grid.ambient_dim();
    if n != 4 {
        return Err(Error::Inadmissible(format!("preset `{}` needs n = 4", spec.name)));
    }
    let perturbed = spec.name == "profile-perturbed";
    let mut rng = random::rng(spec.seed);
    let unit = random::band_limited(grid, n * n, (grid.points() / 8) as i64, 1.0, &mut rng);
    let bump = if perturbed {
        let raw = random::band_limited(grid, n, (grid.points() / 4) as i64, 0.0, &mut rng);
        crate::spectral::apply_radial(&raw, |k| if k >= 1.0 { 1.0 } else { 0.0 })?
    } else {
        TangentialField::zeros(grid, n)
    };
    let lcfg = LimitConfig { tol: cfg.tol * 1e-2, ..LimitConfig::from_solver(cfg) };
    let target = match spec.radius {
        Some(r) => spec.amplitude * r,
        None => spec.amplitude,
    };
    let fnorm = lcfg.force_norm(&unit);
    let bnorm = lcfg.norm(&bump);
    // split the budget: force 60%, perturbation 20%, profile the rest
    let mut fscale = 0.6 * target / fnorm;
    let bscale = if bnorm > 0.0 { 0.2 * target / bnorm } else { 0.0 };
    for _ in 0..20 {
        let fbar = unit.scaled(fscale);
        let (profile, _) = profile::limit_system_solve(&fbar, &lcfg)?;
        let boundary = profile.u.axpy(bscale, &bump)?;
        let force = HalfSpaceField::constant(grid, &fbar)?;
        let norm = cfg.data_norm(&boundary, &force);
        if norm <= target * (1.0 + 1e-12) {
            return Ok(PresetData { boundary, force, fbar: Some(fbar) });
        }
        fscale *= 0.9 * (target - bscale * bnorm) / (norm - bscale * bnorm).max(f64::MIN_POSITIVE);
    }
    Err(Error::Smallness { gate: "delta1", norm: f64::NAN, bound: target })
}

/// `‖cos(κ x_1)‖_{L^p}` over the torus of period `L` in `d` dimensions.
pub fn cosine_lp_norm(d: usize, period: f64, p: f64) -> f64 {
    let vol = period.powi(d as i32);
    if p.is_infinite() {
        return 1.0;
    }
    // (1/2π) ∫ |cos|^p = Γ((p+1)/2) / (√π Γ(p/2 + 1))
    let mean = if p == 2.0 {
        0.5
    } else if p == 1.0 {
        2.0 / PI
    } else {
        let (n, _) = crate::quadrature::integrate(|t: f64| t.cos().abs().powf(p), 0.0, 2.0 * PI, 1e-14, 1e-13, 200).unwrap_or((f64::NAN, 0.0));
        n / (2.0 * PI)
    };
    (vol * mean).powf(1.0 / p)
}
