//! Picard iteration for `u = 𝒰^boundary[a] + 𝒰^force[F − u⊗u]`.

use std::fmt::Write as _;
use std::time::Instant;

use crate::besov::{self, BesovIndex, CLIndex};
use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::grid::Grid;
use crate::spectral;
use crate::stokes::{self, LinearSolution};

/// Solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub p: f64,
    pub r: f64,
    pub q: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub enforce_smallness: bool,
    pub calibration: Option<Calibration>,
}

impl SolverConfig {
    pub fn new(grid: Grid, p: f64, q: f64, r: f64) -> Result<Self> {
        besov::check_exponents(grid.ambient_dim(), p, q, r)?;
        Ok(Self { grid, p, r, q, tol: 1e-10, max_iter: 100, enforce_smallness: false, calibration: None })
    }

    pub fn validate(&self) -> Result<()> {
        besov::check_exponents(self.grid.ambient_dim(), self.p, self.q, self.r)?;
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument(format!("tol = {} and max_iter = {} must be positive", self.tol, self.max_iter)));
        }
        Ok(())
    }

    fn d(&self) -> usize {
        self.grid.dim()
    }

    /// `L̃^{q*}(Ḃ^{d/p+1/q*−1}_{p,r})`, the contraction norm.
    pub fn solution_norm(&self, u: &HalfSpaceField) -> f64 {
        let (cl, idx) = besov::solution_index(self.d(), self.p, self.q, self.r);
        besov::chemin_lerner_norm(u, &cl, &idx)
    }

    /// `L̃^∞(Ḃ^{d/p−1}_{p,r})`.
    pub fn linf_norm(&self, u: &HalfSpaceField) -> f64 {
        let idx = besov::boundary_index(self.d(), self.p, self.r);
        besov::chemin_lerner_norm(u, &CLIndex { q: f64::INFINITY, a: 0.0, b: f64::INFINITY }, &idx)
    }

    pub fn boundary_norm(&self, a: &TangentialField) -> f64 {
        besov::besov_norm(a, &besov::boundary_index(self.d(), self.p, self.r))
    }

    pub fn force_norm(&self, f: &HalfSpaceField) -> f64 {
        let (cl, idx) = besov::force_index(self.d(), self.p, self.q, self.r);
        besov::chemin_lerner_norm(f, &cl, &idx)
    }

    /// `‖a‖ + ‖F‖` as in the smallness condition.
    pub fn data_norm(&self, a: &TangentialField, f: &HalfSpaceField) -> f64 {
        self.boundary_norm(a) + self.force_norm(f)
    }

    fn product_norm(&self, f: &HalfSpaceField) -> f64 {
        let (cl, idx) = besov::product_index(self.d(), self.p, self.q, self.r);
        besov::chemin_lerner_norm(f, &cl, &idx)
    }
}

/// Empirical stand-in for the constant `C₀` of the existence proof and the
/// derived radii `δ₀ = 1/(12C₀²)`, `ε₀ = 1/(4C₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub points: usize,
    pub slabs: usize,
    pub period: f64,
    pub height: f64,
    pub trials: usize,
    pub seed: u64,
    pub boundary_max: f64,
    pub force_max: f64,
    pub bilinear_max: f64,
    pub c0: f64,
    pub delta0: f64,
    pub epsilon0: f64,
}

pub const CALIBRATION_SAFETY: f64 = 2.0;

impl Calibration {
    fn from_maxima(cfg: &SolverConfig, trials: usize, seed: u64, maxima: [f64; 3]) -> Self {
        let g = cfg.grid;
        let c0 = CALIBRATION_SAFETY * maxima.iter().copied().fold(1.0, f64::max);
        Self {
            n: g.ambient_dim(),
            p: cfg.p,
            q: cfg.q,
            r: cfg.r,
            points: g.points(),
            slabs: g.slabs(),
            period: g.period(),
            height: g.height(),
            trials,
            seed,
            boundary_max: maxima[0],
            force_max: maxima[1],
            bilinear_max: maxima[2],
            c0,
            delta0: 1.0 / (12.0 * c0 * c0),
            epsilon0: 1.0 / (4.0 * c0),
        }
    }

    /// Whether this calibration was made for `cfg`'s grid and exponents.
    pub fn matches(&self, cfg: &SolverConfig) -> bool {
        let g = cfg.grid;
        self.n == g.ambient_dim()
            && self.points == g.points()
            && self.slabs == g.slabs()
            && self.period == g.period()
            && self.height == g.height()
            && self.p == cfg.p
            && self.q == cfg.q
            && self.r == cfg.r
    }

    /// Flat `key=value` text.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let fields: [(&str, String); 16] = [
            ("n", self.n.to_string()),
            ("p", fmt_exp(self.p)),
            ("q", fmt_exp(self.q)),
            ("r", fmt_exp(self.r)),
            ("points", self.points.to_string()),
            ("slabs", self.slabs.to_string()),
            ("period", format!("{:e}", self.period)),
            ("height", format!("{:e}", self.height)),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("boundary_max", format!("{:e}", self.boundary_max)),
            ("force_max", format!("{:e}", self.force_max)),
            ("bilinear_max", format!("{:e}", self.bilinear_max)),
            ("c0", format!("{:e}", self.c0)),
            ("delta0", format!("{:e}", self.delta0)),
            ("epsilon0", format!("{:e}", self.epsilon0)),
        ];
        for (k, v) in fields {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let map = crate::config::parse_kv(text)?;
        let get = |k: &str| -> Result<&(usize, String)> {
            map.get(k).ok_or_else(|| Error::Config { line: 0, message: format!("missing key `{k}`") })
        };
        let num = |k: &str| -> Result<f64> {
            let (line, v) = get(k)?;
            crate::config::parse_exponent(v).map_err(|m| Error::Config { line: *line, message: format!("{k}: {m}") })
        };
        let int = |k: &str| -> Result<u64> {
            let (line, v) = get(k)?;
            v.parse().map_err(|_| Error::Config { line: *line, message: format!("{k}: `{v}` is not an integer") })
        };
        Ok(Self {
            n: int("n")? as usize,
            p: num("p")?,
            q: num("q")?,
            r: num("r")?,
            points: int("points")? as usize,
            slabs: int("slabs")? as usize,
            period: num("period")?,
            height: num("height")?,
            trials: int("trials")? as usize,
            seed: int("seed")?,
            boundary_max: num("boundary_max")?,
            force_max: num("force_max")?,
            bilinear_max: num("bilinear_max")?,
            c0: num("c0")?,
            delta0: num("delta0")?,
            epsilon0: num("epsilon0")?,
        })
    }
}

fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// The three operator-norm ratios of the existence proof for one seeded
/// trial: boundary, force and bilinear.
pub fn calibration_ratios(cfg: &SolverConfig, seed: u64) -> Result<[f64; 3]> {
    let (a, f) = stokes::random_data(cfg.grid, seed, 1.0)?;
    let ub = stokes::boundary_operator(&a, &cfg.grid)?;
    let uf = stokes::force_operator(f.clone())?;
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    let boundary = ratio(cfg.solution_norm(&ub), cfg.boundary_norm(&a));
    let force = ratio(cfg.solution_norm(&uf), cfg.force_norm(&f));
    let product = tensor_product(&ub, &uf)?;
    let bilinear = ratio(
        cfg.solution_norm(&stokes::force_operator(product)?),
        cfg.solution_norm(&ub) * cfg.solution_norm(&uf),
    );
    Ok([boundary, force, bilinear])
}

/// `Ĉ₀ := 2 · max` over `trials` seeded ratio triples (and at least `2`).
pub fn calibrate(cfg: &SolverConfig, trials: usize, seed: u64) -> Result<Calibration> {
    cfg.validate()?;
    let mut maxima = [0.0f64; 3];
    for t in 0..trials as u64 {
        let r = calibration_ratios(cfg, seed.wrapping_add(t))?;
        for (m, v) in maxima.iter_mut().zip(r) {
            if !v.is_finite() {
                return Err(Error::InfiniteNorm("calibration ratio".into()));
            }
            *m = m.max(v);
        }
    }
    Ok(Calibration::from_maxima(cfg, trials, seed, maxima))
}

/// `(u⊗v)_{kℓ} = u_k v_ℓ`, slab-wise and dealiased.
pub fn tensor_product(u: &HalfSpaceField, v: &HalfSpaceField) -> Result<HalfSpaceField> {
    spectral::outer_product_field(u, v)
}

/// `𝒮[v]` as a full linear solution (for residual access).
pub fn nonlinear_solution(v: &HalfSpaceField, a: &TangentialField, f: &HalfSpaceField) -> Result<LinearSolution> {
    let n = f.grid().ambient_dim();
    if v.components() != n {
        return Err(Error::ComponentMismatch { expected: n, found: v.components() });
    }
    let vv = tensor_product(v, v)?;
    stokes::linear_solve(a, f.axpy(-1.0, &vv)?)
}

/// `𝒮[v] = 𝒰^boundary[a] + 𝒰^force[F − v⊗v]`.
pub fn nonlinear_map(v: &HalfSpaceField, a: &TangentialField, f: &HalfSpaceField) -> Result<HalfSpaceField> {
    Ok(nonlinear_solution(v, a, f)?.into_field())
}

/// One Picard step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `‖u^{(k)}‖` in the contraction norm.
    pub norm: f64,
    /// `‖u^{(k)} − u^{(k−1)}‖`.
    pub difference: f64,
    /// `difference_k / difference_{k−1}`.
    pub ratio: f64,
    pub seconds: f64,
}

/// Outcome of `picard_solve`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub records: Vec<IterationRecord>,
    pub diagnostics: Diagnostics,
}

impl IterationReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ratio).collect()
    }

    pub fn final_difference(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.difference)
    }
}

/// Residuals of a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `‖u − 𝒮[u]‖` in the contraction norm.
    pub fixed_point: f64,
    /// Relative divergence residual of `𝒮[u]`.
    pub divergence: f64,
    /// Relative trace residual of `𝒮[u]` in `Ḃ^{d/p−1}_{p,r}`.
    pub trace: f64,
    pub solution_norm: f64,
    pub linf_norm: f64,
}

/// Residuals of `u` against the data.
pub fn residual_report(u: &HalfSpaceField, a: &TangentialField, f: &HalfSpaceField, cfg: &SolverConfig) -> Result<Diagnostics> {
    let s = nonlinear_solution(u, a, f)?;
    diagnostics(u, &s, cfg)
}

fn diagnostics(u: &HalfSpaceField, s: &LinearSolution, cfg: &SolverConfig) -> Result<Diagnostics> {
    Ok(Diagnostics {
        fixed_point: cfg.solution_norm(&u.axpy(-1.0, &s.u)?),
        divergence: s.divergence_residual()?,
        trace: s.trace_residual(cfg.p, cfg.r)?,
        solution_norm: cfg.solution_norm(u),
        linf_norm: cfg.linf_norm(u),
    })
}

/// Check the `δ̂₀` gate when requested.
pub fn smallness_gate(a: &TangentialField, f: &HalfSpaceField, cfg: &SolverConfig) -> Result<()> {
    if !cfg.enforce_smallness {
        return Ok(());
    }
    let cal = cfg
        .calibration
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("smallness enforcement needs a calibration".into()))?;
    if !cal.matches(cfg) {
        return Err(Error::InvalidArgument("calibration was made for a different grid or exponents".into()));
    }
    let norm = cfg.data_norm(a, f);
    if !(norm <= cal.delta0) {
        return Err(Error::Smallness { gate: "delta0", norm, bound: cal.delta0 });
    }
    Ok(())
}

/// Picard iteration `u^{(k+1)} = 𝒮[u^{(k)}]` from `u^{(0)} = 𝒮[initial]`
/// (`initial = 0` by default), stopped when successive differences fall to
/// `cfg.tol` in the contraction norm.
pub fn picard_solve(
    a: &TangentialField,
    f: &HalfSpaceField,
    cfg: &SolverConfig,
    initial: Option<&HalfSpaceField>,
) -> Result<(HalfSpaceField, IterationReport)> {
    cfg.validate()?;
    smallness_gate(a, f, cfg)?;
    let n = cfg.grid.ambient_dim();
    let zero = HalfSpaceField::zeros(*f.grid(), n);
    let start = initial.unwrap_or(&zero);
    let mut u = nonlinear_map(start, a, f)?;
    let mut prev_diff = cfg.solution_norm(&u.axpy(-1.0, start)?);
    let mut records: Vec<IterationRecord> = Vec::new();
    loop {
        let clock = Instant::now();
        let s = nonlinear_solution(&u, a, f)?;
        let diff = cfg.solution_norm(&s.u.axpy(-1.0, &u)?);
        let norm = cfg.solution_norm(&s.u);
        if !norm.is_finite() || !diff.is_finite() {
            return Err(Error::InfiniteNorm(format!("iterate {} has norm {norm}, difference {diff}", records.len() + 1)));
        }
        let ratio = if prev_diff == 0.0 { 0.0 } else { diff / prev_diff };
        records.push(IterationRecord { iteration: records.len() + 1, norm, difference: diff, ratio, seconds: clock.elapsed().as_secs_f64() });
        prev_diff = diff;
        let next = s.u.clone();
        if diff <= cfg.tol {
            let diagnostics = residual_report(&next, a, f, cfg)?;
            return Ok((next, IterationReport { records, diagnostics }));
        }
        if records.len() >= cfg.max_iter {
            let ratios = records.iter().rev().take(8).rev().map(|r| r.ratio).collect();
            return Err(Error::NotConverged { iterations: records.len(), ratios });
        }
        u = next;
    }
}

/// `L̃^{q₁}(Ḃ^{d/p+1/q₁−1})` index on `(0, ∞)`.
pub fn regularity_index(d: usize, p: f64, q1: f64, r: f64) -> Result<(CLIndex, BesovIndex)> {
    Ok((CLIndex::half_line(q1)?, BesovIndex::new(d as f64 / p + 1.0 / q1 - 1.0, p, r)?))
}

/// Norm of `tensor_product(u, u)` in the product space, used by reports.
pub fn product_norm(u: &HalfSpaceField, cfg: &SolverConfig) -> Result<f64> {
    Ok(cfg.product_norm(&tensor_product(u, u)?))
}
