use std::path::Path;

use halfspace_ns::besov;
use halfspace_ns::fixed_point::{self, Calibration};
use halfspace_ns::io;
use halfspace_ns::kernels::{self, KernelId, Sign, SignedKernel};
use halfspace_ns::presets::{self, PresetData, PresetSpec};
use halfspace_ns::profile::{self, LimitConfig};
use halfspace_ns::spectral;
use halfspace_ns::stokes::{self, BoundaryVariant};
use halfspace_ns::{random, Grid, HalfSpaceField, RunConfig, SolverConfig, TangentialField};
use rand::Rng;

use crate::report::{Cell, Summary, Table};
use crate::{Command, Failure};

type Outcome = Result<(), Failure>;

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Outcome {
    match cmd {
        Command::Solve => solve(cfg),
        Command::Linear => linear(cfg),
        Command::Besov => besov_norms(cfg),
        Command::KernelsCheck => kernels_check(cfg),
        Command::Asymptotics => asymptotics(cfg),
        Command::Verify => verify(cfg),
    }
}

fn solver(cfg: &RunConfig) -> Result<SolverConfig, Failure> {
    let mut s = cfg.solver_config()?;
    if let Some(path) = &cfg.calibration {
        let cal = Calibration::from_kv(&read(path)?)?;
        if !cal.matches(&s) {
            return Err(Failure::Data("calibration".into(), format!("{} was made for another grid or exponents", path.display())));
        }
        s.calibration = Some(cal);
    }
    Ok(s)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data("io".into(), format!("{}: {e}", path.display())))
}

/// Preset data, with any field files taking the place of its parts. The
/// radius is `δ̂₀` when a calibration is loaded.
fn data(cfg: &RunConfig, s: &SolverConfig, radius: Option<f64>) -> Result<PresetData, Failure> {
    let n = s.grid.ambient_dim();
    let radius = radius.or_else(|| s.calibration.as_ref().map(|c| c.delta0));
    let mut spec = PresetSpec::new(&cfg.preset, cfg.amplitude).with_seed(cfg.seed);
    spec.radius = radius;
    let mut d = if cfg.boundary.is_some() || cfg.force.is_some() {
        PresetData { boundary: TangentialField::zeros(s.grid, n), force: HalfSpaceField::zeros(s.grid, n * n), fbar: None }
    } else {
        presets::preset(&spec, s)?
    };
    if let Some(p) = &cfg.boundary {
        d.boundary = io::load_boundary(p, &s.grid)?;
    }
    if let Some(p) = &cfg.force {
        d.force = io::load_field(p, &s.grid)?;
        d.fbar = None;
    }
    for (what, found, expected) in [("boundary", d.boundary.components(), n), ("force", d.force.components(), n * n)] {
        if found != expected {
            return Err(Failure::Data("field-file".into(), format!("{what} has {found} components, expected {expected}")));
        }
    }
    Ok(d)
}

fn put_grid(sum: &mut Summary, cfg: &RunConfig) {
    sum.put("n", cfg.n);
    sum.put("points", cfg.points);
    sum.put("slabs", cfg.slabs);
    sum.put("period", cfg.period);
    sum.put("height", cfg.height);
    sum.put("p", cfg.p);
    sum.put("q", cfg.q);
    sum.put("r", cfg.r);
    sum.put("seed", cfg.seed as usize);
}

/// Record a gate in the summary; the first failure is returned at the end.
struct Gates {
    first: Option<Failure>,
}

impl Gates {
    fn new() -> Self {
        Self { first: None }
    }

    fn check(&mut self, sum: &mut Summary, name: &str, value: f64, bound: f64) {
        let pass = value <= bound;
        sum.put(&format!("gate.{name}"), if pass { "pass" } else { "fail" });
        if !pass && self.first.is_none() {
            self.first = Some(Failure::gate(name, format!("{name} = {} exceeds {}", crate::report::real(value), crate::report::real(bound))));
        }
    }

    fn finish(self) -> Outcome {
        self.first.map_or(Ok(()), Err)
    }
}

fn solve(cfg: &RunConfig) -> Outcome {
    let s = solver(cfg)?;
    let d = data(cfg, &s, None)?;
    let (u, rep) = fixed_point::picard_solve(&d.boundary, &d.force, &s, None)?;
    io::store_field(&cfg.out.join("solution.hsf"), &u)?;
    let mut t = Table::new(&["iteration", "norm", "difference", "ratio"]);
    for r in &rep.records {
        t.push(vec![r.iteration.into(), r.norm.into(), r.difference.into(), r.ratio.into()]);
    }
    t.write(&cfg.out, "iterations", cfg.format)?;
    let mut sum = Summary::default();
    put_grid(&mut sum, cfg);
    sum.put("preset", cfg.preset.as_str());
    sum.put("data_norm", s.data_norm(&d.boundary, &d.force));
    if let Some(c) = &s.calibration {
        sum.put("c0", c.c0);
        sum.put("delta0", c.delta0);
        sum.put("epsilon0", c.epsilon0);
    }
    let dg = &rep.diagnostics;
    sum.put("iterations", rep.iterations());
    sum.put("final_difference", rep.final_difference());
    sum.put("fixed_point_residual", dg.fixed_point);
    sum.put("divergence_residual", dg.divergence);
    sum.put("trace_residual", dg.trace);
    sum.put("solution_norm", dg.solution_norm);
    sum.put("linf_norm", dg.linf_norm);
    let mut gates = Gates::new();
    gates.check(&mut sum, "fixed-point", dg.fixed_point, 10.0 * s.tol);
    gates.check(&mut sum, "divergence", dg.divergence, 1e-9);
    gates.check(&mut sum, "trace", dg.trace, 1e-9);
    if let Some(c) = &s.calibration {
        gates.check(&mut sum, "epsilon0", dg.solution_norm, c.epsilon0);
    }
    sum.write(&cfg.out, "summary")?;
    gates.finish()
}

fn linear(cfg: &RunConfig) -> Outcome {
    let s = solver(cfg)?;
    let d = data(cfg, &s, None)?;
    let sol = stokes::linear_solve(&d.boundary, d.force)?;
    let (tr, dv, ev) = (sol.trace_residual(s.p, s.r)?, sol.divergence_residual()?, sol.evolution_residual()?);
    io::store_field(&cfg.out.join("linear.hsf"), &sol.u)?;
    let mut sum = Summary::default();
    put_grid(&mut sum, cfg);
    sum.put("preset", cfg.preset.as_str());
    sum.put("solution_norm", s.solution_norm(&sol.u));
    sum.put("trace_residual", tr);
    sum.put("divergence_residual", dv);
    sum.put("evolution_residual", ev);
    let mut gates = Gates::new();
    gates.check(&mut sum, "trace", tr, 1e-10);
    gates.check(&mut sum, "divergence", dv, 1e-10);
    gates.check(&mut sum, "evolution", ev, 1e-10);
    sum.write(&cfg.out, "summary")?;
    gates.finish()
}

fn besov_norms(cfg: &RunConfig) -> Outcome {
    let s = solver(cfg)?;
    let d = data(cfg, &s, None)?;
    let dim = s.grid.dim();
    let idx = besov::boundary_index(dim, s.p, s.r);
    let mut t = Table::new(&["field", "j", "block_lp", "weighted"]);
    for (j, b) in s.grid.dyadic_range().iter().zip(besov::block_norms(&d.boundary, s.p)) {
        t.push(vec!["boundary".into(), j.into(), b.into(), (2f64.powf(idx.s * j as f64) * b).into()]);
    }
    t.write(&cfg.out, "besov", cfg.format)?;
    let mut sum = Summary::default();
    put_grid(&mut sum, cfg);
    sum.put("preset", cfg.preset.as_str());
    sum.put("boundary_s", idx.s);
    sum.put("boundary_norm", s.boundary_norm(&d.boundary));
    sum.put("force_norm", s.force_norm(&d.force));
    sum.put("data_norm", s.data_norm(&d.boundary, &d.force));
    Ok(sum.write(&cfg.out, "summary")?)
}

/// `(max oracle error, max trace residual)` with per-sample rows.
fn kernel_battery(grid: Grid, seed: u64, samples: usize, fields: u64, t: &mut Table) -> Result<(f64, f64), Failure> {
    let mut rng = random::rng(seed);
    let mut oracle: f64 = 0.0;
    for j in 1..=5 {
        for _ in 0..samples {
            let kappa = rng.gen_range(0.1..=10.0);
            let z = rng.gen_range(-5.0..=5.0);
            let v = kernels::inverse_ft_oracle(j, kappa, z)?;
            let e = v.relative_error();
            oracle = oracle.max(e);
            t.push(vec![format!("inverse-ft-{j}").into(), kappa.into(), z.into(), v.quadrature.into(), v.closed_form.into(), e.into()]);
        }
    }
    let n = grid.ambient_dim();
    let kmax = (grid.points() / 4) as i64;
    let mut trace: f64 = 0.0;
    for k in 0..fields {
        let f = random::separable(grid, n, kmax, 2, &mut random::rng(seed.wrapping_add(1 + k)))?;
        let scale = kernels::trace_l1_plus(&f)?.max_abs_coeff();
        let at0 = |id, sign| kernels::l_operator(SignedKernel::new(id, sign), &f, 0.0);
        let l4 = at0(KernelId::K4, Sign::Plus)?.max_abs_coeff() / scale;
        let l5 = at0(KernelId::K5, Sign::Minus)?.max_abs_coeff() / scale;
        let l21 = (&at0(KernelId::K2, Sign::Minus)? + &at0(KernelId::K1, Sign::Plus)?).max_abs_coeff() / scale;
        for (name, v) in [("trace-L4+", l4), ("trace-L5-", l5), ("trace-L2-+L1+", l21)] {
            trace = trace.max(v);
            t.push(vec![name.into(), Cell::Text(String::new()), (k as usize).into(), Cell::Text(String::new()), Cell::Text(String::new()), v.into()]);
        }
    }
    Ok((oracle, trace))
}

fn kernels_check(cfg: &RunConfig) -> Outcome {
    let s = solver(cfg)?;
    let mut t = Table::new(&["check", "kappa", "z", "quadrature", "closed_form", "error"]);
    let (oracle, trace) = kernel_battery(s.grid, cfg.seed, 50, 10, &mut t)?;
    t.write(&cfg.out, "kernels", cfg.format)?;
    let mut sum = Summary::default();
    put_grid(&mut sum, cfg);
    sum.put("oracle_max_error", oracle);
    sum.put("trace_max_residual", trace);
    let mut gates = Gates::new();
    gates.check(&mut sum, "inverse-ft", oracle, 1e-6);
    gates.check(&mut sum, "trace-identities", trace, 1e-12);
    sum.write(&cfg.out, "summary")?;
    gates.finish()
}

fn asymptotics(cfg: &RunConfig) -> Outcome {
    let s = solver(cfg)?;
    let radius = match &s.calibration {
        Some(c) => {
            let lcfg = LimitConfig::from_solver(&s);
            Some(profile::calibrate_profile(s.grid, &lcfg, c.trials, c.seed, c.delta0, c.epsilon0)?.delta1)
        }
        None => None,
    };
    let d = data(cfg, &s, radius)?;
    let fbar = d
        .fbar
        .ok_or_else(|| Failure::Data("argument".into(), format!("preset `{}` has no x_n-independent force", cfg.preset)))?;
    let rep = profile::theorem2_verify(&d.boundary, &fbar, &s)?;
    let mut t = Table::new(&["R", "D"]);
    for (r, dist) in &rep.ladder {
        t.push(vec![(*r).into(), (*dist).into()]);
    }
    t.write(&cfg.out, "ladder", cfg.format)?;
    let mut sum = Summary::default();
    put_grid(&mut sum, cfg);
    sum.put("preset", cfg.preset.as_str());
    sum.put("iterations", rep.solution.iterations());
    sum.put("limit_pde_residual", rep.limit.pde_residual);
    sum.put("limit_divergence_residual", rep.limit.divergence_residual);
    sum.put("decay_ratio", rep.decay_ratio());
    sum.put("non_increasing", rep.non_increasing());
    let mut gates = Gates::new();
    gates.check(&mut sum, "ladder-monotone", if rep.non_increasing() { 0.0 } else { 1.0 }, 0.0);
    gates.check(&mut sum, "limit-residual", rep.limit.pde_residual, 1e-9);
    sum.write(&cfg.out, "summary")?;
    gates.finish()
}

fn verify(cfg: &RunConfig) -> Outcome {
    let s = solver(cfg)?;
    let g = s.grid;
    let mut rows: Vec<(&str, f64, f64, bool)> = Vec::new();
    let mut push = |name, value: f64, bound: f64, upper: bool| {
        let pass = if upper { value <= bound } else { value >= bound };
        rows.push((name, value, bound, pass));
    };

    let mut scratch = Table::new(&["check", "kappa", "z", "quadrature", "closed_form", "error"]);
    let (oracle, trace) = kernel_battery(g, cfg.seed, 10, 2, &mut scratch)?;
    push("inverse-ft", oracle, 1e-6, true);
    push("trace-identities", trace, 1e-12, true);

    let f = random::band_limited(g, 1, (g.points() / 4) as i64, 0.0, &mut random::rng(cfg.seed));
    let comp = (&spectral::poisson_apply(0.5, &spectral::poisson_apply(0.25, &f)?)? - &spectral::poisson_apply(0.75, &f)?).max_abs_coeff()
        / f.max_abs_coeff();
    push("poisson-composition", comp, 1e-13, true);
    let mut rate = f64::INFINITY;
    for p in [1.0, 2.0, f64::INFINITY] {
        for j in g.dyadic_range().iter() {
            let heights: Vec<f64> = (0..=g.slabs()).map(|m| m as f64 * g.slab_width()).collect();
            rate = rate.min(kernels::envelope_rate(&besov::semigroup_block_ratios(&f, j, p, &heights)?, j, 4.0));
        }
    }
    push("poisson-envelope-rate", rate, 0.4, false);

    let (a, force) = stokes::random_data(g, cfg.seed, 1.0)?;
    let sol = stokes::linear_solve(&a, force)?;
    push("linear-trace", sol.trace_residual(s.p, s.r)?, 1e-10, true);
    push("linear-divergence", sol.divergence_residual()?, 1e-10, true);
    push("linear-evolution", sol.evolution_residual()?, 1e-10, true);
    let v = stokes::boundary_at(&a, 0.5, 0, BoundaryVariant::Amended)?;
    let dv = stokes::boundary_at(&a, 0.5, 1, BoundaryVariant::Amended)?;
    push("boundary-divergence", stokes::divergence_ratio(&v, &dv), 1e-12, true);
    let mr = stokes::max_reg_ratio(&sol, s.q, besov::q_star(s.q), s.p, s.r)?;
    push("max-reg-finite", if mr.is_finite() { 0.0 } else { 1.0 }, 0.0, true);

    let bil = besov::bilinear_estimate_check(3, g, s.p, s.q, s.r, cfg.seed)?;
    push("bilinear-finite", if bil.all_finite() { 0.0 } else { 1.0 }, 0.0, true);
    let (x, y) = (f.clone(), random::band_limited(g, 1, (g.points() / 4) as i64, 0.0, &mut random::rng(cfg.seed + 1)));
    let prod = spectral::product(&x, &y)?;
    push("bony-identity", (&spectral::bony_decompose(&x, &y)?.sum() - &prod).max_abs_coeff() / prod.max_abs_coeff(), 1e-12, true);

    let d = data(cfg, &s, None)?;
    let (_, rep) = fixed_point::picard_solve(&d.boundary, &d.force, &s, None)?;
    push("picard-fixed-point", rep.diagnostics.fixed_point, 10.0 * s.tol, true);
    push("picard-divergence", rep.diagnostics.divergence, 1e-9, true);
    push("picard-trace", rep.diagnostics.trace, 1e-9, true);

    let mut t = Table::new(&["check", "value", "bound", "status"]);
    for (name, value, bound, pass) in &rows {
        t.push(vec![(*name).into(), (*value).into(), (*bound).into(), (*pass).into()]);
    }
    t.write(&cfg.out, "verify", cfg.format)?;
    let passed = rows.iter().filter(|r| r.3).count();
    let mut sum = Summary::default();
    put_grid(&mut sum, cfg);
    sum.put("checks", rows.len());
    sum.put("passed", passed);
    sum.write(&cfg.out, "summary")?;
    match rows.iter().find(|r| !r.3) {
        None => Ok(()),
        Some((name, value, bound, _)) => Err(Failure::gate(name, format!("{name} = {} against bound {}", crate::report::real(*value), crate::report::real(*bound)))),
    }
}
