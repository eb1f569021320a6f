//! Desk-scale acceptance battery. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::path::PathBuf;
use std::time::Instant;

use halfspace_ns::besov::{self, RatioReport};
use halfspace_ns::fixed_point::{self, Calibration, SolverConfig};
use halfspace_ns::kernels::{self, KernelId, Sign, SignedKernel};
use halfspace_ns::presets::{self, PresetSpec};
use halfspace_ns::profile::{self, LimitConfig};
use halfspace_ns::stokes::reflection::{self, ReflectionConfig};
use halfspace_ns::stokes::{self, BoundaryVariant};
use halfspace_ns::{random, spectral, Grid, Result, TangentialField};
use num_complex::Complex64;
use rand::Rng;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Frozen max ratios, seed 100, 20 trials, desk n = 3, p = r = 2.
const MAX_REG_BASELINE: [((f64, f64), f64); 4] = [
    ((1.0, 2.0), 0.2715),
    ((2.0, 2.0), 0.2799),
    ((2.0, f64::INFINITY), 0.2972),
    ((f64::INFINITY, f64::INFINITY), 0.1469),
];

/// Frozen max ratios `(n, p, q) → max`, seed 200, 100 trials, `r = 2`.
const BILINEAR_BASELINE: [((usize, f64, f64), f64); 3] = [
    ((3, 2.0, 2.0), 0.02957),
    ((3, 2.0, 1.0), 0.02957),
    ((3, 1.0, 2.0), 0.0004615),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn calibration_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("calibration").join(name)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn kernel_oracle() -> Result<Outcome> {
    let clock = Instant::now();
    let mut rng = random::rng(1);
    let mut worst: f64 = 0.0;
    for j in 1..=5 {
        for _ in 0..50 {
            let kappa = rng.gen_range(0.1..=10.0);
            let z = rng.gen_range(-5.0..=5.0);
            worst = worst.max(kernels::inverse_ft_oracle(j, kappa, z)?.relative_error());
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    outcome(worst <= 1e-6 && secs <= 10.0, format!("max rel err {worst:.2e}, {secs:.1}s"))
}

fn trace_identities() -> Result<Outcome> {
    let g = Grid::desk(3)?;
    let signed = |id, sign| SignedKernel::new(id, sign);
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let f = random::separable(g, 3, 16, 2, &mut random::rng(seed))?;
        let scale = kernels::trace_l1_plus(&f)?.max_abs_coeff();
        let l4 = kernels::l_operator(signed(KernelId::K4, Sign::Plus), &f, 0.0)?;
        let l5 = kernels::l_operator(signed(KernelId::K5, Sign::Minus), &f, 0.0)?;
        let l1 = kernels::l_operator(signed(KernelId::K1, Sign::Plus), &f, 0.0)?;
        let l2 = kernels::l_operator(signed(KernelId::K2, Sign::Minus), &f, 0.0)?;
        worst = worst
            .max(l4.max_abs_coeff() / scale)
            .max(l5.max_abs_coeff() / scale)
            .max((&l2 + &l1).max_abs_coeff() / scale);
    }
    outcome(worst <= 1e-12, format!("max rel residual {worst:.2e} over 10 fields"))
}

fn poisson_semigroup() -> Result<Outcome> {
    let g = Grid::desk(3)?;
    let mut eigen: f64 = 0.0;
    for k in [[1i64, 0], [3, -2], [7, 11], [-20, 5]] {
        let idx = g.mode_index(&k).expect("mode on grid");
        let mut f = TangentialField::zeros(g, 1);
        f.set_mode(0, idx, Complex64::new(1.0, 0.0));
        for x in [0.1, 1.0, 3.5] {
            let out = spectral::poisson_apply(x, &f)?;
            let expect = (-x * g.kappa(idx)).exp();
            eigen = eigen.max((out.coeff(0, idx) - expect).norm()).max(out.axpy(-expect, &f)?.max_abs_coeff());
        }
    }
    let f = random::band_limited(g, 1, 24, 0.0, &mut random::rng(4));
    let mut comp: f64 = 0.0;
    for (x, y) in [(0.1, 0.2), (0.5, 1.5), (2.0, 0.25)] {
        let two = spectral::poisson_apply(x, &spectral::poisson_apply(y, &f)?)?;
        let one = spectral::poisson_apply(x + y, &f)?;
        comp = comp.max((&two - &one).max_abs_coeff() / one.max_abs_coeff());
    }
    let f = random::band_limited(g, 1, 24, 0.0, &mut random::rng(5));
    let mut rate = f64::INFINITY;
    for p in [1.0, 2.0, f64::INFINITY] {
        for j in g.dyadic_range().iter() {
            let heights: Vec<f64> = (1..=40).map(|k| 0.2 * k as f64 * 2f64.powi(-j)).collect();
            let samples = besov::semigroup_block_ratios(&f, j, p, &heights)?;
            rate = rate.min(kernels::envelope_rate(&samples, j, 4.0));
        }
    }
    outcome(
        eigen <= 1e-12 && comp <= 1e-13 && rate >= 0.4,
        format!("eigen {eigen:.2e}, composition {comp:.2e}, fitted c {rate:.3} at C = 4"),
    )
}

fn linear_solver() -> Result<Outcome> {
    let clock = Instant::now();
    let g = Grid::desk(3)?;
    let (mut tr, mut dv, mut ev, mut refl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10 {
        let (a, f) = stokes::random_data(g, seed, 1.0)?;
        let sol = stokes::linear_solve(&a, f)?;
        tr = tr.max(sol.trace_residual(2.0, 2.0)?);
        dv = dv.max(sol.divergence_residual()?);
        ev = ev.max(sol.evolution_residual()?);
        let force = stokes::reflection_force(g, 2, 4, &mut random::rng(1000 + seed))?;
        let oracle = reflection::reflection_oracle(&force, ReflectionConfig::default())?;
        refl = refl.max(oracle.relative_error(&stokes::whole_space_solution(&force)?));
    }
    let secs = clock.elapsed().as_secs_f64();
    outcome(
        tr <= 1e-10 && dv <= 1e-10 && ev <= 1e-10 && refl <= 1e-6 && secs <= 60.0,
        format!("trace {tr:.2e}, divergence {dv:.2e}, evolution {ev:.2e}, reflection {refl:.2e}, {secs:.1}s"),
    )
}

/// Per-mode `|∂_x û_n + iξ′·û′|` and `κ|û|` at height `x`.
fn mode_divergence(a: &TangentialField, x: f64, variant: BoundaryVariant) -> Result<Vec<(f64, f64)>> {
    let g = *a.grid();
    let d = g.dim();
    let v = stokes::boundary_at(a, x, 0, variant)?;
    let dv = stokes::boundary_at(a, x, 1, variant)?;
    Ok((0..g.modes())
        .filter(|&idx| g.is_active(idx))
        .map(|idx| {
            let xi = g.wavevector(idx);
            let mut r = dv.coeff(d, idx);
            for l in 0..d {
                r += I * xi[l] * v.coeff(l, idx);
            }
            let size = g.kappa(idx) * (0..=d).map(|c| v.coeff(c, idx).norm_sqr()).sum::<f64>().sqrt();
            (r.norm(), size)
        })
        .collect())
}

fn boundary_discrepancy() -> Result<Outcome> {
    let g = Grid::desk(3)?;
    let a = random::band_limited(g, 3, 16, 0.0, &mut random::rng(6));
    let mut amended: f64 = 0.0;
    for x in [0.0, 0.3, 1.0, 4.0] {
        for (r, size) in mode_divergence(&a, x, BoundaryVariant::Amended)? {
            if size > 0.0 {
                amended = amended.max(r / size);
            }
        }
    }
    let mut unit = TangentialField::zeros(g, 3);
    let idx = g.mode_index(&[1, 2]).expect("mode on grid");
    unit.set_mode(2, idx, Complex64::new(1.0, 0.0));
    let printed = mode_divergence(&unit, 0.0, BoundaryVariant::AsPrinted)?
        .into_iter()
        .map(|(r, _)| r)
        .fold(0.0, f64::max);
    let an = unit.coeff(2, idx).norm();
    outcome(
        amended <= 1e-12 && printed >= 1e-3 * an,
        format!("amended per-mode {amended:.2e}, as-printed {printed:.3e} vs |a_n| {an}"),
    )
}

fn max_regularity() -> Result<Outcome> {
    let g = Grid::desk(3)?;
    let pairs: Vec<(f64, f64)> = MAX_REG_BASELINE.iter().map(|x| x.0).collect();
    let reports = stokes::max_reg_battery(g, 20, &pairs, 2.0, 2.0, 100)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for ((pair, baseline), rep) in MAX_REG_BASELINE.iter().zip(&reports) {
        pass &= rep.all_finite() && rep.max <= 10.0 * rep.median && rep.max <= *baseline;
        detail.push(format!("{pair:?} max {:.5} med {:.5}", rep.max, rep.median));
    }
    outcome(pass, detail.join("; "))
}

fn bilinear() -> Result<Outcome> {
    let g = Grid::desk(3)?;
    let mut bony: f64 = 0.0;
    for seed in 0..5 {
        let mut rng = random::rng(300 + seed);
        let f = random::band_limited(g, 1, 21, 0.5, &mut rng);
        let h = random::band_limited(g, 1, 21, 0.5, &mut rng);
        let parts = spectral::bony_decompose(&f, &h)?;
        let fh = spectral::product(&f, &h)?;
        bony = bony.max((&parts.sum() - &fh).max_abs_coeff() / fh.max_abs_coeff());
    }
    let mut pass = bony <= 1e-12;
    let mut detail = vec![format!("Bony {bony:.2e}")];
    let mut invariance: f64 = 0.0;
    for ((n, p, q), baseline) in BILINEAR_BASELINE {
        let grid = Grid::desk(n)?;
        let rep: RatioReport = besov::bilinear_estimate_check(100, grid, p, q, 2.0, 200)?;
        pass &= rep.all_finite() && rep.max <= baseline;
        detail.push(format!("({n},{p},{q}) max {:.7}", rep.max));
        let (f, h) = besov::bilinear_pair(grid, 0, 200)?;
        let base = besov::bilinear_ratio(&f, &h, p, q, 2.0)?;
        let scaled = besov::bilinear_ratio(&f.rescaled(2.0, 1)?, &h.rescaled(2.0, 1)?, p, q, 2.0)?;
        invariance = invariance.max(rel(base, scaled));
    }
    pass &= invariance <= 1e-9;
    detail.push(format!("rescaling {invariance:.2e}"));
    outcome(pass, detail.join("; "))
}

fn desk3_config() -> Result<SolverConfig> {
    SolverConfig::new(Grid::desk(3)?, 2.0, 2.0, 2.0)
}

fn nonlinear_solve() -> Result<Outcome> {
    let clock = Instant::now();
    let mut cfg = desk3_config()?;
    let frozen = Calibration::from_kv(&std::fs::read_to_string(calibration_file("n3_p2_q2_r2.kv"))?)?;
    let fresh = fixed_point::calibrate(&cfg, frozen.trials, frozen.seed)?;
    let cal_drift = rel(fresh.c0, frozen.c0);
    cfg.enforce_smallness = true;
    cfg.calibration = Some(frozen.clone());
    let data = presets::preset(&PresetSpec::new("gaussian-bump", 0.5).with_radius(frozen.delta0), &cfg)?;
    let (u, rep) = fixed_point::picard_solve(&data.boundary, &data.force, &cfg, None)?;
    let lin = stokes::linear_solve(&data.boundary, data.force.clone())?.into_field();
    let (w, _) = fixed_point::picard_solve(&data.boundary, &data.force, &cfg, Some(&lin))?;
    let agree = cfg.solution_norm(&u.axpy(-1.0, &w)?);
    let ratios = rep.ratios();
    let worst_ratio = ratios.iter().skip(1).copied().fold(0.0, f64::max);
    let dg = &rep.diagnostics;
    let secs = clock.elapsed().as_secs_f64();
    let pass = cal_drift <= 1e-9
        && rep.iterations() <= 30
        && rep.final_difference() <= 1e-10
        && worst_ratio <= 0.5
        && dg.fixed_point <= 1e-9
        && dg.trace <= 1e-9
        && dg.divergence <= 1e-9
        && dg.solution_norm <= frozen.epsilon0
        && agree <= 1e-9
        && secs <= 300.0;
    outcome(
        pass,
        format!(
            "{} iterations, diff {:.2e}, max ratio {worst_ratio:.3e}, residuals fp {:.2e} trace {:.2e} div {:.2e}, \
             restart gap {agree:.2e}, calibration drift {cal_drift:.1e}, {secs:.1}s",
            rep.iterations(),
            rep.final_difference(),
            dg.fixed_point,
            dg.trace,
            dg.divergence,
        ),
    )
}

fn scaling() -> Result<Outcome> {
    let cfg = desk3_config()?;
    let data = presets::preset(&PresetSpec::new("gaussian-bump", 0.01), &cfg)?;
    let (u, _) = fixed_point::picard_solve(&data.boundary, &data.force, &cfg, None)?;
    let lambda = 2.0;
    let scaled_cfg = SolverConfig { grid: cfg.grid.rescaled(lambda)?, ..cfg.clone() };
    let a = data.boundary.rescaled(lambda, 1)?;
    let f = data.force.rescaled(lambda, 2)?;
    let (v, _) = fixed_point::picard_solve(&a, &f, &scaled_cfg, None)?;
    let norm_gap = rel(cfg.solution_norm(&u), scaled_cfg.solution_norm(&v));
    let data_gap = rel(cfg.data_norm(&data.boundary, &data.force), scaled_cfg.data_norm(&a, &f));
    let field_gap = scaled_cfg.solution_norm(&v.axpy(-1.0, &u.rescaled(lambda, 1)?)?) / scaled_cfg.solution_norm(&v);
    let worst = norm_gap.max(data_gap).max(field_gap);
    outcome(worst <= 1e-8, format!("solution norm {norm_gap:.2e}, data norm {data_gap:.2e}, field {field_gap:.2e}"))
}

fn asymptotics() -> Result<Outcome> {
    let clock = Instant::now();
    let mut cfg = SolverConfig::new(Grid::desk(4)?, 2.0, f64::INFINITY, 2.0)?;
    let frozen = Calibration::from_kv(&std::fs::read_to_string(calibration_file("n4_p2_qinf_r2.kv"))?)?;
    let maxima = [frozen.boundary_max, frozen.force_max, frozen.bilinear_max];
    let mut cal_ok = frozen.matches(&cfg);
    for t in 0..2 {
        let r = fixed_point::calibration_ratios(&cfg, frozen.seed + t)?;
        cal_ok &= r.iter().zip(maxima).all(|(x, m)| *x <= m);
    }
    let lcfg = LimitConfig::from_solver(&cfg);
    let pc = profile::calibrate_profile(cfg.grid, &lcfg, 20, 7, frozen.delta0, frozen.epsilon0)?;
    cfg.calibration = Some(frozen);
    let run = |name: &str| -> Result<profile::DecayReport> {
        let data = presets::preset(&PresetSpec::new(name, 0.5).with_radius(pc.delta1), &cfg)?;
        profile::theorem2_verify(&data.boundary, data.fbar.as_ref().expect("profile preset has F̄"), &cfg)
    };
    let consistent = run("profile-consistent")?;
    let perturbed = run("profile-perturbed")?;
    let consistent_max = consistent.ladder.iter().map(|x| x.1).fold(0.0, f64::max);
    let limit = consistent.limit.pde_residual.max(perturbed.limit.pde_residual);
    let secs = clock.elapsed().as_secs_f64();
    let pass = cal_ok
        && consistent_max <= 10.0 * cfg.tol
        && perturbed.non_increasing()
        && perturbed.decay_ratio() <= 0.2
        && limit <= 1e-9
        && secs <= 600.0;
    let ladder: Vec<String> = perturbed.ladder.iter().map(|(_, d)| format!("{d:.2e}")).collect();
    outcome(
        pass,
        format!(
            "consistent max D {consistent_max:.2e}, perturbed D [{}], ratio {:.3e}, limit residual {limit:.2e}, {secs:.1}s",
            ladder.join(" "),
            perturbed.decay_ratio()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("kernel oracle", kernel_oracle),
        ("trace identities", trace_identities),
        ("Poisson semigroup", poisson_semigroup),
        ("linear solver", linear_solver),
        ("boundary discrepancy", boundary_discrepancy),
        ("maximal regularity", max_regularity),
        ("bilinear estimate", bilinear),
        ("nonlinear solve", nonlinear_solve),
        ("scaling criticality", scaling),
        ("half-space asymptotics", asymptotics),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let number = k + 1;
        if !filter.is_empty() && !filter.contains(&number) {
            continue;
        }
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("criterion {number:2} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
