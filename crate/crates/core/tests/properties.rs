use std::f64::consts::PI;
use std::sync::OnceLock;

use halfspace_ns::besov::{self, BesovIndex, CLIndex};
use halfspace_ns::fixed_point::{self, Calibration, SolverConfig};
use halfspace_ns::kernels::{self, KernelId, ModeSweep, Sign, SignedKernel};
use halfspace_ns::profile::{self, LimitConfig, ProfileField};
use halfspace_ns::stokes::{self, reflection};
use halfspace_ns::{quadrature, random, spectral, Grid, HalfSpaceField, TangentialField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid2() -> Grid {
    Grid::new(2, 16, 4.0 * PI, 8, 4.0).unwrap()
}

fn grid3() -> Grid {
    Grid::new(3, 8, 2.0 * PI, 8, 4.0).unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(3.0), Just(f64::INFINITY)]
}

fn zero_mode(f: &TangentialField) -> f64 {
    let idx = f.grid().mode_index(&vec![0; f.grid().dim()]).unwrap();
    (0..f.components()).map(|c| f.coeff(c, idx).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn physical_round_trip(seed in any::<u64>(), kmax in 1i64..8) {
        let f = random::band_limited(grid2(), 2, kmax, 0.5, &mut random::rng(seed));
        let back = TangentialField::from_physical(grid2(), 2, &f.to_physical()).unwrap();
        prop_assert!((&back - &f).max_abs_coeff() <= 1e-13 * f.max_abs_coeff());
    }

    #[test]
    fn operations_keep_zero_mean(seed in any::<u64>(), x in 0.0f64..3.0) {
        let mut rng = random::rng(seed);
        let f = random::band_limited(grid2(), 2, 7, 0.0, &mut rng);
        let h = random::band_limited(grid2(), 1, 7, 0.0, &mut rng);
        let scalar = f.select(&[0]);
        let outs = [
            spectral::riesz_transform(1, &f).unwrap(),
            spectral::poisson_apply(x, &f).unwrap(),
            spectral::laplacian(&f).unwrap(),
            spectral::lp_block(0, &f).unwrap(),
            spectral::tangential_div(&f).unwrap(),
            spectral::product(&scalar, &h).unwrap(),
            spectral::outer_product(&f, &f).unwrap(),
        ];
        for out in &outs {
            prop_assert_eq!(zero_mode(out), 0.0);
        }
    }

    #[test]
    fn parseval(seed in any::<u64>()) {
        let g = grid2();
        let f = random::band_limited(g, 3, 7, 0.3, &mut random::rng(seed));
        let physical = (g.cell_volume() * f.to_physical().iter().map(|v| v * v).sum::<f64>()).sqrt();
        let spectral = g.period().powi(2).sqrt() * f.coefficient_norm();
        prop_assert!((physical - spectral).abs() <= 1e-12 * spectral);
    }

    #[test]
    fn partition_of_unity(points in prop_oneof![Just(8usize), Just(16), Just(32)], period in 1.0f64..100.0) {
        let g = Grid::new(2, points, period, 2, 1.0).unwrap();
        for idx in (0..g.modes()).filter(|&i| g.is_active(i)) {
            prop_assert!((spectral::partition_sum(&g, g.kappa(idx)) - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn besov_norm_is_a_norm(seed in any::<u64>(), lambda in -3.0f64..3.0, s in -1.0f64..1.0, p in exponent(), r in exponent()) {
        let mut rng = random::rng(seed);
        let f = random::band_limited(grid2(), 1, 7, 0.5, &mut rng);
        let h = random::band_limited(grid2(), 1, 7, 0.5, &mut rng);
        let idx = BesovIndex::new(s, p, r).unwrap();
        let nf = besov::besov_norm(&f, &idx);
        let scaled = besov::besov_norm(&f.scaled(lambda), &idx);
        prop_assert!((scaled - lambda.abs() * nf).abs() <= 1e-12 * nf.max(scaled));
        let sum = besov::besov_norm(&(&f + &h), &idx);
        prop_assert!(sum <= (nf + besov::besov_norm(&h, &idx)) * (1.0 + 1e-12));
    }

    #[test]
    fn lr_monotone(seed in any::<u64>(), s in -1.0f64..1.0, p in exponent()) {
        let f = random::band_limited(grid2(), 2, 7, 0.0, &mut random::rng(seed));
        let norms: Vec<f64> = [1.0, 2.0, 4.0, f64::INFINITY]
            .iter()
            .map(|&r| besov::besov_norm(&f, &BesovIndex::new(s, p, r).unwrap()))
            .collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bony_identity(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::band_limited(grid2(), 1, 7, 0.0, &mut rng);
        let h = random::band_limited(grid2(), 1, 7, 0.0, &mut rng);
        let fh = spectral::product(&f, &h).unwrap();
        let parts = spectral::bony_decompose(&f, &h).unwrap();
        prop_assert!((&parts.sum() - &fh).max_abs_coeff() <= 1e-12 * fh.max_abs_coeff());
    }

    #[test]
    fn semigroup_envelope(seed in any::<u64>(), p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)]) {
        let g = grid2();
        let f = random::band_limited(g, 1, 7, 0.0, &mut random::rng(seed));
        let heights: Vec<f64> = (0..=g.slabs()).map(|m| m as f64 * g.slab_width()).collect();
        for j in g.dyadic_range().iter() {
            let samples = besov::semigroup_block_ratios(&f, j, p, &heights).unwrap();
            prop_assert!(samples.iter().all(|(_, r)| *r <= 4.0));
            prop_assert!(kernels::envelope_rate(&samples, j, 4.0) >= 0.4);
        }
    }

    #[test]
    fn slab_sweep_matches_quadrature(
        kappa in 0.1f64..5.0,
        h in 0.1f64..1.0,
        g in prop::collection::vec(-1.0f64..1.0, 1..6),
        tail in -1.0f64..1.0,
        xf in 0.0f64..1.5,
    ) {
        let top = g.len() as f64 * h;
        let x = xf * top;
        let sweep = ModeSweep::new(kappa, h, g.iter().map(|&v| Complex64::new(v, 0.0)).collect(), Complex64::new(tail, 0.0));
        for id in KernelId::ALL {
            for sign in [Sign::Plus, Sign::Minus] {
                let k = SignedKernel::new(id, sign);
                let fast = kernels::combine(&kernels::value_weights(k), &sweep.moments(x)).re;
                let (direct, scale) = direct_integral(k, kappa, h, &g, tail, x);
                prop_assert!((fast - direct).abs() <= 1e-10 * scale, "{:?} {:?}: {} vs {}", id, sign, fast, direct);
            }
        }
    }
}

/// Quadrature of `∫_0^∞ (K(x−y) ± K(x+y)) g(y) dy`, and of its absolute
/// integrand as the error scale.
fn direct_integral(k: SignedKernel, kappa: f64, h: f64, g: &[f64], tail: f64, x: f64) -> (f64, f64) {
    let top = g.len() as f64 * h;
    let value = |y: f64| if y >= top { tail } else { g[((y / h) as usize).min(g.len() - 1)] };
    let kern = |y: f64| {
        kernels::kernel_value(k.id, kappa, x - y).unwrap() + k.sign.factor() * kernels::kernel_value(k.id, kappa, x + y).unwrap()
    };
    let mut cuts: Vec<f64> = (0..=g.len()).map(|i| i as f64 * h).collect();
    cuts.push(x);
    cuts.sort_by(f64::total_cmp);
    let far = top.max(x);
    let mut out = [0.0, 0.0];
    for (slot, abs) in out.iter_mut().zip([false, true]) {
        let f = |y: f64| {
            let v = kern(y) * value(y);
            if abs {
                v.abs()
            } else {
                v
            }
        };
        for w in cuts.windows(2).filter(|w| w[1] > w[0]) {
            *slot += quadrature::integrate(f, w[0], w[1], 1e-16, 1e-14, 500).unwrap().0;
        }
        let rest = |u: f64| if u >= 1.0 { 0.0 } else { f(far + u / (1.0 - u)) / ((1.0 - u) * (1.0 - u)) };
        *slot += quadrature::integrate(rest, 0.0, 1.0, 1e-16, 1e-13, 500).unwrap().0;
    }
    (out[0], out[1].max(f64::MIN_POSITIVE))
}

/// `∫_lo^hi e^{−a|x−y|} dy`.
fn exp_window(a: f64, x: f64, lo: f64, hi: f64) -> f64 {
    let part = |u: f64, v: f64| ((-a * u).exp() - (-a * v).exp()) / a;
    if x <= lo {
        part(lo - x, hi - x)
    } else if x >= hi {
        part(x - hi, x - lo)
    } else {
        part(0.0, x - lo) + part(0.0, hi - x)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kernel_block_envelope(seed in any::<u64>(), p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)], tail in any::<bool>()) {
        let g = grid2();
        let mut rng = random::rng(seed);
        let mut f = random::separable(g, 1, 7, 2, &mut rng).unwrap();
        if tail {
            f = f.axpy(1.0, &HalfSpaceField::constant(g, &random::band_limited(g, 1, 7, 0.0, &mut rng)).unwrap()).unwrap();
        }
        let (c, bound) = (0.4, 4.0);
        let w = g.slab_width();
        for j in g.dyadic_range().iter() {
            let a = c * 2f64.powi(j);
            let slab_norms: Vec<f64> = f.slabs().iter().map(|s| besov::lp_norm(&spectral::lp_block(j, s).unwrap(), p)).collect();
            let tail_norm = f.tail().map_or(0.0, |t| besov::lp_norm(&spectral::lp_block(j, t).unwrap(), p));
            for x in g.slab_centers() {
                let rhs: f64 = slab_norms.iter().enumerate().map(|(m, v)| v * exp_window(a, x, m as f64 * w, (m + 1) as f64 * w)).sum::<f64>()
                    + tail_norm * (-a * (g.height() - x)).exp() / a;
                for id in KernelId::ALL {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let out = kernels::l_operator(SignedKernel::new(id, sign), &f, x).unwrap();
                        let lhs = besov::lp_norm(&spectral::lp_block(j, &out).unwrap(), p);
                        prop_assert!(lhs <= bound * rhs * (1.0 + 1e-12) + 1e-14, "{:?} {:?} j={} x={}: {} > {}", id, sign, j, x, lhs, bound * rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn linear_solver_invariants(seed in any::<u64>()) {
        let (a, f) = stokes::random_data(grid2(), seed, 1.0).unwrap();
        let sol = stokes::linear_solve(&a, f).unwrap();
        prop_assert!(sol.trace_residual(2.0, 2.0).unwrap() <= 1e-10);
        prop_assert!(sol.trace_residual(2.0, 1.0).unwrap() <= 1e-10);
        prop_assert!(sol.divergence_residual().unwrap() <= 1e-10);
    }

    #[test]
    fn linear_in_data(seed in any::<u64>(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let g = grid2();
        let (a1, f1) = stokes::random_data(g, seed, 1.0).unwrap();
        let (a2, f2) = stokes::random_data(g, seed.wrapping_add(1), 1.0).unwrap();
        let u1 = stokes::linear_solve(&a1, f1.clone()).unwrap().into_field();
        let u2 = stokes::linear_solve(&a2, f2.clone()).unwrap().into_field();
        let a = a1.scaled(alpha).axpy(beta, &a2).unwrap();
        let f = f1.scaled(alpha).axpy(beta, &f2).unwrap();
        let u = stokes::linear_solve(&a, f).unwrap().into_field();
        let expect = u1.scaled(alpha).axpy(beta, &u2).unwrap();
        let scale = u1.max_abs_coeff().max(u2.max_abs_coeff()) * (alpha.abs() + beta.abs()).max(1.0);
        prop_assert!(u.axpy(-1.0, &expect).unwrap().max_abs_coeff() <= 1e-12 * scale);
    }

    #[test]
    fn whole_space_matches_reflection(seed in any::<u64>(), d in 2usize..=3) {
        let g = Grid::new(d, 8, 4.0 * PI, 8, 2.0).unwrap();
        let f = stokes::reflection_force(g, 2, 3, &mut random::rng(seed)).unwrap();
        let u = stokes::whole_space_solution(&f).unwrap();
        let o = reflection::reflection_oracle(&f, reflection::ReflectionConfig::default()).unwrap();
        prop_assert!(o.relative_error(&u) <= 1e-6);
    }
}

fn picard_config() -> &'static SolverConfig {
    static CFG: OnceLock<SolverConfig> = OnceLock::new();
    CFG.get_or_init(|| {
        let mut cfg = SolverConfig::new(Grid::new(2, 16, 4.0 * PI, 16, 4.0).unwrap(), 2.0, 2.0, 2.0).unwrap();
        let cal: Calibration = fixed_point::calibrate(&cfg, 4, 11).unwrap();
        cfg.calibration = Some(cal);
        cfg.enforce_smallness = true;
        cfg
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn picard_invariants(seed in any::<u64>(), fraction in 0.1f64..0.9) {
        let cfg = picard_config();
        let cal = cfg.calibration.as_ref().unwrap();
        let (a, f) = stokes::random_data(cfg.grid, seed, 1.0).unwrap();
        let scale = fraction * cal.delta0 / cfg.data_norm(&a, &f);
        let (a, f) = (a.scaled(scale), f.scaled(scale));
        let (u, rep) = fixed_point::picard_solve(&a, &f, cfg, None).unwrap();
        prop_assert!(rep.diagnostics.solution_norm <= cal.epsilon0);
        prop_assert!(rep.ratios().iter().skip(1).all(|r| *r <= 0.5));
        // every iterate, replayed
        let mut v = fixed_point::nonlinear_map(&HalfSpaceField::zeros(cfg.grid, 3), &a, &f).unwrap();
        for _ in 0..rep.iterations() {
            let s = fixed_point::nonlinear_solution(&v, &a, &f).unwrap();
            prop_assert!(s.divergence_residual().unwrap() <= 1e-9);
            prop_assert!(s.trace_residual(cfg.p, cfg.r).unwrap() <= 1e-9);
            v = s.into_field();
        }
        let lin = stokes::linear_solve(&a, f.clone()).unwrap().into_field();
        let (w, _) = fixed_point::picard_solve(&a, &f, cfg, Some(&lin)).unwrap();
        prop_assert!(cfg.solution_norm(&u.axpy(-1.0, &w).unwrap()) <= 10.0 * cfg.tol);
    }

    #[test]
    fn profile_is_a_fixed_point(seed in any::<u64>(), size in 0.005f64..0.05) {
        let g = grid3();
        let cfg = SolverConfig::new(g, 2.0, f64::INFINITY, 2.0).unwrap();
        let lcfg = LimitConfig { tol: 1e-13, ..LimitConfig::from_solver(&cfg) };
        let fbar = random::band_limited(g, 16, 2, 1.0, &mut random::rng(seed));
        let fbar = fbar.scaled(size / lcfg.force_norm(&fbar));
        let (ubar, _) = profile::limit_system_solve(&fbar, &lcfg).unwrap();
        let u = HalfSpaceField::constant(g, &ubar.u).unwrap();
        let force = HalfSpaceField::constant(g, &fbar).unwrap();
        let d = fixed_point::residual_report(&u, &ubar.u, &force, &cfg).unwrap();
        prop_assert!(d.fixed_point <= 10.0 * cfg.tol, "{}", d.fixed_point);
    }

    #[test]
    fn profile_distance_non_increasing(seed in any::<u64>(), size in 0.005f64..0.03) {
        let g = grid3();
        let cfg = SolverConfig::new(g, 2.0, f64::INFINITY, 2.0).unwrap();
        let mut rng = random::rng(seed);
        let fbar = random::band_limited(g, 16, 2, 1.0, &mut rng);
        let fbar = fbar.scaled(size / cfg.boundary_norm(&fbar).max(1e-300));
        let a = random::band_limited(g, 4, 3, 0.0, &mut rng);
        let a = a.scaled(size / cfg.boundary_norm(&a));
        let rep = profile::theorem2_verify(&a, &fbar, &cfg).unwrap();
        prop_assert!(rep.non_increasing(), "{:?}", rep.ladder);
    }

    #[test]
    fn profile_scaling(seed in any::<u64>()) {
        let g = grid3();
        let lcfg = LimitConfig { p: 2.0, r: 2.0, tol: 1e-14, max_iter: 200 };
        let fbar = random::band_limited(g, 16, 2, 1.0, &mut random::rng(seed));
        let fbar = fbar.scaled(0.02 / lcfg.force_norm(&fbar));
        let (u, _) = profile::limit_system_solve(&fbar, &lcfg).unwrap();
        let (v, _) = profile::limit_system_solve(&fbar.rescaled(2.0, 2).unwrap(), &lcfg).unwrap();
        let (nu, nv) = (lcfg.norm(&u.u), lcfg.norm(&v.u));
        prop_assert!((nu - nv).abs() <= 1e-8 * nu);
        let back = ProfileField { u: u.u.rescaled(2.0, 1).unwrap() };
        prop_assert!((&back.u - &v.u).max_abs_coeff() <= 1e-8 * v.u.max_abs_coeff());
    }
}

#[test]
fn chemin_lerner_sup_is_slab_max() {
    let g = grid2();
    let cl = CLIndex::new(f64::INFINITY, 0.0, g.height()).unwrap();
    let slab_max = |u: &HalfSpaceField, idx: &BesovIndex| u.slabs().iter().map(|s| besov::besov_norm(s, idx)).fold(0.0, f64::max);
    for seed in 0..4 {
        let single = random::separable(g, 1, 7, 1, &mut random::rng(seed)).unwrap();
        let mixed = random::separable(g, 2, 7, 3, &mut random::rng(seed)).unwrap();
        for (p, r) in [(1.0, 2.0), (2.0, 1.0), (f64::INFINITY, 2.0), (2.0, f64::INFINITY)] {
            let idx = BesovIndex::new(0.5, p, r).unwrap();
            let expect = slab_max(&single, &idx);
            assert!((besov::chemin_lerner_norm(&single, &cl, &idx) - expect).abs() <= 1e-12 * expect);
            // in general the supremum sits inside the block sum
            let expect = slab_max(&mixed, &idx);
            let got = besov::chemin_lerner_norm(&mixed, &cl, &idx);
            assert!(got >= expect * (1.0 - 1e-12));
            if r.is_infinite() {
                assert!((got - expect).abs() <= 1e-12 * expect);
            }
        }
    }
}
