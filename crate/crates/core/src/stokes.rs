//! Linear half-space Stokes solver.
//!
//! Velocity components are indexed `0..n` with `n − 1` the normal direction;
//! force components `F_{k,l}` sit at `k * n + l`.

use num_complex::Complex64;

use crate::besov::{self, RatioReport};
use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::grid::Grid;
use crate::kernels::{self, KernelId, ModeSweep, SignedKernel, Sign};
use crate::random;

pub mod reflection;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One term `coef · Π_a ℛ_a · ℒ^{(j,±)}[F_input]` of a velocity component.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanTerm {
    pub output: usize,
    pub coef: f64,
    pub riesz: Vec<usize>,
    pub kernel: SignedKernel,
    pub input: usize,
}

/// Lazy representation of `u^w[F]` as a list of kernel terms.
#[derive(Debug, Clone)]
pub struct WholeSpacePlan {
    n: usize,
    terms: Vec<PlanTerm>,
    /// distinct `(kernel, input)` pairs; `terms[i]` uses `pairs[term_pair[i]]`
    pairs: Vec<(SignedKernel, usize)>,
    term_pair: Vec<usize>,
}

impl WholeSpacePlan {
    pub fn new(n: usize) -> Self {
        use KernelId::*;
        use Sign::*;
        let d = n - 1;
        let f = |k: usize, l: usize| k * n + l;
        let sk = SignedKernel::new;
        let mut terms = Vec::new();
        let mut push = |output, coef, riesz: Vec<usize>, kernel, input| {
            terms.push(PlanTerm { output, coef, riesz, kernel, input });
        };
        for k in 0..d {
            for m in 0..d {
                push(k, 0.5, vec![m], sk(K1, Plus), f(k, m));
            }
            push(k, -0.5, vec![], sk(K2, Minus), f(k, d));
            for l in 0..d {
                for m in 0..d {
                    push(k, 0.25, vec![k, l, m], sk(K3, Plus), f(l, m));
                }
            }
            for l in 0..d {
                push(k, -0.25, vec![k, l], sk(K4, Plus), f(d, l));
                push(k, -0.25, vec![k, l], sk(K4, Minus), f(l, d));
            }
            push(k, -0.25, vec![k], sk(K5, Minus), f(d, d));
        }
        for l in 0..d {
            push(d, 0.25, vec![l], sk(K3, Plus), f(d, l));
        }
        for l in 0..d {
            for m in 0..d {
                push(d, -0.25, vec![l, m], sk(K4, Plus), f(l, m));
            }
        }
        push(d, -0.25, vec![], sk(K4, Minus), f(d, d));
        for l in 0..d {
            push(d, -0.25, vec![l], sk(K5, Minus), f(l, d));
        }
        let mut pairs: Vec<(SignedKernel, usize)> = Vec::new();
        let term_pair = terms
            .iter()
            .map(|t| {
                let key = (t.kernel, t.input);
                pairs.iter().position(|p| *p == key).unwrap_or_else(|| {
                    pairs.push(key);
                    pairs.len() - 1
                })
            })
            .collect();
        Self { n, terms, pairs, term_pair }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PlanTerm] {
        &self.terms
    }

    /// `(u^w or ∂_x u^w)` at every height for every active mode.
    /// Returns `n × heights` coefficient vectors.
    fn evaluate(&self, force: &HalfSpaceField, heights: &[f64], derivative: bool) -> Vec<Vec<Complex64>> {
        let grid = *force.grid();
        let n = self.n;
        let nh = heights.len();
        let inputs = n * n;
        kernels::evaluate_modes(&grid, n, nh, |idx, out| {
            let kappa = grid.kappa(idx);
            let xi = grid.wavevector(idx);
            let sweeps: Vec<Option<ModeSweep>> = (0..inputs)
                .map(|c| {
                    let (g, tail) = kernels::mode_profile(force, c, idx);
                    if tail == ZERO && g.iter().all(|v| *v == ZERO) {
                        None
                    } else {
                        Some(ModeSweep::new(kappa, grid.slab_width(), g, tail))
                    }
                })
                .collect();
            let moments: Vec<Option<Vec<kernels::Moments>>> = sweeps
                .iter()
                .map(|s| s.as_ref().map(|s| heights.iter().map(|&x| s.moments(x)).collect()))
                .collect();
            let pair_values: Vec<Option<Vec<Complex64>>> = self
                .pairs
                .iter()
                .map(|(k, input)| {
                    moments[*input].as_ref().map(|ms| {
                        let w = if derivative { kernels::derivative_weights(*k, kappa) } else { kernels::value_weights(*k) };
                        ms.iter().map(|m| kernels::combine(&w, m)).collect()
                    })
                })
                .collect();
            for (t, &p) in self.terms.iter().zip(&self.term_pair) {
                let Some(vals) = &pair_values[p] else { continue };
                let factor = t.riesz.iter().fold(Complex64::new(t.coef, 0.0), |acc, &a| acc * I * (xi[a] / kappa));
                let row = &mut out[t.output * nh..(t.output + 1) * nh];
                for (o, v) in row.iter_mut().zip(vals) {
                    *o += factor * v;
                }
            }
        })
    }
}

fn check_force(force: &HalfSpaceField) -> Result<usize> {
    let c = force.components();
    let n = force.grid().ambient_dim();
    if c != n * n {
        return Err(Error::ComponentMismatch { expected: n * n, found: c });
    }
    Ok(n)
}

fn check_boundary(a: &TangentialField, grid: &Grid) -> Result<usize> {
    let n = grid.ambient_dim();
    if !a.grid().same_torus(grid) {
        return Err(Error::GridMismatch("boundary data torus differs from the force grid".into()));
    }
    if a.components() != n {
        return Err(Error::ComponentMismatch { expected: n, found: a.components() });
    }
    Ok(n)
}

/// `u^w[F]` at slab centers, with its `x → ∞` limit as tail when `F` has one.
pub fn whole_space_solution(force: &HalfSpaceField) -> Result<HalfSpaceField> {
    let n = check_force(force)?;
    let with_tail = force.tail().is_some();
    let heights = kernels::field_heights(force.grid(), with_tail);
    let raw = WholeSpacePlan::new(n).evaluate(force, &heights, false);
    kernels::assemble(*force.grid(), n, with_tail, raw)
}

/// `u^w[F](·, x)`.
pub fn whole_space_at(force: &HalfSpaceField, x: f64) -> Result<TangentialField> {
    let n = check_force(force)?;
    kernels::assemble_level(*force.grid(), WholeSpacePlan::new(n).evaluate(force, &[x], false))
}

/// `∂_{x_n} u^w[F](·, x)`.
pub fn whole_space_derivative_at(force: &HalfSpaceField, x: f64) -> Result<TangentialField> {
    let n = check_force(force)?;
    kernels::assemble_level(*force.grid(), WholeSpacePlan::new(n).evaluate(force, &[x], true))
}

fn riesz(f: &TangentialField, axes: &[usize]) -> Result<TangentialField> {
    axes.iter().try_fold(f.clone(), |acc, &a| crate::spectral::riesz_transform(a, &acc))
}

/// `u^w[F](·, 0)` from the closed trace forms of `ℒ^{(1,+)}`, `ℒ^{(3,+)}`
/// and `ℒ^{(4,−)}`; the other kernels contribute through
/// `ℒ^{(2,−)}(0) = −ℒ^{(1,+)}(0)` and `ℒ^{(4,+)}(0) = ℒ^{(5,−)}(0) = 0`.
pub fn trace_whole_space(force: &HalfSpaceField) -> Result<TangentialField> {
    let n = check_force(force)?;
    let d = n - 1;
    let grid = *force.grid();
    let l1 = kernels::trace_l1_plus(force)?;
    let l3 = kernels::trace_l3_plus(force)?;
    let l4m = kernels::trace_l4_minus(force)?;
    let comp = |t: &TangentialField, k: usize, l: usize| t.select(&[k * n + l]);
    let mut out = Vec::with_capacity(n);
    for k in 0..d {
        let mut u = TangentialField::zeros(grid, 1);
        for m in 0..d {
            u = u.axpy(0.5, &riesz(&comp(&l1, k, m), &[m])?)?;
        }
        u = u.axpy(0.5, &comp(&l1, k, d))?;
        for l in 0..d {
            for m in 0..d {
                u = u.axpy(0.25, &riesz(&comp(&l3, l, m), &[k, l, m])?)?;
            }
            u = u.axpy(-0.25, &riesz(&comp(&l4m, l, d), &[k, l])?)?;
        }
        out.push(u);
    }
    let mut un = TangentialField::zeros(grid, 1);
    for l in 0..d {
        un = un.axpy(0.25, &riesz(&comp(&l3, d, l), &[l])?)?;
    }
    un = un.axpy(-0.25, &comp(&l4m, d, d))?;
    out.push(un);
    TangentialField::stack(&out.iter().collect::<Vec<_>>())
}

/// Which tangential boundary formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryVariant {
    /// `û′ = e^{−xκ}[â′ − x ξ′(ξ′·â′)/κ − i x ξ′ â_n]`.
    Amended,
    /// The displayed form with `(iξ′/κ) â_n` in place of `−i x ξ′ â_n`.
    AsPrinted,
}

/// Per-mode closed form `e^{−xκ}(P + xQ)` of each boundary component.
fn boundary_coefficients(a: &[Complex64], xi: &[f64; 3], kappa: f64, variant: BoundaryVariant) -> Vec<(Complex64, Complex64)> {
    let n = a.len();
    let d = n - 1;
    let an = a[d];
    let xa: Complex64 = (0..d).map(|l| a[l] * xi[l]).sum();
    let mut out = Vec::with_capacity(n);
    for k in 0..d {
        let p = a[k];
        let mut q = -(xa * (xi[k] / kappa));
        let mut p = p;
        match variant {
            BoundaryVariant::Amended => q -= I * xi[k] * an,
            BoundaryVariant::AsPrinted => p += I * (xi[k] / kappa) * an,
        }
        out.push((p, q));
    }
    out.push((an, an * kappa - I * xa));
    out
}

/// `order`-th `x`-derivative of `e^{−κx}(P + xQ)`.
fn exp_poly(p: Complex64, q: Complex64, kappa: f64, x: f64, order: usize) -> Complex64 {
    if x.is_infinite() {
        return ZERO;
    }
    let e = (-kappa * x).exp();
    match order {
        0 => (p + q * x) * e,
        1 => (q - p * kappa - q * (kappa * x)) * e,
        _ => (p * (kappa * kappa) - q * (2.0 * kappa) + q * (kappa * kappa * x)) * e,
    }
}

fn boundary_eval(a: &TangentialField, heights: &[f64], order: usize, variant: BoundaryVariant) -> Vec<Vec<Complex64>> {
    let grid = *a.grid();
    let n = a.components();
    let nh = heights.len();
    kernels::evaluate_modes(&grid, n, nh, |idx, out| {
        let coeffs: Vec<Complex64> = (0..n).map(|c| a.coeff(c, idx)).collect();
        if coeffs.iter().all(|z| *z == ZERO) {
            return;
        }
        let pq = boundary_coefficients(&coeffs, &grid.wavevector(idx), grid.kappa(idx), variant);
        for (c, (p, q)) in pq.into_iter().enumerate() {
            for (h, &x) in heights.iter().enumerate() {
                out[c * nh + h] = exp_poly(p, q, grid.kappa(idx), x, order);
            }
        }
    })
}

/// `𝒰^boundary[a]` (amended form) at slab centers of `grid`; it decays to
/// zero, so the result has no tail.
pub fn boundary_operator(a: &TangentialField, grid: &Grid) -> Result<HalfSpaceField> {
    let n = check_boundary(a, grid)?;
    let a = a.with_grid(*grid);
    kernels::assemble(*grid, n, false, boundary_eval(&a, &grid.slab_centers(), 0, BoundaryVariant::Amended))
}

/// `∂_x^order 𝒰^boundary[a](·, x)` for the chosen variant.
pub fn boundary_at(a: &TangentialField, x: f64, order: usize, variant: BoundaryVariant) -> Result<TangentialField> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("height {x} must be nonnegative")));
    }
    kernels::assemble_level(*a.grid(), boundary_eval(a, &[x], order, variant))
}

/// Per-mode `ℓ²` divergence residual `‖∂_x û_n + iξ′·û′‖ / ‖κ û‖` from
/// values and exact derivatives.
pub fn divergence_ratio(values: &TangentialField, derivatives: &TangentialField) -> f64 {
    let grid = values.grid();
    let n = values.components();
    let d = n - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..grid.modes() {
        if !grid.is_active(idx) {
            continue;
        }
        let xi = grid.wavevector(idx);
        let kappa = grid.kappa(idx);
        let mut r = derivatives.coeff(d, idx);
        for l in 0..d {
            r += I * xi[l] * values.coeff(l, idx);
        }
        num += r.norm_sqr();
        den += kappa * kappa * (0..n).map(|c| values.coeff(c, idx).norm_sqr()).sum::<f64>();
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// `u = 𝒰^boundary[a] + 𝒰^force[F]` together with what is needed to
/// evaluate it analytically at any height.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    /// Samples at slab centers; the tail is `u^w(∞)` when `F` has a tail.
    pub u: HalfSpaceField,
    pub boundary: TangentialField,
    /// `u^w[F](·, 0)`.
    pub whole_trace: TangentialField,
    /// `b = a − u^w[F](·, 0)`, the data of the boundary part.
    pub corrected: TangentialField,
    force: HalfSpaceField,
}

impl LinearSolution {
    pub fn force(&self) -> &HalfSpaceField {
        &self.force
    }

    pub fn into_field(self) -> HalfSpaceField {
        self.u
    }

    fn plan(&self) -> WholeSpacePlan {
        WholeSpacePlan::new(self.u.grid().ambient_dim())
    }

    /// `∂_x^order u(·, x)`, `order ∈ {0, 1}`.
    pub fn at(&self, x: f64, order: usize) -> Result<TangentialField> {
        let grid = *self.u.grid();
        let w = kernels::assemble_level(grid, self.plan().evaluate(&self.force, &[x], order == 1))?;
        let b = boundary_at(&self.corrected, x, order, BoundaryVariant::Amended)?;
        Ok(&w + &b)
    }

    /// `u^w[F]` at slab centers (and `∞` when present).
    pub fn whole_space(&self) -> Result<HalfSpaceField> {
        whole_space_solution(&self.force)
    }

    /// Divergence residual over slab centers and the tail, relative to `‖κû‖`.
    pub fn divergence_residual(&self) -> Result<f64> {
        let grid = *self.u.grid();
        let n = grid.ambient_dim();
        let with_tail = self.u.tail().is_some();
        let heights = kernels::field_heights(&grid, with_tail);
        let wd = self.plan().evaluate(&self.force, &heights, true);
        let bd = boundary_eval(&self.corrected, &heights, 1, BoundaryVariant::Amended);
        let mut raw = wd;
        for (r, b) in raw.iter_mut().zip(bd) {
            for (x, y) in r.iter_mut().zip(b) {
                *x += y;
            }
        }
        let der = kernels::assemble(grid, n, with_tail, raw)?;
        let (mut num, mut den) = (0.0f64, 0.0f64);
        let levels = self.u.slabs().iter().chain(self.u.tail()).zip(der.slabs().iter().chain(der.tail()));
        for (v, dv) in levels {
            let r = divergence_ratio(v, dv);
            let scale = v.coefficient_norm() * grid.kappa_max();
            num = num.max(r * scale);
            den = den.max(scale);
        }
        Ok(if den == 0.0 { num } else { num / den })
    }

    /// `‖u(·,0) − a‖_{Ḃ^{d/p−1}_{p,r}}` relative to `max(‖a‖, ‖u^w(0)‖)`.
    pub fn trace_residual(&self, p: f64, r: f64) -> Result<f64> {
        let grid = *self.u.grid();
        let idx = besov::boundary_index(grid.dim(), p, r);
        let err = &self.at(0.0, 0)? - &self.boundary;
        let scale = besov::besov_norm(&self.boundary, &idx).max(besov::besov_norm(&self.whole_trace, &idx));
        let e = besov::besov_norm(&err, &idx);
        Ok(if scale == 0.0 { e } else { e / scale })
    }

    /// Checks on `v := u − u^w = 𝒰^boundary[b]`: agreement of the sampled
    /// difference with the closed form, and the per-mode relations
    /// `(κ + ∂)ŵ_n = 0` with `ŵ_n = (κ + ∂)v̂_n`, `(κ + ∂)ŵ′ = 0` with
    /// `ŵ′ = v̂′ + (iξ′/κ)v̂_n`. Returns the largest relative residual.
    pub fn evolution_residual(&self) -> Result<f64> {
        let grid = *self.u.grid();
        let n = grid.ambient_dim();
        let d = n - 1;
        let heights = grid.slab_centers();
        let w = self.whole_space()?;
        let v_samples = self.u.axpy(-1.0, &w)?;
        let v = kernels::assemble(grid, n, false, boundary_eval(&self.corrected, &heights, 0, BoundaryVariant::Amended))?;
        let mut sample_err: f64 = 0.0;
        let mut sample_scale: f64 = 0.0;
        for (a, b) in v_samples.slabs().iter().zip(v.slabs()) {
            sample_err = sample_err.max((a - b).max_abs_coeff());
            sample_scale = sample_scale.max(b.max_abs_coeff()).max(a.max_abs_coeff());
        }
        let mut rel: f64 = if sample_scale == 0.0 { sample_err } else { sample_err / sample_scale };
        let b = &self.corrected;
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for idx in 0..grid.modes() {
            if !grid.is_active(idx) {
                continue;
            }
            let coeffs: Vec<Complex64> = (0..n).map(|c| b.coeff(c, idx)).collect();
            if coeffs.iter().all(|z| *z == ZERO) {
                continue;
            }
            let kappa = grid.kappa(idx);
            let xi = grid.wavevector(idx);
            let pq = boundary_coefficients(&coeffs, &xi, kappa, BoundaryVariant::Amended);
            for &x in &heights {
                let der = |c: usize, o: usize| exp_poly(pq[c].0, pq[c].1, kappa, x, o);
                // (κ + ∂)² v̂_n
                let rn = der(d, 0) * (kappa * kappa) + der(d, 1) * (2.0 * kappa) + der(d, 2);
                num = num.max(rn.norm() / (kappa * kappa));
                for l in 0..d {
                    let rot = I * (xi[l] / kappa);
                    let wl = der(l, 0) + rot * der(d, 0);
                    let dwl = der(l, 1) + rot * der(d, 1);
                    num = num.max((wl * kappa + dwl).norm() / kappa);
                }
                den = den.max((0..n).map(|c| der(c, 0).norm()).fold(0.0, f64::max));
            }
        }
        if den > 0.0 {
            rel = rel.max(num / den);
        } else {
            rel = rel.max(num);
        }
        Ok(rel)
    }
}

/// Solve the linear problem with boundary data `a` and force `F`.
pub fn linear_solve(a: &TangentialField, force: HalfSpaceField) -> Result<LinearSolution> {
    let n = check_force(&force)?;
    check_boundary(a, force.grid())?;
    let grid = *force.grid();
    let a = a.with_grid(grid);
    let with_tail = force.tail().is_some();
    let mut heights = vec![0.0];
    heights.extend(kernels::field_heights(&grid, with_tail));
    let raw = WholeSpacePlan::new(n).evaluate(&force, &heights, false);
    let nh = heights.len();
    let mut trace = Vec::with_capacity(n);
    let mut rest = Vec::with_capacity(n * (nh - 1));
    for (slot, v) in raw.into_iter().enumerate() {
        if slot % nh == 0 {
            trace.push(v);
        } else {
            rest.push(v);
        }
    }
    let whole_trace = kernels::assemble_level(grid, trace)?;
    let w = kernels::assemble(grid, n, with_tail, rest)?;
    let corrected = &a - &whole_trace;
    let b = boundary_operator(&corrected, &grid)?;
    let u = w.axpy(1.0, &b)?;
    if !u.max_abs_coeff().is_finite() {
        return Err(Error::Overflow("non-finite linear solution".into()));
    }
    Ok(LinearSolution { u, boundary: a, whole_trace, corrected, force })
}

/// `𝒰^force[F] = u^w[F] − 𝒰^boundary[u^w[F](·,0)]`.
pub fn force_operator(force: HalfSpaceField) -> Result<HalfSpaceField> {
    let grid = *force.grid();
    let zero = TangentialField::zeros(grid, grid.ambient_dim());
    Ok(linear_solve(&zero, force)?.u)
}

/// Random linear data: band-limited boundary values and a separable force.
pub fn random_data(grid: Grid, seed: u64, amplitude: f64) -> Result<(TangentialField, HalfSpaceField)> {
    let n = grid.ambient_dim();
    let mut rng = random::rng(seed);
    let kmax = (grid.points() / 4) as i64;
    let a = random::band_limited(grid, n, kmax, 1.0, &mut rng).scaled(amplitude);
    let f = random::separable(grid, n * n, kmax, 2, &mut rng)?.scaled(amplitude);
    Ok((a, f))
}

/// Separable force supported on `kmin ≤ |k|_∞ ≤ kmax`, as used by the
/// reflection oracle (low modes decay too slowly for its vertical period).
pub fn reflection_force(grid: Grid, kmin: i64, kmax: i64, rng: &mut random::DataRng) -> Result<HalfSpaceField> {
    let n = grid.ambient_dim();
    let f = random::separable(grid, n * n, kmax, 2, rng)?;
    f.map_slabs(|s| {
        let mut s = s.clone();
        let modes = grid.modes();
        for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
            let k = grid.wavenumber(i % modes);
            if k.iter().map(|v| v.abs()).max().unwrap_or(0) < kmin {
                *c = ZERO;
            }
        }
        Ok(s)
    })
}

/// `LHS/RHS` of the maximal-regularity estimate, `0` for zero data.
pub fn max_reg_ratio(sol: &LinearSolution, q: f64, q1: f64, p: f64, r: f64) -> Result<f64> {
    if !(q <= q1) {
        return Err(Error::Inadmissible(format!("q = {q} must not exceed q1 = {q1}")));
    }
    let grid = sol.u.grid();
    let d = grid.dim();
    let lhs_cl = besov::CLIndex::half_line(q1)?;
    let lhs_idx = besov::BesovIndex::new(d as f64 / p + 1.0 / q1 - 1.0, p, r)?;
    let (fc, fb) = besov::force_index(d, p, q, r);
    besov::CLIndex::new(fc.q, fc.a, fc.b)?;
    let rhs = besov::besov_norm(&sol.boundary, &besov::boundary_index(d, p, r)) + besov::chemin_lerner_norm(sol.force(), &fc, &fb);
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(besov::chemin_lerner_norm(&sol.u, &lhs_cl, &lhs_idx) / rhs)
}

/// Seeded maximal-regularity battery.
pub fn max_reg_check(grid: Grid, trials: usize, q: f64, q1: f64, p: f64, r: f64, seed: u64) -> Result<RatioReport> {
    let ratios = (0..trials as u64)
        .map(|t| {
            let (a, f) = random_data(grid, seed.wrapping_add(t), 1.0)?;
            max_reg_ratio(&linear_solve(&a, f)?, q, q1, p, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioReport::from_ratios(ratios))
}

/// Maximal-regularity ratios for several `(q, q₁)` pairs over the same
/// seeded linear solutions; one report per pair.
pub fn max_reg_battery(grid: Grid, trials: usize, pairs: &[(f64, f64)], p: f64, r: f64, seed: u64) -> Result<Vec<RatioReport>> {
    let mut ratios = vec![Vec::with_capacity(trials); pairs.len()];
    for t in 0..trials as u64 {
        let (a, f) = random_data(grid, seed.wrapping_add(t), 1.0)?;
        let sol = linear_solve(&a, f)?;
        for (slot, &(q, q1)) in ratios.iter_mut().zip(pairs) {
            slot.push(max_reg_ratio(&sol, q, q1, p, r)?);
        }
    }
    Ok(ratios.into_iter().map(RatioReport::from_ratios).collect())
}
