//! Homogeneous Besov and Chemin–Lerner norms, scaling, and the empirical
//! bilinear-estimate verifier.
//!
//! Exponents are `f64` with `f64::INFINITY` standing for `∞`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{HalfSpaceField, TangentialField};
use crate::fft;
use crate::grid::Grid;
use crate::random;
use crate::spectral;

/// Exponents `(s, p, r)` of `Ḃ^s_{p,r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("r", r)?;
        if !s.is_finite() {
            return Err(Error::Inadmissible(format!("regularity s = {s} must be finite")));
        }
        Ok(Self { s, p, r })
    }
}

/// Vertical exponent `q` and interval `(a, b)`, `b` possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLIndex {
    pub q: f64,
    pub a: f64,
    pub b: f64,
}

impl CLIndex {
    pub fn new(q: f64, a: f64, b: f64) -> Result<Self> {
        check_exponent("q", q)?;
        if !(a >= 0.0 && a < b) || a.is_infinite() {
            return Err(Error::Inadmissible(format!("interval ({a}, {b}) must satisfy 0 <= a < b")));
        }
        Ok(Self { q, a, b })
    }

    /// Interval `(0, ∞)`.
    pub fn half_line(q: f64) -> Result<Self> {
        Self::new(q, 0.0, f64::INFINITY)
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v >= 1.0 {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!("{name} = {v} must lie in [1, ∞]")))
    }
}

/// `‖(x_j)‖_{ℓ^r}`; infinite entries propagate.
pub fn lr_norm(values: &[f64], r: f64) -> f64 {
    if values.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    if r.is_infinite() {
        values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    } else if r == 1.0 {
        values.iter().map(|v| v.abs()).sum()
    } else {
        values.iter().map(|v| v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `L^p` norm on the torus of pointwise Euclidean magnitudes.
pub fn lp_norm(f: &TangentialField, p: f64) -> f64 {
    let grid = f.grid();
    if p == 2.0 {
        return (grid.period().powi(grid.dim() as i32)).sqrt() * f.coefficient_norm();
    }
    let modes = grid.modes();
    let phys = f.to_physical();
    let mag: Vec<f64> = (0..modes)
        .map(|i| (0..f.components()).map(|c| phys[c * modes + i].powi(2)).sum::<f64>().sqrt())
        .collect();
    physical_lp(&mag, grid.cell_volume(), p)
}

fn physical_lp(mag: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        mag.iter().fold(0.0, |m, &v| m.max(v))
    } else if p == 1.0 {
        cell * mag.iter().sum::<f64>()
    } else {
        (cell * mag.iter().map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

/// `‖Δ_j f‖_{L^p}` for every `j` in the dyadic range (increasing `j`).
pub fn block_norms(f: &TangentialField, p: f64) -> Vec<f64> {
    let grid = *f.grid();
    let range = grid.dyadic_range();
    let table = grid.frequency_table();
    let modes = grid.modes();
    if p == 2.0 {
        // Parseval per block
        let energy: Vec<f64> = (0..modes)
            .map(|i| (0..f.components()).map(|c| f.coeff(c, i).norm_sqr()).sum())
            .collect();
        let vol = grid.period().powi(grid.dim() as i32);
        return range
            .iter()
            .map(|j| {
                let s: f64 = table
                    .iter()
                    .zip(&energy)
                    .filter(|(_, e)| **e > 0.0)
                    .map(|((_, k), e)| spectral::block_symbol(j, *k).powi(2) * e)
                    .sum();
                (vol * s).sqrt()
            })
            .collect();
    }
    let (n, d) = (grid.points(), grid.dim());
    range
        .iter()
        .map(|j| {
            let weights: Vec<f64> = table.iter().map(|(_, k)| spectral::block_symbol(j, *k)).collect();
            let mut mag = vec![0.0; modes];
            for c in 0..f.components() {
                let mut data: Vec<_> = f.component(c).iter().zip(&weights).map(|(z, w)| z * w).collect();
                fft::inverse(&mut data, n, d);
                for (m, z) in mag.iter_mut().zip(&data) {
                    *m += z.re * z.re;
                }
            }
            for m in &mut mag {
                *m = m.sqrt();
            }
            physical_lp(&mag, grid.cell_volume(), p)
        })
        .collect()
}

/// `‖f‖_{Ḃ^s_{p,r}} = ‖2^{sj}‖Δ_j f‖_{L^p}‖_{ℓ^r}`.
pub fn besov_norm(f: &TangentialField, idx: &BesovIndex) -> f64 {
    let range = f.grid().dyadic_range();
    let weighted: Vec<f64> = range
        .iter()
        .zip(block_norms(f, idx.p))
        .map(|(j, b)| 2f64.powf(idx.s * j as f64) * b)
        .collect();
    lr_norm(&weighted, idx.r)
}

/// Per-block `‖Δ_j u‖_{L^q(a, b; L^p)}`, with `+∞` for a nonzero tail block
/// on an unbounded interval when `q < ∞`.
pub fn vertical_block_norms(u: &HalfSpaceField, cl: &CLIndex, p: f64) -> Vec<f64> {
    let grid = *u.grid();
    let h = grid.slab_width();
    let x_max = grid.height();
    let overlaps: Vec<(usize, f64)> = (0..grid.slabs())
        .map(|m| {
            let lo = (m as f64 * h).max(cl.a);
            let hi = ((m + 1) as f64 * h).min(cl.b);
            (m, (hi - lo).max(0.0))
        })
        .filter(|(_, w)| *w > 0.0)
        .collect();
    let slab_norms: Vec<Vec<f64>> = overlaps.par_iter().map(|(m, _)| block_norms(u.slab(*m), p)).collect();
    let tail_weight = if cl.b > x_max { cl.b - cl.a.max(x_max) } else { 0.0 };
    let tail_norms = match u.tail() {
        Some(t) if tail_weight > 0.0 => Some(block_norms(t, p)),
        _ => None,
    };
    let blocks = grid.dyadic_range().len();
    (0..blocks)
        .map(|b| {
            if cl.q.is_infinite() {
                let mut m = slab_norms.iter().fold(0.0f64, |acc, s| acc.max(s[b]));
                if let Some(t) = &tail_norms {
                    m = m.max(t[b]);
                }
                m
            } else {
                let mut acc: f64 = overlaps.iter().zip(&slab_norms).map(|((_, w), s)| w * s[b].powf(cl.q)).sum();
                if let Some(t) = &tail_norms {
                    if t[b] > 0.0 {
                        if tail_weight.is_infinite() {
                            return f64::INFINITY;
                        }
                        acc += tail_weight * t[b].powf(cl.q);
                    }
                }
                acc.powf(1.0 / cl.q)
            }
        })
        .collect()
}

/// `‖u‖_{L̃^q(a,b; Ḃ^s_{p,r})}`; may be `+∞`.
pub fn chemin_lerner_norm(u: &HalfSpaceField, cl: &CLIndex, idx: &BesovIndex) -> f64 {
    let range = u.grid().dyadic_range();
    let weighted: Vec<f64> = range
        .iter()
        .zip(vertical_block_norms(u, cl, idx.p))
        .map(|(j, b)| 2f64.powf(idx.s * j as f64) * b)
        .collect();
    lr_norm(&weighted, idx.r)
}

/// `q_* = max(2, q)`.
pub fn q_star(q: f64) -> f64 {
    q.max(2.0)
}

/// Hölder conjugate, with `1′ = ∞` and `∞′ = 1`.
pub fn conjugate(q: f64) -> f64 {
    if q.is_infinite() {
        1.0
    } else if q == 1.0 {
        f64::INFINITY
    } else {
        q / (q - 1.0)
    }
}

/// Hypotheses shared by the bilinear lemma and the existence theorem:
/// `1 <= p < q_*′(n−1)`, `1 <= q, r <= ∞`, and `q < ∞` when `n = 3`.
pub fn check_exponents(n: usize, p: f64, q: f64, r: f64) -> Result<()> {
    if !(3..=4).contains(&n) {
        return Err(Error::Inadmissible(format!("dimension n = {n} not in {{3, 4}}")));
    }
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_exponent("r", r)?;
    let bound = conjugate(q_star(q)) * (n - 1) as f64;
    if !(p < bound) {
        return Err(Error::Inadmissible(format!("p < q_*'(n-1) violated: p = {p}, bound {bound}")));
    }
    if n == 3 && q.is_infinite() {
        return Err(Error::Inadmissible("q < ∞ required when n = 3".into()));
    }
    Ok(())
}

/// Solution-space index `L̃^{q*}(Ḃ^{d/p+1/q*−1}_{p,r})` on `(0, ∞)`.
pub fn solution_index(d: usize, p: f64, q: f64, r: f64) -> (CLIndex, BesovIndex) {
    let qs = q_star(q);
    let s = d as f64 / p + 1.0 / qs - 1.0;
    (CLIndex { q: qs, a: 0.0, b: f64::INFINITY }, BesovIndex { s, p, r })
}

/// Product-space index `L̃^{q*/2}(Ḃ^{d/p+2/q*−2}_{p,r})` on `(0, ∞)`.
pub fn product_index(d: usize, p: f64, q: f64, r: f64) -> (CLIndex, BesovIndex) {
    let qs = q_star(q);
    let s = d as f64 / p + 2.0 / qs - 2.0;
    (CLIndex { q: qs / 2.0, a: 0.0, b: f64::INFINITY }, BesovIndex { s, p, r })
}

/// Force-space index `L̃^q(Ḃ^{d/p+1/q−2}_{p,r})` on `(0, ∞)`.
pub fn force_index(d: usize, p: f64, q: f64, r: f64) -> (CLIndex, BesovIndex) {
    let s = d as f64 / p + 1.0 / q - 2.0;
    (CLIndex { q, a: 0.0, b: f64::INFINITY }, BesovIndex { s, p, r })
}

/// Boundary-data index `Ḃ^{d/p−1}_{p,r}`.
pub fn boundary_index(d: usize, p: f64, r: f64) -> BesovIndex {
    BesovIndex { s: d as f64 / p - 1.0, p, r }
}

/// Ratio of the bilinear estimate, `0` when either factor vanishes.
pub fn bilinear_ratio(f: &HalfSpaceField, g: &HalfSpaceField, p: f64, q: f64, r: f64) -> Result<f64> {
    let d = f.grid().dim();
    let (xc, xb) = solution_index(d, p, q, r);
    let (pc, pb) = product_index(d, p, q, r);
    let nf = chemin_lerner_norm(f, &xc, &xb);
    let ng = chemin_lerner_norm(g, &xc, &xb);
    if nf == 0.0 || ng == 0.0 {
        return Ok(0.0);
    }
    let fg = spectral::outer_product_field(f, g)?;
    Ok(chemin_lerner_norm(&fg, &pc, &pb) / (nf * ng))
}

/// Summary of a randomized battery of ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub median: f64,
}

impl RatioReport {
    /// Statistics over the nonzero ratios.
    pub fn from_ratios(ratios: Vec<f64>) -> Self {
        let mut live: Vec<f64> = ratios.iter().copied().filter(|r| *r != 0.0).collect();
        live.sort_by(|a, b| a.total_cmp(b));
        let max = live.last().copied().unwrap_or(0.0);
        let median = if live.is_empty() {
            0.0
        } else if live.len() % 2 == 1 {
            live[live.len() / 2]
        } else {
            0.5 * (live[live.len() / 2 - 1] + live[live.len() / 2])
        };
        Self { ratios, max, median }
    }

    pub fn all_finite(&self) -> bool {
        self.ratios.iter().all(|r| r.is_finite())
    }
}

/// Random scalar factors for one bilinear trial.
pub fn bilinear_pair(grid: Grid, trial: u64, seed: u64) -> Result<(HalfSpaceField, HalfSpaceField)> {
    let mut rng = random::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(trial));
    let kmax = (grid.points() / 4) as i64;
    let f = random::separable(grid, 1, kmax, 2, &mut rng)?;
    let g = random::separable(grid, 1, kmax, 2, &mut rng)?;
    Ok((f, g))
}

/// Randomized check of `‖fg‖ <= C‖f‖‖g‖` on the desk grid for dimension `n`.
pub fn bilinear_estimate_check(trials: usize, grid: Grid, p: f64, q: f64, r: f64, seed: u64) -> Result<RatioReport> {
    check_exponents(grid.ambient_dim(), p, q, r)?;
    let ratios = (0..trials as u64)
        .map(|t| {
            let (f, g) = bilinear_pair(grid, t, seed)?;
            bilinear_ratio(&f, &g, p, q, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioReport::from_ratios(ratios))
}

/// `(x, ‖Δ_j e^{−x|∇′|} f‖_{L^p} / ‖Δ_j f‖_{L^p})` at the given heights;
/// empty when `Δ_j f = 0`.
pub fn semigroup_block_ratios(f: &TangentialField, j: i32, p: f64, heights: &[f64]) -> Result<Vec<(f64, f64)>> {
    let base = lp_norm(&spectral::lp_block(j, f)?, p);
    if base == 0.0 {
        return Ok(Vec::new());
    }
    heights
        .iter()
        .map(|&x| {
            let v = spectral::lp_block(j, &spectral::poisson_apply(x, f)?)?;
            Ok((x, lp_norm(&v, p) / base))
        })
        .collect()
}
