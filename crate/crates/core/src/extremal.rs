//! Best constants of the Stein-Weiss inequality at `p = 2`.
//!
//! With `g = |x|^α f` the problem is to maximize `Φ(g) = ‖T g‖_r^r` over the
//! unit sphere of `L²`, `T g = |x|^γ I_s(|x|^{-α} g)`. `Φ` is convex, so the
//! normalized gradient step `g ← ∇Φ(g)/‖∇Φ(g)‖` never decreases it. In terms
//! of `f` this is `f ← |x|^{-2α} I_s(|x|^{γr}|u|^{r-2}u)` with `u = I_s f`.
//! The discrete version keeps that property exactly because
//! [`RieszOperator::apply_symmetric`] is self-adjoint for the grid inner
//! product.
//!
//! The problem is dilation invariant, so iterates may drift in scale. Each
//! step is followed by a parabolic rescaling that puts the peak of
//! `t^{(n/2+α)/2}‖e^{tΔ}f‖_∞` at `t ≈ 1`.
//!
//! Only radial profiles are searched: the result is the radial best constant,
//! a lower bound for `S` wherever symmetry breaking could occur.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::heat::{HeatSemigroup, KernelMatrix};
use crate::params::{self, MaximizerMode, ParamSet, IDENTITY_TOLERANCE};
use crate::quad::{golden_max, log_space};
use crate::radial::{RadialFunction, RadialGrid};
use crate::riesz::RieszOperator;
use crate::special::{gamma, ln_gamma_complex};
use crate::math::Real;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 500;
/// Allowed relative decrease of the objective per step.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-12;
/// Negative values below this share of the sup are silently zeroed.
pub const CLIP_TOLERANCE: f64 = 1e-12;
/// Allowed disagreement between the Mellin multiplier and a direct potential.
pub const MELLIN_CROSS_TOLERANCE: f64 = 0.01;

/// Convergence also needs the weighted `L²` step below this multiple of `tol`.
pub const PROFILE_FACTOR: f64 = 10.0;

/// Cached heat times per decade and half-width in decades around `t = 1`,
/// used for the per-step rescaling.
const WINDOW_PER_DECADE: usize = 4;
const WINDOW_DECADES: f64 = 2.0;
/// Heat times per decade for one-off rescaling over the whole grid.
const WIDE_PER_DECADE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub mode: MaximizerMode,
    /// Rescale after every step. Off only for diagnostics.
    pub recenter: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            mode: MaximizerMode::Maximizer,
            recenter: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximizerRun {
    pub params: ParamSet,
    pub mode: MaximizerMode,
    /// `S_k = ‖|x|^γ I_s f_k‖_r` with `‖|x|^α f_k‖_2 = 1`; entry 0 is `f0`.
    pub objective_trace: Vec<f64>,
    /// `t_k` located by the rescaling, one per trace entry.
    pub rescale_trace: Vec<f64>,
    #[serde(skip)]
    pub final_profile: RadialFunction,
    pub s_estimate: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Rescalings skipped because on the truncated grid they would have
    /// lowered the objective.
    pub declined_shifts: usize,
    /// `‖|x|^α (f_k − f_{k−1})‖_2` at the last step, up to the component
    /// along infinitesimal dilations.
    pub profile_change: f64,
    pub warnings: Vec<Warning>,
}

/// Result of [`recenter`].
#[derive(Debug, Clone, PartialEq)]
pub struct Recentered {
    pub function: RadialFunction,
    pub t_star: f64,
    /// Grid shift applied: `f̃ = dilate(f, shift, n/2 + α)`.
    pub shift: isize,
    pub warnings: Vec<Warning>,
}

/// Locates `t* = argmax t^{(n/2+α)/2}‖e^{tΔ}f‖_∞` on a fixed ladder of times,
/// refined by a parabola in `ln t`.
struct Rescaler {
    heat: HeatSemigroup,
    exponent: f64,
    dilation: f64,
    times: Vec<f64>,
    cached: Option<Vec<KernelMatrix>>,
}

impl Rescaler {
    fn new(dim: usize, alpha: f64, times: Vec<f64>) -> Result<Self> {
        let dilation = 0.5 * dim as f64 + alpha;
        Ok(Self {
            heat: HeatSemigroup::new(dim)?,
            exponent: 0.5 * dilation,
            dilation,
            times,
            cached: None,
        })
    }

    /// Times spanning the scales the grid can represent.
    fn wide(grid: &RadialGrid, alpha: f64) -> Result<Self> {
        let lo = (4.0 * grid.r_min()).powi(2);
        let hi = (0.25 * grid.r_max()).powi(2);
        let count = ((hi / lo).log10() * WIDE_PER_DECADE as f64).ceil() as usize + 1;
        Self::new(grid.dim(), alpha, log_space(lo, hi, count))
    }

    /// Heat matrices for a window around `t = 1`, built once.
    fn window(grid: &Arc<RadialGrid>, alpha: f64) -> Result<Self> {
        let w = 10f64.powf(WINDOW_DECADES);
        let count = (2.0 * WINDOW_DECADES * WINDOW_PER_DECADE as f64) as usize + 1;
        let mut r = Self::new(grid.dim(), alpha, log_space(1.0 / w, w, count))?;
        let mats = r.times.iter().map(|&t| r.heat.matrix(grid, t)).collect::<Result<_>>()?;
        r.cached = Some(mats);
        Ok(r)
    }

    fn profile(&self, f: &RadialFunction, i: usize) -> Result<f64> {
        let t = self.times[i];
        let evolved = match &self.cached {
            Some(m) => m[i].apply(f)?,
            None => self.heat.apply(f, t)?,
        };
        Ok(self.exponent * t.ln() + evolved.sup_abs().ln())
    }

    /// `(t*, attained at a ladder end)`.
    fn t_star(&self, f: &RadialFunction) -> Result<(f64, bool)> {
        let v: Vec<f64> = (0..self.times.len()).map(|i| self.profile(f, i)).collect::<Result<_>>()?;
        let k = (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
        if k == 0 || k + 1 == v.len() {
            return Ok((self.times[k], true));
        }
        // Vertex of the parabola through three equally spaced points in ln t.
        let h = (self.times[k + 1] / self.times[k]).ln();
        let curv = v[k - 1] - 2.0 * v[k] + v[k + 1];
        let offset = if curv < 0.0 { 0.5 * h * (v[k - 1] - v[k + 1]) / curv } else { 0.0 };
        Ok((self.times[k] * offset.clamp(-h, h).exp(), false))
    }

    fn recenter(&self, f: &RadialFunction) -> Result<Recentered> {
        let (t_star, endpoint) = self.t_star(f)?;
        let mut warnings = Vec::new();
        if endpoint {
            warnings.push(Warning::EndpointSupremum { t: t_star });
        }
        // f̃(x) = t^{a/2} f(t^{1/2}x) with exp(kΔ) ≈ t^{1/2}.
        let shift = (0.5 * t_star.ln() / f.grid().log_step()).round() as isize;
        let d = f.dilate(shift, self.dilation);
        warnings.extend(d.warning());
        Ok(Recentered {
            function: d.function,
            t_star,
            shift,
            warnings,
        })
    }
}

/// Parabolic rescaling `f̃(x) = t*^{(n/2+α)/2} f(t*^{1/2}x)`, rounded to the
/// nearest grid shift. `‖|x|^α f̃‖_2` and the Stein-Weiss quotient are those
/// of `f` up to mass moved across the grid ends.
pub fn recenter(f: &RadialFunction, ps: &ParamSet) -> Result<Recentered> {
    let alpha = ps.alpha.ok_or(Error::MissingFields(alloc::vec!["alpha"]))?;
    if f.is_zero() {
        return Err(Error::invalid("cannot rescale the zero function"));
    }
    Rescaler::wide(f.grid(), alpha)?.recenter(f)
}

fn objective(op: &RieszOperator, f: &RadialFunction, r: f64, gamma: f64) -> Result<f64> {
    Ok(op.apply_symmetric(f)?.norm(r, gamma))
}

/// Zeroes negative values; reports them if they exceed rounding noise.
fn clip(f: &RadialFunction, warnings: &mut Vec<Warning>) -> RadialFunction {
    let sup = f.sup_abs();
    let worst = f.values().iter().fold(0.0f64, |m, &v| m.max(-v));
    if worst > CLIP_TOLERANCE * sup {
        warnings.push(Warning::SignClipped { magnitude: worst / sup });
    }
    f.map(|_, v| v.max(0.0))
}

fn normalized(f: &RadialFunction, alpha: f64) -> Result<RadialFunction> {
    let norm = f.norm(2.0, alpha);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Numerical(format!("cannot normalize iterate with weighted norm {norm}")));
    }
    Ok(f.scaled(1.0 / norm))
}

/// `‖|x|^α (g − f − cGf)‖_2` minimized over `c`, where
/// `Gf = (n/2+α) f + r f'` generates the norm-preserving dilations. The
/// quotient is dilation invariant, so drift along that orbit is not change.
fn change_modulo_dilation(g: &RadialFunction, f: &RadialFunction, alpha: f64) -> Result<f64> {
    let a = 0.5 * f.grid().dim() as f64 + alpha;
    let d = g.combine(1.0, f, -1.0)?;
    let gen = f.combine(a, &f.radial_gradient().map(|r, v| r * v), 1.0)?;
    let (gg, dd) = (gen.norm(2.0, alpha), d.norm(2.0, alpha));
    if !(gg > 0.0) {
        return Ok(dd);
    }
    // Polarization gives the weighted inner product from norms.
    let dot = 0.25 * (d.combine(1.0, &gen, 1.0)?.norm(2.0, alpha).powi(2) - d.combine(1.0, &gen, -1.0)?.norm(2.0, alpha).powi(2));
    Ok(d.combine(1.0, &gen, -dot / (gg * gg))?.norm(2.0, alpha))
}

struct Problem {
    op: RieszOperator,
    r: f64,
    alpha: f64,
    gamma: f64,
}

impl Problem {
    /// `|x|^{-2α} I_s(|x|^{γr}|u|^{r-2}u)` for `u = I_s f`, before normalization.
    fn step(&self, f: &RadialFunction) -> Result<RadialFunction> {
        let (r, g) = (self.r, self.gamma);
        let u = self.op.apply_symmetric(f)?;
        let h = u.map(|rho, v| rho.powf(g * r) * v.abs().powf(r - 2.0) * v);
        let a = self.alpha;
        Ok(self.op.apply_symmetric(&h)?.map(|rho, v| rho.powf(-2.0 * a) * v))
    }

    fn objective(&self, f: &RadialFunction) -> Result<f64> {
        objective(&self.op, f, self.r, self.gamma)
    }
}

/// Normalized nonlinear power iteration for the Stein-Weiss maximizer.
/// In [`MaximizerMode::NormEstimate`] `r = 2` is admitted and the result is
/// an estimate of the operator norm, not a maximizer.
pub fn power_iterate(ps: &ParamSet, f0: &RadialFunction, opts: &SolverOptions) -> Result<MaximizerRun> {
    params::validate_maximizer_mode(ps, opts.mode)?.into_result()?;
    let (s, r, alpha, gamma) = match (ps.s, ps.r, ps.alpha, ps.gamma) {
        (Some(s), Some(r), Some(a), Some(g)) => (s, r, a, g),
        _ => return Err(Error::MissingFields(alloc::vec!["s", "r", "alpha", "gamma"])),
    };
    if f0.values().iter().any(|&v| v < 0.0) || f0.is_zero() {
        return Err(Error::invalid("initial profile must be nonnegative and nonzero"));
    }
    let grid = f0.grid().clone();
    let problem = Problem {
        op: RieszOperator::new(&grid, s)?,
        r,
        alpha,
        gamma,
    };
    let mut warnings = Vec::new();
    let mut f = normalized(f0, alpha)?;
    let mut t0 = 1.0;
    // Norm estimates have no maximizer to keep in place.
    let window = if opts.recenter && opts.mode == MaximizerMode::Maximizer {
        let first = Rescaler::wide(&grid, alpha)?.recenter(&f)?;
        warnings.extend(first.warnings);
        t0 = first.t_star;
        f = normalized(&first.function, alpha)?;
        Some(Rescaler::window(&grid, alpha)?)
    } else {
        None
    };
    let mut s_k = problem.objective(&f)?;
    let mut objective_trace = alloc::vec![s_k];
    let mut rescale_trace = alloc::vec![t0];
    let mut converged = false;
    let mut declined_shifts = 0;
    let mut iterations = 0;
    let mut profile_change = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut next = normalized(&clip(&problem.step(&f)?, &mut warnings), alpha)?;
        let mut s_next = problem.objective(&next)?;
        let mut t_k = 1.0;
        if let Some(w) = &window {
            let rc = w.recenter(&next)?;
            t_k = rc.t_star;
            if rc.shift != 0 {
                let moved = normalized(&rc.function, alpha)?;
                let s_moved = problem.objective(&moved)?;
                if s_moved >= s_next * (1.0 - MONOTONICITY_TOLERANCE) && rc.warnings.is_empty() {
                    next = moved;
                    s_next = s_moved;
                } else {
                    declined_shifts += 1;
                }
            }
        }
        if s_next < s_k * (1.0 - MONOTONICITY_TOLERANCE) {
            return Err(Error::Monotonicity {
                step: iterations,
                previous: s_k,
                current: s_next,
            });
        }
        objective_trace.push(s_next);
        rescale_trace.push(t_k);
        let change = (s_next - s_k).abs();
        profile_change = change_modulo_dilation(&next, &f, alpha)?;
        f = next;
        s_k = s_next;
        // S is flat at a maximum, so the profile is held to its own criterion.
        if change < opts.tol * objective_trace[objective_trace.len() - 2] && profile_change < PROFILE_FACTOR * opts.tol {
            converged = true;
            break;
        }
    }
    warnings.dedup_by(|a, b| core::mem::discriminant(a) == core::mem::discriminant(b));
    Ok(MaximizerRun {
        params: *ps,
        mode: opts.mode,
        objective_trace,
        rescale_trace,
        final_profile: f,
        s_estimate: s_k,
        converged,
        iterations,
        declined_shifts,
        profile_change,
        warnings,
    })
}

/// One further step from `run.final_profile`: the changes in `S` (relative)
/// and in the profile (weighted `L²`).
pub fn fixed_point_residual(run: &MaximizerRun) -> Result<(f64, f64)> {
    let ps = &run.params;
    let f = &run.final_profile;
    let alpha = ps.alpha.unwrap_or(0.0);
    let problem = Problem {
        op: RieszOperator::new(f.grid(), ps.s.unwrap_or(0.0))?,
        r: ps.r.unwrap_or(2.0),
        alpha,
        gamma: ps.gamma.unwrap_or(0.0),
    };
    let next = normalized(&problem.step(f)?.map(|_, v| v.max(0.0)), alpha)?;
    let ds = (problem.objective(&next)? - run.s_estimate).abs() / run.s_estimate;
    let df = next.combine(1.0, f, -1.0)?.norm(2.0, alpha);
    Ok((ds, df))
}

/// `I_s |x|^{-λ} = m(λ)|x|^{s-λ}` for `s < Re λ < n`:
/// `m(λ) = 2^{-s} Γ((n-λ)/2)Γ((λ-s)/2) / (Γ(λ/2)Γ((n-λ+s)/2))`.
pub fn power_multiplier(n: usize, s: f64, lambda: Complex64) -> Complex64 {
    let n = n as f64;
    let lg = |z: Complex64| ln_gamma_complex(z);
    let e = lg((n - lambda) * 0.5) + lg((lambda - s) * 0.5) - lg(lambda * 0.5) - lg((n + s - lambda) * 0.5);
    e.exp() * 2f64.powf(-s)
}

/// Multiplier of `g ↦ |x|^{α-s} I_s(|x|^{-α} g)` on `|x|^{-n/2+iτ}`, the
/// radial Mellin modes of `L²(ℝ^n)`.
pub fn mellin_multiplier(n: usize, s: f64, alpha: f64, tau: f64) -> Complex64 {
    power_multiplier(n, s, Complex64::new(0.5 * n as f64 + alpha, -tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MellinOracle {
    /// `sup_τ |M(τ)|`: the norm of `f ↦ |x|^γ I_s f` from `L²(|x|^{2α})`
    /// to `L²` on radial functions.
    pub value: f64,
    pub tau_star: f64,
    /// Relative gap between `m(n/2+α)` and the multiplier read off a direct
    /// potential of a truncated power.
    pub cross_check: f64,
}

/// Operator norm at `p = r = 2`, where `γ = α − s`. The only degenerate
/// directions are the poles `α → n/2` and `α → s − n/2`, which are the
/// Stein-Weiss conditions `α < n/p′` and `γ > −n/r`; they are rejected first.
pub fn mellin_oracle(ps: &ParamSet, grid: &Arc<RadialGrid>) -> Result<MellinOracle> {
    let mut two = *ps;
    two.p.get_or_insert(2.0);
    two.r.get_or_insert(2.0);
    params::validate_maximizer_mode(&two, MaximizerMode::NormEstimate)?.into_result()?;
    let (p, r) = (two.p.unwrap(), two.r.unwrap());
    if p != 2.0 || r != 2.0 {
        return Err(Error::invalid("the Mellin oracle needs p = r = 2"));
    }
    let (n, s, alpha, gamma) = (grid.dim(), two.s.unwrap(), two.alpha.unwrap(), two.gamma.unwrap());
    if two.n.is_some_and(|m| m != n) {
        return Err(Error::invalid("grid dimension differs from n"));
    }
    if (gamma - (alpha - s)).abs() > IDENTITY_TOLERANCE {
        return Err(Error::Validation(alloc::vec![String::from("γ = α − s required")]));
    }
    let modulus = |tau: f64| mellin_multiplier(n, s, alpha, tau).norm();
    // |M| decays like |τ|^{-s}; a scan over [0, 40] brackets the peak.
    let taus = (0..=400).map(|i| 0.1 * i as f64);
    let (k, _) = taus
        .clone()
        .map(modulus)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    let lo = (0.1 * k as f64 - 0.1).max(0.0);
    let (tau_star, value) = golden_max(lo, 0.1 * k as f64 + 0.1, 60, modulus);
    let (tau_star, value) = if modulus(0.0) >= value { (0.0, modulus(0.0)) } else { (tau_star, value) };
    let cross_check = power_cross_check(grid, s, 0.5 * n as f64 + alpha)?;
    if cross_check > MELLIN_CROSS_TOLERANCE {
        return Err(Error::Numerical(format!(
            "Mellin multiplier disagrees with the direct potential by {cross_check:e}"
        )));
    }
    Ok(MellinOracle {
        value,
        tau_star,
        cross_check,
    })
}

/// `|u(r) r^{λ-s} / m(λ) − 1|` for `u = I_s` of `|x|^{-λ}` sampled on the grid,
/// read at the node where the two truncation errors balance.
fn power_cross_check(grid: &Arc<RadialGrid>, s: f64, lambda: f64) -> Result<f64> {
    let n = grid.dim() as f64;
    let f = RadialFunction::from_fn(grid, |r| r.powf(-lambda))?;
    let u = RieszOperator::new(grid, s)?.apply(&f)?;
    // Missing mass scales like (r/r_max)^{λ-s} above and (r_min/r)^{n-λ} below.
    let (a, b) = (lambda - s, n - lambda);
    let ln_r = (a * grid.r_max().ln() + b * grid.r_min().ln()) / (a + b);
    let i = grid.nearest_index(ln_r.exp());
    let r = grid.nodes()[i];
    let read = u.values()[i] * r.powf(lambda - s);
    let exact = power_multiplier(grid.dim(), s, Complex64::new(lambda, 0.0)).re;
    Ok((read / exact - 1.0).abs())
}

/// Stein-Weiss quotient of the unweighted conformal extremal at
/// `p = 2`, `r = 2n/(n−2s)`. With `U = (1+|x|²)^{-(n−2s)/2}` one has
/// `(−Δ)^s U = c U^{r−1}`, `c = 4^s Γ((n+2s)/2)/Γ((n−2s)/2)`, so
/// `f = c I_s(U^{r−1})` satisfies `I_s f = U`; the quotient is `‖U‖_r/‖f‖_2`.
pub fn known_extremal_quotient(grid: &Arc<RadialGrid>, s: f64) -> Result<f64> {
    let n = grid.dim() as f64;
    if !(s > 0.0 && s < 0.5 * n) {
        return Err(Error::Validation(alloc::vec![String::from("0 < s < n/2 required")]));
    }
    let u = RadialFunction::from_fn(grid, |r| (1.0 + r * r).powf(-0.5 * (n - 2.0 * s)))?;
    profile_quotient(&u, s)
}

/// `‖U‖_r / ‖c I_s(U^{r−1})‖_2` for a sampled profile `U`.
pub fn profile_quotient(u: &RadialFunction, s: f64) -> Result<f64> {
    let n = u.grid().dim() as f64;
    let r = 2.0 * n / (n - 2.0 * s);
    let c = 4f64.powf(s) * gamma(0.5 * (n + 2.0 * s)) / gamma(0.5 * (n - 2.0 * s));
    let f = RieszOperator::new(u.grid(), s)?.apply(&u.map(|_, v| v.abs().powf(r - 1.0)))?;
    Ok(u.extended_lp_norm(r, 0.0)? / (c * f.extended_lp_norm(2.0, 0.0)?))
}

/// `f = c I_s(U^{r−1})`, the `L²` profile whose potential is the conformal extremal.
pub fn conformal_extremal(grid: &Arc<RadialGrid>, s: f64) -> Result<RadialFunction> {
    let n = grid.dim() as f64;
    let r = 2.0 * n / (n - 2.0 * s);
    let c = 4f64.powf(s) * gamma(0.5 * (n + 2.0 * s)) / gamma(0.5 * (n - 2.0 * s));
    let u = RadialFunction::from_fn(grid, |x| (1.0 + x * x).powf(-0.5 * (n - 2.0 * s)))?;
    Ok(RieszOperator::new(grid, s)?.apply(&u.map(|_, v| v.powf(r - 1.0)))?.scaled(c))
}
