//! The Riesz potential `I_s = (-Δ)^{-s/2}` on radial profiles: a direct
//! kernel discretization, the truncated kernels, and the heat-semigroup
//! representation used to cross-check it.
//!
//! Writing `r = e^x`, `ρ = e^y`, the radial kernel factors as
//! `k_s(r,ρ) = (rρ)^{(s-n)/2} E(x - y)` with
//! `E(z) = |S^{n-2}| ∫_0^π (4 sinh²(z/2) + 4 sin²(θ/2))^{(s-n)/2} sin^{n-2}θ dθ`,
//! so `I_s f` is a convolution in `ln r`. The density `h(y) = e^{(n+s)y/2} f(e^y)`
//! is replaced by its cubic interpolant and the convolution weights
//! `V(m) = Δ ∫ E((m - t)Δ) L(t) dt` are integrated exactly up to quadrature,
//! with the diagonal singularity of `E` handled by graded rules.

mod heat_rep;
mod truncated;

use alloc::sync::Arc;
use alloc::vec::Vec;

pub use heat_rep::{riesz_apply_heat, HeatRepresentation, LowFrequencyBound, RieszTimes, SplitParts};

use crate::error::{Error, Result, Warning};
use crate::heat::{KernelKind, KernelMatrix};
use crate::quad::GaussLegendre;
use crate::radial::{grid_lagrange_kernel, RadialFunction, RadialGrid};
use crate::special::{riesz_constant, sphere_area};
use crate::math::Real;

pub const DEFAULT_QUADRATURE_ORDER: usize = 16;
/// Tail contributions above this share of the result are reported.
pub const TAIL_TOLERANCE: f64 = 1e-6;
/// `-ln` of the relative size of the last density term kept below `r_min`.
const ORIGIN_CUTOFF: f64 = 40.0;

/// `E(z)` for fixed `n` and `s`.
#[derive(Debug, Clone)]
pub(crate) struct LogKernel {
    dim: usize,
    s: f64,
    subsphere: f64,
    gl: GaussLegendre,
}

impl LogKernel {
    pub(crate) fn new(dim: usize, s: f64, order: usize) -> Self {
        Self {
            dim,
            s,
            subsphere: sphere_area(dim - 1),
            gl: GaussLegendre::new(order),
        }
    }

    pub(crate) fn eval(&self, z: f64) -> f64 {
        // a = 0 only on the diagonal itself, which the quadratures never hit;
        // the floor keeps the piece loop short regardless.
        let a = (2.0 * (0.5 * z).sinh().abs()).max(1e-150);
        let a2 = a * a;
        let expo = 0.5 * (self.s - self.dim as f64);
        let m = self.dim as i32 - 2;
        let integrand = |th: f64| {
            let h = (0.5 * th).sin();
            (a2 + 4.0 * h * h).powf(expo) * th.sin().powi(m)
        };
        // Pieces [0, a], [a, 2a], [2a, 4a], ... resolve the peak of width a at θ = 0.
        let pi = core::f64::consts::PI;
        let mut total = 0.0;
        let mut lo = 0.0;
        let mut hi = a.min(pi);
        loop {
            total += self.gl.integrate(lo, hi, integrand);
            if hi >= pi {
                break;
            }
            lo = hi;
            hi = (2.0 * hi).min(pi);
        }
        self.subsphere * total
    }
}

/// `V(m)` for `m = 0, 1, …, count - 1`; `V` is even in `m`.
fn convolution_weights(kernel: &LogKernel, log_step: f64, count: usize, order: usize) -> Vec<f64> {
    let gl = GaussLegendre::new(order);
    let sing_order = kernel.s.min(1.0);
    crate::par::map_rows(count, |m| {
        let mf = m as f64;
        let f = |t: f64| kernel.eval((mf - t) * log_step) * grid_lagrange_kernel(t);
        let mut total = 0.0;
        for k in -2..2 {
            let (a, b) = (k as f64, k as f64 + 1.0);
            // Next to the singularity at t = m, integrate in the distance v = |t - m|
            // so that tiny offsets are not lost to rounding.
            total += if a == mf {
                gl.integrate_endpoint_singular(0.0, 1.0, sing_order, |v| {
                    kernel.eval(v * log_step) * grid_lagrange_kernel(a + v)
                })
            } else if b == mf {
                gl.integrate_endpoint_singular(0.0, 1.0, sing_order, |v| {
                    kernel.eval(v * log_step) * grid_lagrange_kernel(b - v)
                })
            } else {
                gl.integrate(a, b, f)
            };
        }
        log_step * total
    })
}

/// `I_s` on a fixed grid.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    grid: Arc<RadialGrid>,
    s: f64,
    constant: f64,
    weights: Vec<f64>,
    /// Contribution of the ball `|y| < r_min` per unit of `f(r_min)`.
    origin: Vec<f64>,
}

impl RieszOperator {
    pub fn new(grid: &Arc<RadialGrid>, s: f64) -> Result<Self> {
        Self::with_quadrature_order(grid, s, DEFAULT_QUADRATURE_ORDER)
    }

    /// Same operator with `order`-point Gauss-Legendre rules throughout.
    pub fn with_quadrature_order(grid: &Arc<RadialGrid>, s: f64, order: usize) -> Result<Self> {
        let n = grid.dim() as f64;
        if !(s > 0.0 && s < n) {
            return Err(Error::invalid("Riesz order must satisfy 0 < s < n"));
        }
        let kernel = LogKernel::new(grid.dim(), s, order);
        // Below r_min the profile is continued by its first value, whose
        // density decays like e^{(n+s)y/2}; keep terms down to 1e-17.
        let decay = 0.5 * (n + s) * grid.log_step();
        let extra = (ORIGIN_CUTOFF / decay).ceil() as usize;
        let len = grid.len();
        let weights = convolution_weights(&kernel, grid.log_step(), len + extra, order);
        let constant = riesz_constant(grid.dim(), s);
        let e = 0.5 * (n + s);
        let x0 = grid.log_node(0);
        let origin = (0..len)
            .map(|i| {
                let outer = constant * (-0.5 * (n - s) * grid.log_node(i)).exp();
                let tail: f64 = (1..=extra)
                    .map(|k| weights[i + k] * (e * (x0 - k as f64 * grid.log_step())).exp())
                    .sum();
                outer * tail
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            s,
            constant,
            weights,
            origin,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// `c(n,s)`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Convolution weights `V(0), …, V(N-1)`.
    pub fn convolution_weights(&self) -> &[f64] {
        &self.weights[..self.grid.len()]
    }

    fn density(&self, f: &RadialFunction) -> Vec<f64> {
        let e = 0.5 * (self.grid.dim() as f64 + self.s);
        (0..f.len())
            .map(|j| (e * self.grid.log_node(j)).exp() * f.values()[j])
            .collect()
    }

    fn outer_factor(&self, i: usize) -> f64 {
        let e = 0.5 * (self.grid.dim() as f64 - self.s);
        self.constant * (-e * self.grid.log_node(i)).exp()
    }

    fn check(&self, f: &RadialFunction) -> Result<()> {
        if f.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn apply_inner(&self, f: &RadialFunction, with_origin: bool) -> Result<RadialFunction> {
        self.check(f)?;
        let h = self.density(f);
        let f0 = if with_origin { f.values()[0] } else { 0.0 };
        let values = crate::par::map_rows(h.len(), |i| {
            let sum: f64 = h
                .iter()
                .enumerate()
                .map(|(j, hj)| self.weights[i.abs_diff(j)] * hj)
                .sum();
            self.outer_factor(i) * sum + self.origin[i] * f0
        });
        Ok(RadialFunction::from_values(self.grid.clone(), values))
    }

    /// `I_s f` at the grid nodes. Below `r_min` the profile is continued by
    /// its first value (as in [`RadialFunction::interpolate`]); beyond `r_max`
    /// it is taken to vanish.
    pub fn apply(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.apply_inner(f, true)
    }

    /// `I_s f` with `f` taken to vanish outside `[r_min, r_max]`. This
    /// discretization is exactly self-adjoint for the grid inner product
    /// `Σ w_i f_i g_i`.
    pub fn apply_symmetric(&self, f: &RadialFunction) -> Result<RadialFunction> {
        self.apply_inner(f, false)
    }

    /// Estimated share of `I_s f` at interior nodes that comes from the part
    /// of `f` beyond `r_max`, extrapolating the density geometrically.
    pub fn tail_fraction(&self, f: &RadialFunction) -> Result<f64> {
        self.check(f)?;
        let h = self.density(f);
        let n = h.len();
        let (last, prev) = (h[n - 1].abs(), h[n - 2].abs());
        if last == 0.0 {
            return Ok(0.0);
        }
        let q = last / prev;
        if !(q < 1.0) {
            return Ok(f64::INFINITY);
        }
        let u = self.apply(f)?;
        let interior = self.grid.interior();
        let scale = interior.clone().map(|i| u.values()[i].abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let geometric = last * q / (1.0 - q);
        let worst = interior
            .map(|i| self.outer_factor(i) * self.weights[n - i].abs() * geometric)
            .fold(0.0, f64::max);
        Ok(worst / scale)
    }

    /// [`Self::apply`] together with a tail warning when the truncation of
    /// `f` at `r_max` is visible.
    pub fn apply_checked(&self, f: &RadialFunction) -> Result<(RadialFunction, Option<Warning>)> {
        let u = self.apply(f)?;
        let fraction = self.tail_fraction(f)?;
        let warning = (fraction > TAIL_TOLERANCE).then_some(Warning::TailBeyondGrid { fraction });
        Ok((u, warning))
    }

    /// The operator of [`Self::apply_symmetric`] as a dense matrix.
    pub fn symmetric_matrix(&self) -> KernelMatrix {
        let e = 0.5 * (self.grid.dim() as f64 + self.s);
        let n = self.grid.len();
        let rows = crate::par::map_rows(n, |i| {
            let outer = self.outer_factor(i);
            (0..n)
                .map(|j| outer * self.weights[i.abs_diff(j)] * (e * self.grid.log_node(j)).exp())
                .collect()
        });
        KernelMatrix::from_rows(KernelKind::Riesz { s: self.s }, self.grid.clone(), rows)
    }

    /// The operator of [`Self::apply`] as a dense matrix.
    pub fn matrix(&self) -> KernelMatrix {
        let mut m = self.symmetric_matrix();
        for (i, &c) in self.origin.iter().enumerate() {
            m.add_to_entry(i, 0, c);
        }
        m
    }
}

/// `I_s f` on the grid of `f`.
pub fn riesz_apply(f: &RadialFunction, s: f64) -> Result<RadialFunction> {
    RieszOperator::new(f.grid(), s)?.apply(f)
}
