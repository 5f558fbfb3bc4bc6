use alloc::sync::Arc;
use alloc::vec::Vec;

use super::grid::{RadialGrid, Stencil};
use crate::error::{Error, Result, Warning};
use crate::math::Real;

/// Fraction of a norm integral above which boundary nodes trigger a warning.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// A radial profile sampled at the nodes of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

/// A norm together with the share of it contributed by the outermost nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub boundary_fraction: f64,
}

impl NormValue {
    pub fn warning(&self) -> Option<Warning> {
        (self.boundary_fraction > BOUNDARY_TOLERANCE).then_some(Warning::BoundaryDominated {
            fraction: self.boundary_fraction,
        })
    }
}

/// Result of [`RadialFunction::dilate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    pub function: RadialFunction,
    /// Share of the weighted mass of `|f|` that falls off the grid.
    pub dropped_fraction: f64,
}

impl Dilation {
    pub fn warning(&self) -> Option<Warning> {
        (self.dropped_fraction > BOUNDARY_TOLERANCE).then_some(Warning::DroppedMass {
            fraction: self.dropped_fraction,
        })
    }
}

const EDGE_NODES: usize = 2;

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid("profile length differs from grid size"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile values must be finite"));
        }
        Ok(Self { grid, values })
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_values(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        Self::from_values(grid.clone(), alloc::vec![0.0; grid.len()])
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self::from_values(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(|_, v| v.abs())
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_values(self.grid.clone(), values))
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫_{ℝ^n} f(|x|) dx`.
    pub fn integrate(&self) -> f64 {
        let s: f64 = self
            .grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum();
        self.grid.sphere_area() * s
    }

    /// `‖|x|^a f‖_{L^p(ℝ^n)}`; `p = ∞` is the supremum over nodes.
    pub fn weighted_lp_norm(&self, p: f64, a: f64) -> Result<NormValue> {
        if !(p >= 1.0) {
            return Err(Error::invalid("Lebesgue exponent must be at least 1"));
        }
        let nodes = self.grid.nodes();
        if p.is_infinite() {
            let (idx, value) = nodes
                .iter()
                .zip(&self.values)
                .map(|(r, v)| (v * r.powf(a)).abs())
                .enumerate()
                .fold((0, 0.0), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
            let boundary_fraction = if value > 0.0 && idx + 1 == nodes.len() { 1.0 } else { 0.0 };
            return Ok(NormValue {
                value,
                boundary_fraction,
            });
        }
        let terms: Vec<f64> = nodes
            .iter()
            .zip(&self.values)
            .zip(self.grid.weights())
            .map(|((r, v), w)| w * (v.abs() * r.powf(a)).powf(p))
            .collect();
        let total: f64 = terms.iter().sum();
        if total == 0.0 {
            return Ok(NormValue {
                value: 0.0,
                boundary_fraction: 0.0,
            });
        }
        let n = terms.len();
        let edge: f64 = terms[..EDGE_NODES].iter().sum::<f64>() + terms[n - EDGE_NODES..].iter().sum::<f64>();
        Ok(NormValue {
            value: (self.grid.sphere_area() * total).powf(1.0 / p),
            boundary_fraction: edge / total,
        })
    }

    /// [`Self::weighted_lp_norm`] with the node sum continued past both ends
    /// of the grid as a geometric series, using the power law of the two
    /// outermost integrand terms. Only decaying ends are continued. Suited to
    /// potentials like `I_s f`, whose `ρ^{s−n}` far field outlives the grid.
    pub fn extended_lp_norm(&self, p: f64, a: f64) -> Result<f64> {
        if !(p >= 1.0) || p.is_infinite() {
            return Err(Error::invalid("extended norms need a finite exponent p ≥ 1"));
        }
        let g: Vec<f64> = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .zip(self.grid.weights())
            .map(|((r, v), w)| w * (v.abs() * r.powf(a)).powf(p))
            .collect();
        let n = g.len();
        // Σ_{k≥1} last·q^k with q the ratio of consecutive terms.
        let tail = |last: f64, inner: f64| {
            let q = last / inner;
            if last > 0.0 && inner > 0.0 && q < 1.0 {
                last * q / (1.0 - q)
            } else {
                0.0
            }
        };
        let total = g.iter().sum::<f64>() + tail(g[n - 1], g[n - 2]) + tail(g[0], g[1]);
        Ok((self.grid.sphere_area() * total).powf(1.0 / p))
    }

    /// Shorthand for the value of [`Self::weighted_lp_norm`] with a valid exponent.
    pub fn norm(&self, p: f64, a: f64) -> f64 {
        self.weighted_lp_norm(p, a).map(|n| n.value).unwrap_or(f64::NAN)
    }

    /// `f_λ(x) = λ^a f(λx)` with `λ = exp(kΔ)`: an index shift by `k`.
    /// Values pulled in from outside the grid are zero.
    pub fn dilate(&self, k: isize, a: f64) -> Dilation {
        let n = self.len() as isize;
        let lambda_pow = (k as f64 * self.grid.log_step() * a).exp();
        let weights = self.grid.weights();
        let mass: f64 = weights.iter().zip(&self.values).map(|(w, v)| w * v.abs()).sum();
        let mut dropped = 0.0;
        let values = (0..n)
            .map(|i| {
                let j = i + k;
                if (0..n).contains(&j) {
                    lambda_pow * self.values[j as usize]
                } else {
                    0.0
                }
            })
            .collect();
        for j in 0..n {
            let i = j - k;
            if !(0..n).contains(&i) {
                dropped += weights[j as usize] * self.values[j as usize].abs();
            }
        }
        let dropped_fraction = if mass > 0.0 { dropped / mass } else { 0.0 };
        Dilation {
            function: Self::from_values(self.grid.clone(), values),
            dropped_fraction,
        }
    }

    /// `du/dr` by centered differences in `ln r`, second-order one-sided at the ends.
    pub fn radial_gradient(&self) -> Self {
        let n = self.len();
        let two_h = 2.0 * self.grid.log_step();
        let r = self.grid.nodes();
        let f = &self.values;
        let mut out = alloc::vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) / (r[i] * two_h);
        }
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (r[0] * two_h);
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (r[n - 1] * two_h);
        Self::from_values(self.grid.clone(), out)
    }

    /// Applies a stencil from [`RadialGrid::stencil`]; indices below zero reuse
    /// the first node, indices past the end are zero.
    pub(crate) fn apply_stencil(&self, st: &Stencil) -> f64 {
        let n = self.len() as isize;
        st.weights
            .iter()
            .enumerate()
            .map(|(m, w)| {
                let j = st.first + m as isize;
                if j >= n {
                    0.0
                } else {
                    w * self.values[j.max(0) as usize]
                }
            })
            .sum()
    }

    /// Cubic interpolation in `ln r`.
    pub fn interpolate(&self, r: f64) -> f64 {
        match self.grid.stencil(r) {
            Some(st) => self.apply_stencil(&st),
            None => 0.0,
        }
    }
}
