//! Heat evolution `e^{tΔ}` of radial profiles, thermic Besov norms, and the
//! weighted decay diagnostics built on them.

mod besov;
mod kernel;
mod matrix;
mod report;

use alloc::vec::Vec;
use core::f64::consts::PI;

pub use besov::BesovNorm;
pub use kernel::{AngularFactor, DEFAULT_ANGULAR_ORDER};
pub use matrix::{KernelKind, KernelMatrix};
pub use report::{DecayParams, DecayReport, DecayRow, TailReport, TailRow};

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::radial::{RadialFunction, RadialGrid};
use crate::math::Real;

/// A row is summed by the grid trapezoid rule when the kernel width `√(2t)`
/// spans at least this many grid spacings `Δ·r_i`; narrower rows integrate
/// the cubic interpolant of `f` instead.
const RESOLVED_RATIO: f64 = 1.25;
/// Half-width of the integration window of a narrow row, in units of `√(2t)`.
const NARROW_HALF_WIDTH: f64 = 12.0;

/// Increasing list of positive times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("time grid is empty"));
        }
        if times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::invalid("times must be positive and finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        Ok(Self { times })
    }

    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || count < 2 {
            return Err(Error::invalid("need 0 < lo < hi and at least two times"));
        }
        Self::new(crate::quad::log_space(lo, hi, count))
    }

    /// Sixty log-spaced times on `[1e-4, 1e4]`.
    pub fn besov_default() -> Self {
        Self::log_spaced(1e-4, 1e4, 60).expect("valid default")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
}

/// The heat semigroup on radial profiles in a fixed dimension.
#[derive(Debug, Clone)]
pub struct HeatSemigroup {
    angular: AngularFactor,
    gl: GaussLegendre,
}

impl HeatSemigroup {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_angular_order(dim, DEFAULT_ANGULAR_ORDER)
    }

    pub fn with_angular_order(dim: usize, order: usize) -> Result<Self> {
        Ok(Self {
            angular: AngularFactor::new(dim, order)?,
            gl: GaussLegendre::new(8),
        })
    }

    pub fn dim(&self) -> usize {
        self.angular.dim()
    }

    pub fn angular(&self) -> &AngularFactor {
        &self.angular
    }

    /// `G_t(r,ρ)`, the kernel of `e^{tΔ}` against `ρ^{n-1}dρ`.
    pub fn kernel(&self, t: f64, r: f64, rho: f64) -> f64 {
        self.angular.heat_kernel(t, r, rho)
    }

    fn check(&self, grid: &RadialGrid, t: f64) -> Result<()> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid("heat time must be positive and finite"));
        }
        if grid.dim() != self.dim() {
            return Err(Error::invalid("grid dimension differs from semigroup dimension"));
        }
        Ok(())
    }

    /// Row `i` of the discretized operator, quadrature weights included.
    fn row(&self, grid: &RadialGrid, t: f64, i: usize) -> Vec<f64> {
        let n = grid.len();
        let nodes = grid.nodes();
        let r = nodes[i];
        let width = (2.0 * t).sqrt();
        let prefactor = (4.0 * PI * t).powf(-0.5 * self.dim() as f64);
        let kernel = |rho: f64| {
            let d = r - rho;
            prefactor * (-d * d / (4.0 * t)).exp() * self.angular.eval(r * rho / (2.0 * t))
        };
        if width >= RESOLVED_RATIO * grid.log_step() * r {
            return nodes
                .iter()
                .zip(grid.weights())
                .map(|(&rho, &w)| w * kernel(rho))
                .collect();
        }
        let mut row = alloc::vec![0.0; n];
        let lo = (r - NARROW_HALF_WIDTH * width).max(0.0);
        let hi = r + NARROW_HALF_WIDTH * width;
        let pieces = ((hi - lo) / width).ceil() as usize;
        let step = (hi - lo) / pieces as f64;
        let dm1 = self.dim() as i32 - 1;
        for k in 0..pieces {
            let a = lo + k as f64 * step;
            for (rho, w) in self.gl.mapped(a, a + step) {
                let Some(st) = grid.stencil(rho) else { continue };
                let weight = w * kernel(rho) * rho.powi(dm1);
                for (m, &c) in st.weights.iter().enumerate() {
                    let j = (st.first + m as isize).max(0) as usize;
                    if j < n {
                        row[j] += weight * c;
                    }
                }
            }
        }
        row
    }

    /// `e^{tΔ}f` at the grid nodes.
    pub fn apply(&self, f: &RadialFunction, t: f64) -> Result<RadialFunction> {
        self.check(f.grid(), t)?;
        if f.is_zero() {
            return Ok(f.clone());
        }
        let grid = f.grid();
        let values = crate::par::map_rows(f.len(), |i| {
            self.row(grid, t, i)
                .iter()
                .zip(f.values())
                .map(|(k, v)| k * v)
                .sum()
        });
        Ok(RadialFunction::from_values(grid.clone(), values))
    }

    /// The operator `e^{tΔ}` on `grid` as a dense matrix.
    pub fn matrix(&self, grid: &alloc::sync::Arc<RadialGrid>, t: f64) -> Result<KernelMatrix> {
        self.check(grid, t)?;
        let rows = crate::par::map_rows(grid.len(), |i| self.row(grid, t, i));
        Ok(KernelMatrix::from_rows(KernelKind::Heat { t }, grid.clone(), rows))
    }

    /// `e^{tΔ}f` for every time in `times`.
    pub fn evolve(&self, f: &RadialFunction, times: &[f64]) -> Result<Vec<RadialFunction>> {
        times.iter().map(|&t| self.apply(f, t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    fn grid() -> Arc<RadialGrid> {
        RadialGrid::new(3, 1e-4, 1e2, 512).unwrap()
    }

    fn gaussian(t: f64) -> impl Fn(f64) -> f64 {
        move |r: f64| (4.0 * PI * t).powf(-1.5) * (-r * r / (4.0 * t)).exp()
    }

    fn sup_rel(a: &RadialFunction, b: &RadialFunction) -> f64 {
        let d = a.combine(1.0, b, -1.0).unwrap().sup_abs();
        d / b.sup_abs()
    }

    #[test]
    fn evolves_gaussians_into_gaussians() {
        let heat = HeatSemigroup::new(3).unwrap();
        for &t0 in &[0.25, 1.0, 4.0] {
            let f = RadialFunction::from_fn(&grid(), gaussian(t0)).unwrap();
            for &t in &[1e-3, 0.1, 1.0, 10.0] {
                let u = heat.apply(&f, t).unwrap();
                let exact = RadialFunction::from_fn(&grid(), gaussian(t0 + t)).unwrap();
                assert!(sup_rel(&u, &exact) < 1e-6, "t0={t0} t={t}: {}", sup_rel(&u, &exact));
            }
        }
    }

    #[test]
    fn preserves_constants_and_zero() {
        let heat = HeatSemigroup::new(3).unwrap();
        let one = RadialFunction::from_fn(&grid(), |_| 1.0).unwrap();
        for &t in &[1e-3, 0.5, 4.0] {
            let u = heat.apply(&one, t).unwrap();
            for (&r, &v) in grid().nodes().iter().zip(u.values()) {
                if r + 12.0 * (2.0 * t).sqrt() < 1e2 {
                    assert!((v - 1.0).abs() < 1e-6, "t={t} r={r} v={v}");
                }
            }
        }
        let zero = RadialFunction::zeros(&grid());
        assert!(heat.apply(&zero, 1.0).unwrap().is_zero());
        assert!(heat.apply(&zero, 0.0).is_err());
    }

    #[test]
    fn conserves_mass() {
        let heat = HeatSemigroup::new(3).unwrap();
        let f = RadialFunction::from_fn(&grid(), |r| r * r * (-r * r).exp()).unwrap();
        for &t in &[1e-2, 1.0, 10.0] {
            let m = heat.apply(&f, t).unwrap().integrate();
            assert!(((m - f.integrate()) / f.integrate()).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn matrix_rows_and_entries() {
        let heat = HeatSemigroup::new(3).unwrap();
        let g = grid();
        let t = 0.5;
        let k = heat.matrix(&g, t).unwrap();
        for i in 0..g.len() {
            let r = g.nodes()[i];
            let resolved = (2.0 * t).sqrt() >= RESOLVED_RATIO * g.log_step() * r;
            if resolved {
                assert!(k.row(i).iter().all(|&e| e >= 0.0));
            }
            if r + 12.0 * (2.0 * t).sqrt() < g.r_max() {
                let sum: f64 = k.row(i).iter().sum();
                assert!((sum - 1.0).abs() < 1e-6, "row {i}: {sum}");
            }
        }
        let f = RadialFunction::from_fn(&g, gaussian(1.0)).unwrap();
        let a = k.apply(&f).unwrap();
        let b = heat.apply(&f, t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn angular_doubling_gate() {
        let g = grid();
        let f = RadialFunction::from_fn(&g, |r| (1.0 + r * r).powi(-2)).unwrap();
        let a = HeatSemigroup::new(3).unwrap().apply(&f, 0.3).unwrap();
        let b = HeatSemigroup::with_angular_order(3, 128).unwrap().apply(&f, 0.3).unwrap();
        assert!(a.combine(1.0, &b, -1.0).unwrap().sup_abs() < 1e-9);
    }

    #[test]
    fn two_dimensional_gaussians() {
        let g = RadialGrid::new(2, 1e-4, 1e2, 512).unwrap();
        let heat = HeatSemigroup::new(2).unwrap();
        let h = |t: f64| move |r: f64| (4.0 * PI * t).recip() * (-r * r / (4.0 * t)).exp();
        let f = RadialFunction::from_fn(&g, h(1.0)).unwrap();
        let u = heat.apply(&f, 0.7).unwrap();
        let exact = RadialFunction::from_fn(&g, h(1.7)).unwrap();
        assert!(sup_rel(&u, &exact) < 1e-6);
    }
}
