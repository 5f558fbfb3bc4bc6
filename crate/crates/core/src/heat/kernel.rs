//! The radial heat kernel `G_t(r,ρ)`, i.e. the Gaussian `(4πt)^{-n/2}e^{-|x-y|²/4t}`
//! averaged over the sphere `|y| = ρ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::radial::grid_lagrange_weights;
use crate::special::sphere_area;
use crate::math::Real;

pub const DEFAULT_ANGULAR_ORDER: usize = 64;

const LN_Z_MIN: f64 = -13.815_510_557_964_274; // ln 1e-6
const LN_Z_MAX: f64 = 27.631_021_115_928_547; // ln 1e12
const TABLE_STEP: f64 = 1.0 / 128.0;
/// Angular cutoff in units of `z^{-1/2}`: `e^{-z(1-cos θ)}` is below `e^{-70}` beyond it.
const ANGULAR_CUTOFF: f64 = 12.0;

/// `Â(z) = |S^{n-2}| ∫_0^π e^{-z(1-cos θ)} sin^{n-2}θ dθ`, tabulated as
/// `ln Â` on a uniform grid in `ln z`.
#[derive(Debug, Clone)]
pub struct AngularFactor {
    dim: usize,
    gl: GaussLegendre,
    subsphere: f64,
    table: Vec<f64>,
}

impl AngularFactor {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        if order < 8 {
            return Err(Error::invalid("angular order must be at least 8"));
        }
        let mut this = Self {
            dim,
            gl: GaussLegendre::new(order),
            subsphere: sphere_area(dim - 1),
            table: Vec::new(),
        };
        let count = ((LN_Z_MAX - LN_Z_MIN) / TABLE_STEP).round() as usize + 1;
        this.table = (0..count)
            .map(|k| this.direct((LN_Z_MIN + k as f64 * TABLE_STEP).exp()).ln())
            .collect();
        Ok(this)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.gl.len()
    }

    /// Gauss-Legendre evaluation of `Â(z)`.
    pub fn direct(&self, z: f64) -> f64 {
        let upper = if z > 0.0 { (ANGULAR_CUTOFF / z.sqrt()).min(PI) } else { PI };
        let m = self.dim as i32 - 2;
        let half_z = 2.0 * z;
        self.subsphere
            * self.gl.integrate(0.0, upper, |th| {
                let s = (0.5 * th).sin();
                (-half_z * s * s).exp() * th.sin().powi(m)
            })
    }

    /// `Â(z)` from the table, falling back to quadrature outside its range.
    pub fn eval(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return sphere_area(self.dim);
        }
        let lz = z.ln();
        let pos = (lz - LN_Z_MIN) / TABLE_STEP;
        let last = self.table.len() - 1;
        if pos < 1.0 || pos >= (last - 1) as f64 {
            return self.direct(z);
        }
        let cell = pos.floor();
        let w = grid_lagrange_weights(pos - cell);
        let first = cell as usize - 1;
        let ln_a: f64 = w.iter().zip(&self.table[first..first + 4]).map(|(w, v)| w * v).sum();
        ln_a.exp()
    }

    /// `G_t(r,ρ)`.
    pub fn heat_kernel(&self, t: f64, r: f64, rho: f64) -> f64 {
        let d = r - rho;
        let z = r * rho / (2.0 * t);
        (4.0 * PI * t).powf(-0.5 * self.dim as f64) * (-d * d / (4.0 * t)).exp() * self.eval(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_factor_is_a_bessel_function() {
        // 2∫_0^π e^{-z(1-cos θ)} dθ = 2π e^{-z} I_0(z); at z = 1, I_0 = 1.2660658777520082.
        let a = AngularFactor::new(2, 64).unwrap();
        let exact = 2.0 * PI * (-1.0f64).exp() * 1.266_065_877_752_008_2;
        assert!((a.direct(1.0) - exact).abs() < 1e-12);
        assert!((a.eval(1.0) - exact).abs() < 1e-9);
    }

    #[test]
    fn three_dimensional_factor_closed_form() {
        // n = 3: 2π ∫ e^{-z(1-cos θ)} sin θ dθ = 2π (1 - e^{-2z}) / z.
        let a = AngularFactor::new(3, 64).unwrap();
        for &z in &[1e-8f64, 1e-3, 0.7, 3.0, 40.0, 1e4, 1e9, 1e14] {
            let exact = 2.0 * PI * (-(-2.0 * z).exp_m1()) / z;
            let v = a.eval(z);
            assert!(((v - exact) / exact).abs() < 1e-10, "z={z}: {v} vs {exact}");
        }
    }

    #[test]
    fn table_agrees_with_quadrature_and_doubling() {
        for dim in [2, 3, 4, 7] {
            let a = AngularFactor::new(dim, 64).unwrap();
            let b = AngularFactor::new(dim, 128).unwrap();
            let mut z = 1.3e-6;
            while z < 1e12 {
                let direct = a.direct(z);
                assert!(((a.eval(z) - direct) / direct).abs() < 1e-9, "dim={dim} z={z}");
                assert!(((b.direct(z) - direct) / direct).abs() < 1e-9, "dim={dim} z={z}");
                z *= 1.37;
            }
        }
    }

    #[test]
    fn kernel_has_unit_mass() {
        let a = AngularFactor::new(3, 64).unwrap();
        let gl = GaussLegendre::new(64);
        for &(t, r) in &[(0.5f64, 0.0f64), (0.5, 2.0), (2.0, 5.0)] {
            let m = gl.integrate_composite(0.0, r + 20.0 * t.sqrt(), 16, |rho| {
                a.heat_kernel(t, r, rho) * rho * rho
            });
            assert!((m - 1.0).abs() < 1e-10, "t={t} r={r}: {m}");
        }
    }
}
