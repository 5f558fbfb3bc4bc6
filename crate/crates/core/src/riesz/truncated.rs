//! `K_s^τ * f` with the kernel cut off inside the ball of radius `τ`,
//! computed as the full potential minus the local defect
//! `D(r) = c(n,s) ∫_{|y|<τ} |y|^{s-n} f(|x+y|) dy`.

use alloc::vec::Vec;

use super::RieszOperator;
use crate::error::{Error, Result};
use crate::heat::{KernelKind, KernelMatrix};
use crate::quad::GaussLegendre;
use crate::radial::{RadialFunction, RadialGrid};
use crate::special::sphere_area;
use crate::math::Real;

const ANGULAR_ORDER: usize = 32;

/// Quadrature for `D(r) = c τ^s/s ∫_0^1 A(r, τu^{1/s}) du`, where `A(r,ρ')`
/// is the integral of `f` over the sphere of radius `ρ'` around a point at
/// distance `r` from the origin.
struct DefectRule {
    dim: usize,
    s: f64,
    radial: Vec<(f64, f64)>,
    angular: Vec<(f64, f64)>,
}

impl DefectRule {
    fn new(dim: usize, s: f64) -> Self {
        let gl = GaussLegendre::new(16);
        // A(r, ρ') is even in ρ', so in u it behaves like u^{2/s} at the origin.
        let radial = gl.endpoint_singular_rule(0.0, 1.0, (2.0 / s).min(1.0));
        let angular = GaussLegendre::new(ANGULAR_ORDER)
            .mapped(0.0, core::f64::consts::PI)
            .map(|(th, w)| (th.cos(), w * th.sin().powi(dim as i32 - 2)))
            .collect();
        Self { dim, s, radial, angular }
    }

    /// Calls `visit(radius, weight)` for every quadrature point, with
    /// `D(r) = Σ weight · f(radius)`.
    fn for_each(&self, constant: f64, tau: f64, r: f64, mut visit: impl FnMut(f64, f64)) {
        let scale = constant * tau.powf(self.s) / self.s * sphere_area(self.dim - 1);
        let inv_s = 1.0 / self.s;
        for &(u, wu) in &self.radial {
            let rho = tau * u.powf(inv_s);
            for &(c, wc) in &self.angular {
                let radius = (r * r + rho * rho + 2.0 * r * rho * c).max(0.0).sqrt();
                visit(radius, scale * wu * wc);
            }
        }
    }
}

fn check_radius(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid("truncation radius must be positive and finite"));
    }
    Ok(())
}

impl RieszOperator {
    /// `D(r)` at an arbitrary radius, `r = 0` included.
    pub fn truncation_defect_at(&self, f: &RadialFunction, tau: f64, r: f64) -> Result<f64> {
        check_radius(tau)?;
        if f.grid().as_ref() != self.grid().as_ref() {
            return Err(Error::GridMismatch);
        }
        let rule = DefectRule::new(self.grid().dim(), self.s());
        let mut total = 0.0;
        rule.for_each(self.constant(), tau, r, |radius, w| total += w * f.interpolate(radius));
        Ok(total)
    }

    /// `D` at every node.
    pub fn truncation_defect(&self, f: &RadialFunction, tau: f64) -> Result<RadialFunction> {
        check_radius(tau)?;
        if f.grid().as_ref() != self.grid().as_ref() {
            return Err(Error::GridMismatch);
        }
        let rule = DefectRule::new(self.grid().dim(), self.s());
        let nodes = self.grid().nodes();
        let values = crate::par::map_rows(f.len(), |i| {
            let mut total = 0.0;
            rule.for_each(self.constant(), tau, nodes[i], |radius, w| {
                total += w * f.interpolate(radius)
            });
            total
        });
        Ok(RadialFunction::from_values(self.grid().clone(), values))
    }

    /// `K_s^τ * f`: the potential with the kernel zeroed where `|x - y| ≤ τ`.
    pub fn truncated_apply(&self, f: &RadialFunction, tau: f64) -> Result<RadialFunction> {
        let defect = self.truncation_defect(f, tau)?;
        self.apply(f)?.combine(1.0, &defect, -1.0)
    }

    /// The truncated operator as a dense matrix.
    pub fn truncated_matrix(&self, tau: f64) -> Result<KernelMatrix> {
        check_radius(tau)?;
        let grid: &RadialGrid = self.grid();
        let n = grid.len();
        let full = self.matrix();
        let rule = DefectRule::new(grid.dim(), self.s());
        let rows = crate::par::map_rows(n, |i| {
            let mut row = full.row(i).to_vec();
            rule.for_each(self.constant(), tau, grid.nodes()[i], |radius, w| {
                if let Some(st) = grid.stencil(radius) {
                    for (m, &c) in st.weights.iter().enumerate() {
                        let j = (st.first + m as isize).max(0) as usize;
                        if j < n {
                            row[j] -= w * c;
                        }
                    }
                }
            });
            row
        });
        Ok(KernelMatrix::from_rows(
            KernelKind::RieszTruncated { s: self.s(), radius: tau },
            self.grid().clone(),
            rows,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::riesz_constant;
    use alloc::sync::Arc;

    fn gauss(r: f64) -> f64 {
        (-r * r).exp()
    }

    #[test]
    fn defect_at_origin_matches_radial_integral() {
        let g = RadialGrid::new(3, 1e-4, 1e2, 2048).unwrap();
        let f = RadialFunction::from_fn(&g, gauss).unwrap();
        let gl = GaussLegendre::new(32);
        for &s in &[0.5, 1.0, 1.5] {
            let op = RieszOperator::new(&g, s).unwrap();
            for &tau in &[0.1, 0.7, 2.0] {
                let direct = riesz_constant(3, s)
                    * sphere_area(3)
                    * gl.integrate_endpoint_singular(0.0, tau, s, |rho| gauss(rho) * rho.powf(s - 1.0));
                let d = op.truncation_defect_at(&f, tau, 0.0).unwrap();
                assert!(((d - direct) / direct).abs() < 1e-8, "s={s} τ={tau}: {d} vs {direct}");
            }
        }
    }

    #[test]
    fn small_radius_defect_is_the_local_term() {
        // For small τ the removed mass is c |S^{n-1}| τ^s/s · f(r).
        let g: Arc<RadialGrid> = RadialGrid::new(3, 1e-4, 1e2, 256).unwrap();
        let f = RadialFunction::from_fn(&g, gauss).unwrap();
        let s = 1.0;
        let tau = 1e-6;
        let op = RieszOperator::new(&g, s).unwrap();
        let full = op.apply(&f).unwrap();
        let cut = op.truncated_apply(&f, tau).unwrap();
        let local = riesz_constant(3, s) * sphere_area(3) * tau.powf(s) / s;
        for i in [0, 64, 128, 180] {
            let removed = full.values()[i] - cut.values()[i];
            let expect = local * f.values()[i];
            assert!((removed - expect).abs() < 1e-6 * expect + 1e-15, "{i}: {removed} vs {expect}");
        }
        assert!(op.truncated_apply(&f, 0.0).is_err());
    }

    #[test]
    fn truncation_is_monotone_and_matrix_consistent() {
        let g = RadialGrid::new(3, 1e-4, 1e2, 256).unwrap();
        let f = RadialFunction::from_fn(&g, gauss).unwrap();
        let op = RieszOperator::new(&g, 1.5).unwrap();
        let radii = [0.01, 0.1, 0.5, 2.0];
        let outs: Vec<_> = radii.iter().map(|&t| op.truncated_apply(&f, t).unwrap()).collect();
        // The cubic interpolant dips below zero by ~1e-13 where the
        // Gaussian is negligible, which can flip the order at that level.
        let slack = 1e-10 * outs[0].sup_abs();
        for w in outs.windows(2) {
            for (i, (a, b)) in w[0].values().iter().zip(w[1].values()).enumerate() {
                assert!(*b <= a + slack, "{i}: {a} {b}");
            }
        }
        let m = op.truncated_matrix(0.5).unwrap();
        let via_matrix = m.apply(&f).unwrap();
        let diff = via_matrix.combine(1.0, &outs[2], -1.0).unwrap().sup_abs();
        assert!(diff < 1e-12 * outs[2].sup_abs());
    }
}
