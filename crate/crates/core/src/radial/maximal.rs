use alloc::vec::Vec;
use core::f64::consts::PI;

use super::function::RadialFunction;
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::special::{ball_volume, sphere_area};
use crate::math::Real;

const CAP_PIECES: usize = 8;
const SMALL_ANGLE: f64 = 0.5;
/// Pieces per unit of `ln ρ` for the solid part of the ball.
const SOLID_PIECES_PER_LOG: f64 = 4.0;

/// `∫_0^θ sin^m φ dφ` by the reduction formula, or by quadrature for small
/// angles where the recurrence cancels.
fn sine_power_integral(m: usize, theta: f64, small: &GaussLegendre) -> f64 {
    if m == 0 {
        return theta;
    }
    let half = (0.5 * theta).sin();
    if m == 1 {
        return 2.0 * half * half;
    }
    if theta < SMALL_ANGLE {
        return small.integrate(0.0, theta, |x| x.sin().powi(m as i32));
    }
    let (s, c) = (theta.sin(), theta.cos());
    let mut lower = [theta, 2.0 * half * half];
    for k in 2..=m {
        let kf = k as f64;
        lower[k % 2] = -s.powi(k as i32 - 1) * c / kf + (kf - 1.0) / kf * lower[k % 2];
    }
    lower[m % 2]
}

/// Angle `θ*` with `cos θ* = (r² + ρ² - R²)/(2rρ)`, clamped, evaluated without
/// forming the cosine.
fn cap_angle(r: f64, rho: f64, radius: f64) -> f64 {
    let one_minus = ((radius - (r - rho)) * (radius + (r - rho))).max(0.0);
    let one_plus = ((r + rho - radius) * (r + rho + radius)).max(0.0);
    2.0 * one_minus.sqrt().atan2(one_plus.sqrt())
}

struct BallAverager<'a> {
    f: &'a RadialFunction,
    gl: GaussLegendre,
    small: GaussLegendre,
    dim: usize,
    subsphere: f64,
    sphere: f64,
}

impl BallAverager<'_> {
    /// `∫_0^b f(ρ) ρ^{n-1} dρ`, with `f` constant below the grid.
    fn solid(&self, b: f64) -> f64 {
        let grid = self.f.grid();
        let r0 = grid.r_min();
        let nf = self.dim as f64;
        if b <= r0 {
            return self.f.values()[0] * b.powf(nf) / nf;
        }
        let inner = self.f.values()[0] * r0.powf(nf) / nf;
        let (la, lb) = (r0.ln(), b.ln());
        let pieces = ((lb - la) * SOLID_PIECES_PER_LOG).ceil().max(1.0) as usize;
        inner
            + self.gl.integrate_composite(la, lb, pieces, |x| {
                let rho = x.exp();
                self.f.interpolate(rho) * rho.powf(nf)
            })
    }

    /// Angular part over `ρ ∈ [|r-R|, r+R]` where the sphere of radius `ρ`
    /// is partially inside `B(x,R)`.
    fn cap(&self, r: f64, radius: f64) -> f64 {
        let (a, b) = ((r - radius).abs(), r + radius);
        let nf = self.dim as f64;
        self.gl.integrate_composite(0.0, 1.0, CAP_PIECES, |u| {
            let jac = 0.5 * PI * (PI * u).sin();
            let rho = a + (b - a) * 0.5 * (1.0 - (PI * u).cos());
            if rho <= 0.0 {
                return 0.0;
            }
            let theta = cap_angle(r, rho, radius);
            let sigma = self.subsphere * sine_power_integral(self.dim - 2, theta, &self.small);
            self.f.interpolate(rho) * rho.powf(nf - 1.0) * sigma * (b - a) * jac
        })
    }

    fn average(&self, r: f64, radius: f64) -> f64 {
        let mut total = self.cap(r, radius);
        if radius > r {
            total += self.sphere * self.solid(radius - r);
        }
        total / (ball_volume(self.dim) * radius.powf(self.dim as f64))
    }
}

/// Centered ball average of a radial profile at every node, for one radius.
pub fn ball_average(f: &RadialFunction, radius: f64) -> Result<RadialFunction> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("ball radius must be positive and finite"));
    }
    let avg = averager(f);
    let values = crate::par::map_rows(f.len(), |i| avg.average(f.grid().nodes()[i], radius));
    Ok(RadialFunction::from_values(f.grid().clone(), values))
}

fn averager(f: &RadialFunction) -> BallAverager<'_> {
    let dim = f.grid().dim();
    BallAverager {
        f,
        gl: GaussLegendre::new(8),
        small: GaussLegendre::new(16),
        dim,
        subsphere: sphere_area(dim - 1),
        sphere: sphere_area(dim),
    }
}

/// Hardy-Littlewood maximal function of a nonnegative radial profile,
/// with the supremum restricted to centered balls of the given radii.
/// Values beyond the grid count as zero.
pub fn hl_maximal(f: &RadialFunction, radii: &[f64]) -> Result<RadialFunction> {
    if radii.is_empty() {
        return Err(Error::invalid("radius grid is empty"));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("ball radii must be positive and finite"));
    }
    let avg = averager(f);
    let nodes = f.grid().nodes();
    let values: Vec<f64> = crate::par::map_rows(f.len(), |i| {
        radii
            .iter()
            .map(|&radius| avg.average(nodes[i], radius))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(RadialFunction::from_values(f.grid().clone(), values))
}
