//! Gamma functions and the geometric constants built from them.

use core::f64::consts::PI;

use num_complex::Complex64;
use crate::math::Real;

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Surface area `|S^{d-1}| = 2π^{d/2} / Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = 0.5 * d as f64;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the unit ball in `ℝ^d`.
pub fn ball_volume(d: usize) -> f64 {
    sphere_area(d) / d as f64
}

/// Normalization of the Riesz kernel, `I_s f = c(n,s) |x|^{s-n} * f`,
/// matching the Fourier multiplier `|ξ|^{-s}`.
pub fn riesz_constant(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    gamma(0.5 * (nf - s)) / (2.0f64.powf(s) * PI.powf(0.5 * nf) * gamma(0.5 * s))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch `ln Γ(z)` for complex `z` (Lanczos, reflection for `Re z < 1/2`).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let pi = Complex64::new(PI, 0.0);
        return pi.ln() - (pi * z).sin().ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(1) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn complex_gamma_matches_real_gamma() {
        for &x in &[0.15, 0.85, 1.35, 2.7, 5.5] {
            let v = ln_gamma_complex(Complex64::new(x, 0.0));
            assert!((v.re - ln_gamma(x)).abs() < 1e-12, "{x}");
        }
        // |Γ(iy)|^2 = π / (y sinh(πy))
        let y: f64 = 0.8;
        let v = ln_gamma_complex(Complex64::new(0.0, y));
        let expected = 0.5 * (PI / (y * (PI * y).sinh())).ln();
        assert!((v.re - expected).abs() < 1e-12);
    }

    #[test]
    fn riesz_constant_three_dims() {
        // c(3,2) = 1/(4π), the Newtonian potential.
        assert!((riesz_constant(3, 2.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }
}
