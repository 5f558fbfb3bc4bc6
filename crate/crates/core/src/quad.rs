//! Small quadrature and fitting toolkit shared by the operators.

use alloc::vec::Vec;
use core::f64::consts::PI;
use crate::math::Real;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `pieces` equal subintervals.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        pieces: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / pieces as f64;
        (0..pieces)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// Integrates `f` over `[a, b]` when `f` has an integrable algebraic or
    /// logarithmic singularity at `a` behaving like `|x - a|^(order - 1)`.
    pub fn integrate_endpoint_singular<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        order: f64,
        mut f: F,
    ) -> f64 {
        self.endpoint_singular_rule(a, b, order)
            .into_iter()
            .map(|(x, w)| w * f(x))
            .sum()
    }

    /// Nodes and weights behind [`Self::integrate_endpoint_singular`]:
    /// `x = a + (b - a) w^p` with `p >= 2/order`, followed by a graded split
    /// of `w` towards zero.
    pub fn endpoint_singular_rule(&self, a: f64, b: f64, order: f64) -> Vec<(f64, f64)> {
        let p = (2.0 / order).ceil().max(2.0);
        let len = b - a;
        let mut rule = Vec::with_capacity(GRADED_LEVELS * self.len());
        let mut hi = 1.0;
        for level in 0..GRADED_LEVELS {
            let lo = if level + 1 == GRADED_LEVELS { 0.0 } else { hi * 0.5 };
            for (w, wt) in self.mapped(lo, hi) {
                rule.push((a + len * w.powf(p), wt * len * p * w.powf(p - 1.0)));
            }
            hi = lo;
        }
        rule
    }
}

const GRADED_LEVELS: usize = 24;

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Maximizes a unimodal `f` on `[a, b]` by golden-section search.
/// Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, iters: usize, mut f: F) -> (f64, f64) {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// `count` log-spaced points covering `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2.0f64.powi(16) / 16.0).abs() < 1e-9);
        assert!((gl.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singular_handles_inverse_square_root() {
        let gl = GaussLegendre::new(16);
        // ∫_0^1 x^{-0.8} dx = 5
        let v = gl.integrate_endpoint_singular(0.0, 1.0, 0.2, |x| x.powf(-0.8));
        assert!((v - 5.0).abs() < 1e-10, "{v}");
        // ∫_0^1 ln x dx = -1
        let v = gl.integrate_endpoint_singular(0.0, 1.0, 1.0, |x| x.ln());
        assert!((v + 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_max(-1.0, 3.0, 60, |x| 2.0 - (x - 0.7) * (x - 0.7));
        assert!((x - 0.7).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_line_recovers_slope() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: alloc::vec::Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (m, c) = fit_line(&x, &y).unwrap();
        assert!((m - 2.5).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }
}
