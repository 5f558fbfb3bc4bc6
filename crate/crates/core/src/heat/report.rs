use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::{HeatSemigroup, TimeGrid};
use crate::error::{Error, Result, Warning};
use crate::quad::fit_line;
use crate::radial::RadialFunction;
use crate::math::Real;

/// Exponents of a weighted heat-decay estimate
/// `t^{(η + n/p - n/q + α - β)/2} ‖|x|^β ∂^η e^{tΔ}f‖_q ≤ C ‖|x|^α f‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Number of radial derivatives, 0 or 1.
    pub order: u8,
}

impl DecayParams {
    pub fn exponent(&self, dim: usize) -> f64 {
        let n = dim as f64;
        (self.order as f64 + n / self.p - n / self.q + self.alpha - self.beta) / 2.0
    }

    /// Names of the violated conditions, empty when admissible.
    pub fn violations(&self, dim: usize) -> Vec<String> {
        let n = dim as f64;
        let mut out = Vec::new();
        let mut need = |ok: bool, name: &str| {
            if !ok {
                out.push(alloc::format!("{name} violated"));
            }
        };
        need(self.p >= 1.0 && self.q >= 1.0, "p, q ≥ 1");
        need(self.order <= 1, "η ∈ {0, 1}");
        // With q = ∞ the weight |x|^β has to stay bounded near the origin.
        let beta_ok = if self.q.is_infinite() { self.beta >= 0.0 } else { self.beta > -n / self.q };
        need(beta_ok, "β > −n/q");
        let p_dual = self.p / (self.p - 1.0);
        need(self.alpha < n / p_dual, "α < n/p′");
        need(self.alpha >= self.beta, "α ≥ β");
        need(self.exponent(dim) >= 0.0, "decay exponent ≥ 0");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub c_of_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub sup: f64,
    pub argmax_t: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub k: f64,
    pub tail_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
    /// Least-squares slope of `ln tail_sup` against `ln k`.
    pub slope: Option<f64>,
    pub warnings: Vec<Warning>,
}

impl HeatSemigroup {
    /// `C(t)` for every `t` in `times`, plus its supremum.
    pub fn heat_decay_report(
        &self,
        f: &RadialFunction,
        params: &DecayParams,
        times: &TimeGrid,
    ) -> Result<DecayReport> {
        let dim = self.dim();
        let bad = params.violations(dim);
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        let denom = f.weighted_lp_norm(params.p, params.alpha)?;
        let mut warnings: Vec<Warning> = denom.warning().into_iter().collect();
        if f.is_zero() {
            warnings.push(Warning::ZeroInput);
            return Ok(DecayReport {
                rows: Vec::new(),
                sup: 0.0,
                argmax_t: 0.0,
                warnings,
            });
        }
        let exponent = params.exponent(dim);
        let mut rows = Vec::with_capacity(times.len());
        for &t in times.times() {
            let mut u = self.apply(f, t)?;
            if params.order == 1 {
                u = u.radial_gradient();
            }
            let num = u.weighted_lp_norm(params.q, params.beta)?;
            if let Some(w) = num.warning() {
                warnings.push(w);
            }
            rows.push(DecayRow {
                t,
                c_of_t: t.powf(exponent) * num.value / denom.value,
            });
        }
        let best = rows
            .iter()
            .copied()
            .fold(rows[0], |a, b| if b.c_of_t > a.c_of_t { b } else { a });
        Ok(DecayReport {
            rows,
            sup: best.c_of_t,
            argmax_t: best.t,
            warnings,
        })
    }

    /// `sup_{|x|>k}|e^{tΔ}f|` for every `k`, and the fitted power-law slope.
    pub fn tail_decay_report(
        &self,
        f: &RadialFunction,
        t: f64,
        alpha: f64,
        p: f64,
        delta: f64,
        ks: &[f64],
    ) -> Result<TailReport> {
        let n = self.dim() as f64;
        let p_dual = p / (p - 1.0);
        let mut bad = Vec::new();
        if !(delta > 0.0) {
            bad.push("δ > 0 violated".into());
        }
        if !(delta < alpha) {
            bad.push("δ < α violated".into());
        }
        if !(alpha < n / p_dual) {
            bad.push("α < n/p′ violated".into());
        }
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        let grid = f.grid();
        if ks.len() < 2 || ks.iter().any(|&k| !(k > grid.r_min() && k < grid.r_max())) {
            return Err(Error::invalid("tail radii must lie strictly inside the grid, at least two"));
        }
        if f.is_zero() {
            return Ok(TailReport {
                rows: Vec::new(),
                slope: None,
                warnings: vec![Warning::ZeroInput],
            });
        }
        let u = self.apply(f, t)?;
        let rows: Vec<TailRow> = ks
            .iter()
            .map(|&k| TailRow {
                k,
                tail_sup: grid
                    .nodes()
                    .iter()
                    .zip(u.values())
                    .filter(|(r, _)| **r > k)
                    .fold(0.0, |m, (_, v)| m.max(v.abs())),
            })
            .collect();
        let usable: Vec<&TailRow> = rows.iter().filter(|r| r.tail_sup > 0.0).collect();
        let lx: Vec<f64> = usable.iter().map(|r| r.k.ln()).collect();
        let ly: Vec<f64> = usable.iter().map(|r| r.tail_sup.ln()).collect();
        let slope = fit_line(&lx, &ly).map(|(s, _)| s);
        Ok(TailReport {
            rows,
            slope,
            warnings: Vec::new(),
        })
    }
}
