//! `I_s f = Γ(s/2)^{-1} ∫_0^∞ t^{s/2-1} e^{tΔ}f dt`, evaluated by the trapezoid
//! rule in `ln t` on stored heat evolutions, plus the high/low splitting of
//! that integral at a time `T`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heat::HeatSemigroup;
use crate::radial::{RadialFunction, RadialGrid};
use crate::special::gamma;
use crate::math::Real;

/// Acceptable estimated error of the large-time extrapolation, relative to
/// the sup of the potential over interior nodes.
pub const TIME_TAIL_TOLERANCE: f64 = 1e-6;

/// Log-uniform times `t_k = 10^{lo + k/per_decade}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszTimes {
    pub lo_decade: i32,
    pub hi_decade: i32,
    pub per_decade: usize,
}

impl Default for RieszTimes {
    fn default() -> Self {
        Self {
            lo_decade: -6,
            hi_decade: 6,
            per_decade: 40,
        }
    }
}

impl RieszTimes {
    pub fn len(&self) -> usize {
        (self.hi_decade - self.lo_decade) as usize * self.per_decade + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        10f64.powf(self.lo_decade as f64 + k as f64 / self.per_decade as f64)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Step in `ln t`.
    pub fn log_step(&self) -> f64 {
        core::f64::consts::LN_10 / self.per_decade as f64
    }

    fn validate(&self) -> Result<()> {
        if self.hi_decade <= self.lo_decade || self.per_decade < 2 {
            return Err(Error::invalid("need hi_decade > lo_decade and at least two times per decade"));
        }
        Ok(())
    }
}

/// `Hf = Γ(s/2)^{-1}∫_0^T …` and `Lf = Γ(s/2)^{-1}∫_T^∞ …`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitParts {
    pub high: RadialFunction,
    pub low: RadialFunction,
    /// The grid time the split was taken at.
    pub t_split: f64,
}

/// Check of `|Lf| ≤ (2/μ)Γ(s/2)^{-1} T^{-μ/2} ‖f‖_{Ḃ^{-(μ+s)}}` at every node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowFrequencyBound {
    pub bound: f64,
    pub max_low: f64,
    pub holds: bool,
}

/// Heat evolutions of a batch of profiles at the nodes of a [`RieszTimes`].
#[derive(Debug, Clone)]
pub struct HeatRepresentation {
    grid: Arc<RadialGrid>,
    times: RieszTimes,
    /// `evolved[m][k]` = `e^{t_k Δ} f_m` at the nodes.
    evolved: Vec<Vec<Vec<f64>>>,
}

impl HeatRepresentation {
    pub fn new(heat: &HeatSemigroup, members: &[RadialFunction], times: RieszTimes) -> Result<Self> {
        times.validate()?;
        let Some(first) = members.first() else {
            return Err(Error::invalid("no profiles to evolve"));
        };
        let grid = first.grid().clone();
        if members.iter().any(|f| f.grid().as_ref() != grid.as_ref()) {
            return Err(Error::GridMismatch);
        }
        let mut evolved = alloc::vec![Vec::with_capacity(times.len()); members.len()];
        for k in 0..times.len() {
            let matrix = heat.matrix(&grid, times.time(k))?;
            for (m, f) in members.iter().enumerate() {
                evolved[m].push(matrix.apply(f)?.into_values());
            }
        }
        Ok(Self { grid, times, evolved })
    }

    pub fn times(&self) -> &RieszTimes {
        &self.times
    }

    pub fn members(&self) -> usize {
        self.evolved.len()
    }

    /// `e^{t_k Δ} f_m`.
    pub fn evolved(&self, member: usize, k: usize) -> RadialFunction {
        RadialFunction::from_values(self.grid.clone(), self.evolved[member][k].clone())
    }

    fn check_order(&self, s: f64) -> Result<()> {
        if !(s > 0.0 && s < self.grid.dim() as f64) {
            return Err(Error::invalid("Riesz order must satisfy 0 < s < n"));
        }
        Ok(())
    }

    /// `t_k^{s/2} e^{t_k Δ}f` at node `i`: the integrand in `ln t`.
    fn sample(&self, member: usize, s: f64, k: usize, i: usize) -> f64 {
        self.times.time(k).powf(0.5 * s) * self.evolved[member][k][i]
    }

    /// `∫_0^{t_0}` from the linear fit through the two smallest times.
    fn small_time(&self, member: usize, s: f64, i: usize) -> f64 {
        let (t0, t1) = (self.times.time(0), self.times.time(1));
        let (g0, g1) = (self.evolved[member][0][i], self.evolved[member][1][i]);
        let b = (g1 - g0) / (t1 - t0);
        let a = g0 - b * t0;
        let h = 0.5 * s;
        a * t0.powf(h) / h + b * t0.powf(h + 1.0) / (h + 1.0)
    }

    /// `∫_{t_K}^∞` from geometric extrapolation of the last two samples,
    /// and the same estimate from the two before them.
    fn large_time(&self, member: usize, s: f64, i: usize) -> Option<(f64, f64)> {
        let last = self.times.len() - 1;
        let step = self.times.log_step();
        let y = |k| self.sample(member, s, k, i);
        let extrapolate = |a: f64, b: f64| -> Option<f64> {
            if b == 0.0 {
                return Some(0.0);
            }
            let q = b / a;
            if !(q > 0.0 && q < 1.0) {
                return None;
            }
            Some(b * step / -q.ln())
        };
        let tail = extrapolate(y(last - 1), y(last))?;
        // The earlier pair predicts the value at t_K too; the difference
        // measures how far the integrand is from geometric decay.
        let earlier = extrapolate(y(last - 2), y(last - 1))?;
        let slice = 0.5 * step * (y(last - 1) + y(last));
        Some((tail, (earlier - slice - tail).abs()))
    }

    /// Trapezoid weights in `ln t` on `[t_lo, t_hi]` (node indices).
    fn trapezoid(&self, member: usize, s: f64, i: usize, lo: usize, hi: usize) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let step = self.times.log_step();
        let inner: f64 = (lo + 1..hi).map(|k| self.sample(member, s, k, i)).sum();
        step * (inner + 0.5 * (self.sample(member, s, lo, i) + self.sample(member, s, hi, i)))
    }

    fn tails(&self, member: usize, s: f64) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let mut tails = Vec::with_capacity(n);
        let mut worst_error: f64 = 0.0;
        let mut failed = false;
        for i in 0..n {
            match self.large_time(member, s, i) {
                Some((tail, err)) => {
                    tails.push(tail);
                    if self.grid.interior().contains(&i) {
                        worst_error = worst_error.max(err);
                    }
                }
                None => {
                    failed |= self.grid.interior().contains(&i);
                    tails.push(0.0);
                }
            }
        }
        let last = self.times.len() - 1;
        let scale = self
            .grid
            .interior()
            .map(|i| self.trapezoid(member, s, i, 0, last).abs())
            .fold(0.0, f64::max);
        if failed || worst_error > TIME_TAIL_TOLERANCE * scale {
            let estimated_tail = self
                .grid
                .interior()
                .map(|i| tails[i].abs())
                .fold(0.0, f64::max)
                / scale.max(f64::MIN_POSITIVE);
            return Err(Error::InsufficientTimeRange { estimated_tail });
        }
        Ok(tails)
    }

    /// `I_s f_m` from the heat representation.
    pub fn riesz(&self, member: usize, s: f64) -> Result<RadialFunction> {
        self.check_order(s)?;
        let tails = self.tails(member, s)?;
        let last = self.times.len() - 1;
        let norm = gamma(0.5 * s).recip();
        let values = (0..self.grid.len())
            .map(|i| norm * (self.small_time(member, s, i) + self.trapezoid(member, s, i, 0, last) + tails[i]))
            .collect();
        Ok(RadialFunction::from_values(self.grid.clone(), values))
    }

    fn split_index(&self, t_split: f64) -> Result<usize> {
        let last = self.times.len() - 1;
        if !(t_split >= self.times.time(0) && t_split <= self.times.time(last)) {
            return Err(Error::invalid("split time outside the time grid"));
        }
        let pos = ((t_split.log10() - self.times.lo_decade as f64) * self.times.per_decade as f64).round();
        Ok((pos.max(0.0) as usize).min(last))
    }

    /// `Γ(s/2)^{-1} ∫_0^T t^{s/2-1} e^{tΔ}f dt` with `T` snapped to the nearest grid time.
    pub fn partial(&self, member: usize, s: f64, t_split: f64) -> Result<RadialFunction> {
        self.check_order(s)?;
        let k = self.split_index(t_split)?;
        let norm = gamma(0.5 * s).recip();
        let values = (0..self.grid.len())
            .map(|i| norm * (self.small_time(member, s, i) + self.trapezoid(member, s, i, 0, k)))
            .collect();
        Ok(RadialFunction::from_values(self.grid.clone(), values))
    }

    /// High and low time parts of the representation, split at the grid
    /// time nearest to `t_split`. Their sum is [`Self::riesz`].
    pub fn split(&self, member: usize, s: f64, t_split: f64) -> Result<SplitParts> {
        self.check_order(s)?;
        let k = self.split_index(t_split)?;
        let tails = self.tails(member, s)?;
        let last = self.times.len() - 1;
        let norm = gamma(0.5 * s).recip();
        let n = self.grid.len();
        let high = (0..n)
            .map(|i| norm * (self.small_time(member, s, i) + self.trapezoid(member, s, i, 0, k)))
            .collect();
        let low = (0..n)
            .map(|i| norm * (self.trapezoid(member, s, i, k, last) + tails[i]))
            .collect();
        Ok(SplitParts {
            high: RadialFunction::from_values(self.grid.clone(), high),
            low: RadialFunction::from_values(self.grid.clone(), low),
            t_split: self.times.time(k),
        })
    }
}

impl SplitParts {
    /// Pointwise bound on the low part in terms of `‖f‖_{Ḃ^{-(μ+s)}_{∞,∞}}`.
    pub fn low_frequency_bound(&self, s: f64, mu: f64, besov: f64) -> Result<LowFrequencyBound> {
        if !(mu > 0.0) {
            return Err(Error::invalid("μ must be positive"));
        }
        let bound = 2.0 / mu / gamma(0.5 * s) * self.t_split.powf(-0.5 * mu) * besov;
        let max_low = self.low.sup_abs();
        Ok(LowFrequencyBound {
            bound,
            max_low,
            holds: max_low <= bound,
        })
    }
}

/// `I_s f` through the heat representation on `times`.
pub fn riesz_apply_heat(
    heat: &HeatSemigroup,
    f: &RadialFunction,
    s: f64,
    times: RieszTimes,
) -> Result<RadialFunction> {
    HeatRepresentation::new(heat, core::slice::from_ref(f), times)?.riesz(0, s)
}
