use alloc::vec::Vec;

use serde::Serialize;

use super::{HeatSemigroup, TimeGrid};
use crate::error::{Error, Result, Warning};
use crate::quad::golden_max;
use crate::radial::RadialFunction;
use crate::math::Real;

const GOLDEN_ITERS: usize = 24;

/// `sup_t t^{δ/2}‖e^{tΔ}f‖_∞` over a time grid, refined between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesovNorm {
    pub value: f64,
    pub argmax_t: f64,
    /// The grid maximum sits at the first or last time, so the supremum
    /// over all `t > 0` is not bracketed.
    pub endpoint_flag: bool,
}

impl BesovNorm {
    pub fn warning(&self) -> Option<Warning> {
        self.endpoint_flag.then_some(Warning::EndpointSupremum { t: self.argmax_t })
    }
}

impl HeatSemigroup {
    fn besov_profile(&self, f: &RadialFunction, delta: f64, t: f64) -> Result<f64> {
        Ok(t.powf(0.5 * delta) * self.apply(f, t)?.sup_abs())
    }

    /// Thermic Besov norm of negative smoothness `-δ`.
    pub fn besov_norm(&self, f: &RadialFunction, delta: f64, times: &TimeGrid) -> Result<BesovNorm> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid("smoothness δ must be positive"));
        }
        if f.is_zero() {
            return Ok(BesovNorm {
                value: 0.0,
                argmax_t: times.first(),
                endpoint_flag: false,
            });
        }
        let values: Vec<f64> = times
            .times()
            .iter()
            .map(|&t| self.besov_profile(f, delta, t))
            .collect::<Result<_>>()?;
        let (k, &best) = values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        let ts = times.times();
        if k == 0 || k + 1 == ts.len() {
            return Ok(BesovNorm {
                value: best,
                argmax_t: ts[k],
                endpoint_flag: true,
            });
        }
        let mut failure = None;
        let (lt, refined) = golden_max(ts[k - 1].ln(), ts[k + 1].ln(), GOLDEN_ITERS, |lt| {
            match self.besov_profile(f, delta, lt.exp()) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::NEG_INFINITY
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let (value, argmax_t) = if refined > best { (refined, lt.exp()) } else { (best, ts[k]) };
        Ok(BesovNorm {
            value,
            argmax_t,
            endpoint_flag: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;
    use core::f64::consts::PI;

    #[test]
    fn heat_kernel_besov_norm() {
        // max_t t^{1/2}(4π(1+t))^{-3/2} is attained at t = 1/2.
        let g = RadialGrid::new(3, 1e-4, 1e2, 512).unwrap();
        let f = RadialFunction::from_fn(&g, |r| (4.0 * PI).powf(-1.5) * (-r * r / 4.0).exp()).unwrap();
        let heat = HeatSemigroup::new(3).unwrap();
        let b = heat.besov_norm(&f, 1.0, &TimeGrid::besov_default()).unwrap();
        let exact = 0.5f64.sqrt() * (6.0 * PI).powf(-1.5);
        assert!((b.value - exact).abs() < 1e-4 * exact, "{} vs {exact}", b.value);
        assert!((b.argmax_t - 0.5).abs() < 1e-3);
        assert!(b.warning().is_none());
        let zero = heat.besov_norm(&RadialFunction::zeros(&g), 1.0, &TimeGrid::besov_default()).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn endpoint_supremum_is_flagged() {
        let g = RadialGrid::new(3, 1e-4, 1e2, 256).unwrap();
        let f = RadialFunction::from_fn(&g, |r| (-r * r).exp()).unwrap();
        let heat = HeatSemigroup::new(3).unwrap();
        let times = TimeGrid::log_spaced(1e-3, 1e-2, 5).unwrap();
        let b = heat.besov_norm(&f, 1.0, &times).unwrap();
        assert!(b.endpoint_flag);
        assert!(heat.besov_norm(&f, 0.0, &times).is_err());
    }
}
