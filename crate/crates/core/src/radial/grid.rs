use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::sphere_area;
use crate::math::Real;

/// Log-uniform discretization `r_i = r_min·exp(iΔ)` of the radial variable
/// of `ℝ^n`, with weights `w_i = Δ·r_i^n` so that
/// `Σ w_i g(r_i) ≈ ∫_0^∞ g(ρ) ρ^{n-1} dρ` (trapezoid rule in `ln ρ`).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    r_min: f64,
    r_max: f64,
    log_step: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Four-point Lagrange stencil in `ln r`: value ≈ Σ weights[m] · f[first + m].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub first: isize,
    pub weights: [f64; 4],
}

pub const MIN_NODES: usize = 16;

impl RadialGrid {
    pub fn new(dim: usize, r_min: f64, r_max: f64, len: usize) -> Result<Arc<Self>> {
        if dim < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        if !(r_min > 0.0 && r_max.is_finite() && r_min < r_max) {
            return Err(Error::invalid("need 0 < r_min < r_max < ∞"));
        }
        if len < MIN_NODES {
            return Err(Error::invalid("need at least 16 nodes"));
        }
        let log_step = (r_max / r_min).ln() / (len - 1) as f64;
        let nodes: Vec<f64> = (0..len).map(|i| r_min * (i as f64 * log_step).exp()).collect();
        let weights = nodes.iter().map(|r| log_step * r.powi(dim as i32)).collect();
        Ok(Arc::new(Self {
            dim,
            r_min,
            r_max,
            log_step,
            nodes,
            weights,
        }))
    }

    /// Same radial range with twice as many nodes.
    pub fn refined(&self) -> Arc<Self> {
        Self::new(self.dim, self.r_min, self.r_max, 2 * self.len()).expect("refining a valid grid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Δ, the constant spacing in `ln r`.
    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `ln r_i`, computed without going through `r_i`.
    pub fn log_node(&self, i: usize) -> f64 {
        self.r_min.ln() + i as f64 * self.log_step
    }

    /// Indices at least a tenth of the log range away from both ends, where
    /// boundary truncation has no visible effect on smooth decaying profiles.
    pub fn interior(&self) -> core::ops::Range<usize> {
        let margin = self.len() / 10;
        margin..self.len() - margin
    }

    /// `|S^{n-1}|`.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// Index of the node closest to `r` in log distance.
    pub fn nearest_index(&self, r: f64) -> usize {
        let pos = ((r / self.r_min).ln() / self.log_step).round();
        pos.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Cubic Lagrange stencil at radius `r`. Radii below `r_min` reuse the
    /// first node; radii above `r_max` give `None` (the profile is zero there).
    pub fn stencil(&self, r: f64) -> Option<Stencil> {
        let pos = (r / self.r_min).ln() / self.log_step;
        let last = (self.len() - 1) as f64;
        if pos > last {
            return None;
        }
        if pos <= 0.0 {
            return Some(Stencil {
                first: 0,
                weights: [1.0, 0.0, 0.0, 0.0],
            });
        }
        let cell = pos.floor().min(last - 1.0);
        let t = pos - cell;
        if cell == last - 1.0 {
            // Keep the stencil on the grid in the last cell.
            return Some(Stencil {
                first: cell as isize - 2,
                weights: lagrange_weights(t + 1.0),
            });
        }
        Some(Stencil {
            first: cell as isize - 1,
            weights: lagrange_weights(t),
        })
    }
}

/// Weights of the cubic through nodes at offsets -1, 0, 1, 2 evaluated at `t`.
pub(crate) fn lagrange_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// The cubic Lagrange cardinal function on a unit-spaced lattice.
pub(crate) fn lagrange_kernel(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        (1.0 - a) * (1.0 + a) * (2.0 - a) / 2.0
    } else if a < 2.0 {
        (1.0 - a) * (2.0 - a) * (3.0 - a) / 6.0
    } else {
        0.0
    }
}
