//! The fixed function corpus the verifiers run over.
//!
//! Members, in order:
//! * heat kernels `h_t(ρ) = (4πt)^{-n/2} e^{-ρ²/4t}` for `t ∈ {1/4, 1, 4}`,
//! * `ρ^a e^{-ρ²}` for `a ∈ {0, 1/2, 1, 2}`,
//! * smoothed annulus indicators `½[tanh((ρ-a)/w) - tanh((ρ-b)/w)]`,
//! * nonnegative random superpositions of Gaussians at mixed scales.
//!
//! The random members come from a ChaCha8 stream seeded with the corpus seed
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`), so a corpus is a pure function
//! of `(seed, grid)`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::radial::{RadialFunction, RadialGrid};
use crate::math::Real;

pub const DEFAULT_SEED: u64 = 0x5357_4c41_4232_3032;
pub const HEAT_TIMES: [f64; 3] = [0.25, 1.0, 4.0];
pub const POWER_EXPONENTS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
/// `(inner, outer)` radii of the annuli.
pub const ANNULI: [(f64, f64); 2] = [(0.5, 1.0), (1.0, 2.0)];
pub const ANNULUS_WIDTH: f64 = 0.2;
pub const RANDOM_MEMBERS: usize = 3;
/// Gaussians per random member.
pub const RANDOM_TERMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    HeatKernel,
    PowerGaussian,
    Annulus,
    Random,
    SlowDecay,
    Dilation,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::HeatKernel => "heat_kernel",
            Family::PowerGaussian => "power_gaussian",
            Family::Annulus => "annulus",
            Family::Random => "random",
            Family::SlowDecay => "slow_decay",
            Family::Dilation => "dilation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub id: usize,
    pub family: Family,
    /// Short description with the family parameters, e.g. `h_t t=0.25`.
    pub label: String,
    pub function: RadialFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    seed: u64,
    members: Vec<Member>,
}

/// `h_t(ρ) = (4πt)^{-n/2} e^{-ρ²/4t}`, the heat kernel at time `t`.
pub fn heat_kernel_profile(grid: &Arc<RadialGrid>, t: f64) -> RadialFunction {
    let c = (4.0 * PI * t).powf(-0.5 * grid.dim() as f64);
    RadialFunction::from_fn(grid, |r| c * (-r * r / (4.0 * t)).exp()).expect("finite profile")
}

/// `(1 + ρ²)^{-(n+1)/2}`: decays too slowly to be integrable against
/// `|x|^α` for large `α`, so it is kept out of the default corpus.
pub fn slow_decay_profile(grid: &Arc<RadialGrid>) -> RadialFunction {
    let e = -0.5 * (grid.dim() as f64 + 1.0);
    RadialFunction::from_fn(grid, |r| (1.0 + r * r).powf(e)).expect("finite profile")
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Corpus {
    /// The default corpus on `grid`.
    pub fn new(grid: &Arc<RadialGrid>, seed: u64) -> Result<Self> {
        let mut members = Vec::new();
        let mut push = |family, label: String, function: RadialFunction| {
            let id = members.len();
            members.push(Member {
                id,
                family,
                label,
                function,
            });
        };
        for &t in &HEAT_TIMES {
            push(Family::HeatKernel, format!("h_t t={t}"), heat_kernel_profile(grid, t));
        }
        for &a in &POWER_EXPONENTS {
            let f = RadialFunction::from_fn(grid, |r| r.powf(a) * (-r * r).exp())?;
            push(Family::PowerGaussian, format!("rho^a e^-rho^2 a={a}"), f);
        }
        for &(a, b) in &ANNULI {
            let w = ANNULUS_WIDTH;
            let f = RadialFunction::from_fn(grid, |r| 0.5 * (((r - a) / w).tanh() - ((r - b) / w).tanh()))?;
            push(Family::Annulus, format!("annulus [{a}, {b}] w={w}"), f);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..RANDOM_MEMBERS {
            // Amplitudes in [0.2, 1), variances 10^[-1, 1).
            let terms: Vec<(f64, f64)> = (0..RANDOM_TERMS)
                .map(|_| {
                    let c = 0.2 + 0.8 * uniform(&mut rng);
                    let t = 10f64.powf(2.0 * uniform(&mut rng) - 1.0);
                    (c, t)
                })
                .collect();
            let f = RadialFunction::from_fn(grid, |r| terms.iter().map(|(c, t)| c * (-r * r / (4.0 * t)).exp()).sum())?;
            push(Family::Random, format!("random #{k}"), f);
        }
        let corpus = Self { seed, members };
        corpus.check_contained()?;
        Ok(corpus)
    }

    /// Only the heat-kernel members.
    pub fn gaussians(grid: &Arc<RadialGrid>) -> Result<Self> {
        Ok(Self::new(grid, DEFAULT_SEED)?.filter(|m| m.family == Family::HeatKernel))
    }

    /// A single-member corpus holding the slow-decay profile.
    pub fn slow_decay(grid: &Arc<RadialGrid>) -> Self {
        Self {
            seed: 0,
            members: alloc::vec![Member {
                id: 0,
                family: Family::SlowDecay,
                label: format!("(1+rho^2)^-{}", 0.5 * (grid.dim() as f64 + 1.0)),
                function: slow_decay_profile(grid),
            }],
        }
    }

    /// Wraps arbitrary functions, e.g. a dilation family.
    pub fn from_functions(family: Family, functions: Vec<(String, RadialFunction)>) -> Self {
        let members = functions
            .into_iter()
            .enumerate()
            .map(|(id, (label, function))| Member {
                id,
                family,
                label,
                function,
            })
            .collect();
        Self { seed: 0, members }
    }

    /// Members satisfying `keep`, with their original ids.
    pub fn filter(&self, keep: impl Fn(&Member) -> bool) -> Self {
        Self {
            seed: self.seed,
            members: self.members.iter().filter(|m| keep(m)).cloned().collect(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn grid(&self) -> Option<&Arc<RadialGrid>> {
        self.members.first().map(|m| m.function.grid())
    }

    /// Every member is nonzero and has no visible mass at the grid edges.
    fn check_contained(&self) -> Result<()> {
        for m in &self.members {
            if m.function.is_zero() {
                return Err(Error::invalid(format!("corpus member {} vanishes", m.label)));
            }
            if let Some(w) = m.function.weighted_lp_norm(1.0, 0.0)?.warning() {
                return Err(Error::invalid(format!("corpus member {} is not contained in the grid: {w:?}", m.label)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<RadialGrid> {
        RadialGrid::new(3, 1e-4, 1e2, 256).unwrap()
    }

    #[test]
    fn composition_and_determinism() {
        let a = Corpus::new(&grid(), 7).unwrap();
        let b = Corpus::new(&grid(), 7).unwrap();
        let c = Corpus::new(&grid(), 8).unwrap();
        assert_eq!(a.len(), 3 + 4 + 2 + RANDOM_MEMBERS);
        assert_eq!(a, b);
        assert_ne!(a.members()[10].function, c.members()[10].function);
        assert!(a.members().iter().all(|m| m.function.values().iter().all(|&v| v >= 0.0)));
    }

    #[test]
    fn heat_kernels_have_unit_mass() {
        for m in Corpus::gaussians(&grid()).unwrap().members() {
            assert!((m.function.integrate() - 1.0).abs() < 1e-8, "{}", m.label);
        }
    }

    #[test]
    fn slow_decay_is_kept_apart() {
        let g = grid();
        let f = slow_decay_profile(&g);
        assert!(f.weighted_lp_norm(1.0, 0.0).unwrap().warning().is_some());
        assert_eq!(Corpus::slow_decay(&g).members()[0].family, Family::SlowDecay);
    }
}
