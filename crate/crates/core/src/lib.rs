//! Numerical machinery for weighted inequalities of the fractional Laplacian
//! on radial functions.
//!
//! Every function lives on a logarithmic radial grid ([`RadialGrid`]), so that
//! dilations `f(x) -> λ^a f(λx)` are exact index shifts. On top of that grid the
//! crate provides
//!
//! * the heat semigroup `e^{tΔ}` and thermic Besov norms ([`heat`]),
//! * the Riesz potential `(-Δ)^{-s/2}`, its truncated kernels and its heat
//!   representation ([`riesz`]),
//! * validators for the exponent relations of the Stein-Weiss,
//!   Caffarelli-Kohn-Nirenberg and related inequalities ([`params`]),
//! * corpus-based numerical verification of those inequalities ([`verify`]),
//! * a normalized nonlinear power iteration for the Stein-Weiss best constant
//!   with `p = 2` plus two independent oracles ([`extremal`]).
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `parallel` feature
//! to assemble kernel rows with rayon.

#![no_std]
#![cfg_attr(any(test, feature = "parallel"), allow(unused_imports))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod error;
pub mod extremal;
pub mod heat;
pub mod params;
pub mod quad;
pub mod radial;
pub mod riesz;
pub mod special;
pub mod verify;

mod math;
mod par;

pub use error::{Error, Result, Warning};
pub use heat::{BesovNorm, HeatSemigroup, KernelKind, KernelMatrix, TimeGrid};
pub use params::{ParamSet, ValidationReport};
pub use radial::{RadialFunction, RadialGrid};
pub use riesz::RieszOperator;
