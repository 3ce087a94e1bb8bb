//! heatlab — a numerical laboratory for the heat content of ball unions in
//! Euclidean space.
//!
//! The library computes the heat content `H_Ω(t)` (the heat retained in an
//! open set Ω that starts at unit temperature while the rest of `R^m` starts
//! at zero) and the heat loss `F_Ω(t) = |Ω| − H_Ω(t)` for finite and infinite
//! unions of pairwise disjoint balls. On top of the estimators it provides
//!
//! * exact ball/lens geometry with uniform sampling ([`geometry`]),
//! * the Euclidean heat kernel and explicit two-sided kernel-bound constants
//!   ([`kernel`]),
//! * deterministic quadrature and Monte Carlo estimators for `H`, `F` and
//!   pair cross terms ([`estimators`]),
//! * the local volume functionals `μ`, `ν` and their normalized integrals
//!   that sandwich `H` and `F` ([`functionals`]),
//! * numerical verification harnesses for the sandwich inequalities, the
//!   lattice decoupling bound, the sum–integral lemma and the basic
//!   monotonicity/convexity facts ([`theorems`]),
//! * the shrinking-radius lattice example with certified truncation, its
//!   regime classification, closed-form regime constants and power-law
//!   fitting ([`asymptotics`]),
//! * a small CLI surface for sweeps and machine-readable reports ([`cli`]).
//!
//! Everything that consumes randomness takes an explicit `(seed, stream)`
//! pair and is bitwise reproducible regardless of thread count.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod functionals;
pub mod geometry;
pub mod kernel;
pub mod quad;
pub mod rng;
pub mod special;
pub mod theorems;

pub use error::{Error, Result};

pub use geometry::{BallUnion, SeparationGap};
pub use kernel::LiYauConstants;

