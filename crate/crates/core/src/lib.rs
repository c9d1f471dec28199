//! Weight-sequence and weight-function calculus with certified constant tracking.
//!
//! The crate is organised around five pillars:
//!
//! * [`weightseq`] — weight sequences `M = (M_j)`, base sequences `(k_j)`, and the
//!   growth/regularity condition checkers (derivation closure, moderate growth,
//!   lacunary ratios, Liess conditions).
//! * [`weightfn`] — weight functions `ω`, numerical Legendre conjugation `φ*`, and
//!   the associated sequence family `M^(ρ)`.
//! * [`interp`] — Landau–Kolmogorov, Taylor-remainder, mixed, and Cartan–Gorny
//!   bound calculators with explicit constants, plus the polarization identity and
//!   empirical verification against the [`corpus`] of test functions.
//! * [`lacunary`] — bound-propagation engines that turn derivative bounds known only
//!   at lacunary orders `k_j` into certified all-order bounds.
//! * [`construct`] — the counterexample construction `(N, k_j, ℓ_j)` separating
//!   lacunary from full classes when `k_{j+1}/k_j` is unbounded.
//!
//! All sequence arithmetic is carried out in the natural-log domain (base-2 in
//! [`construct`], where magnitudes reach iterated exponentials and are handled by
//! [`tower`]). The crate is `no_std` + `alloc`; IO, the CLI, and file formats live
//! in the companion `ultraweights` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod construct;
pub mod corpus;
pub mod error;
pub mod interp;
pub mod lacunary;
pub(crate) mod real;
pub mod report;
pub mod tower;
pub mod weightfn;
pub mod weightseq;

pub use error::Error;
pub use report::{ConditionReport, Trend, TrendConfig, Verdict, Witness};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
