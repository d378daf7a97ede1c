//! Restricted random walker on `{0, 1, ..., L}`.
//!
//! A walker at site `n` attempts a move with probability `g(n) = (n/L)^a`,
//! stepping up or down with probability `g(n)/2` each.  Site 0 absorbs,
//! site L reflects.  This crate provides:
//!
//! - [`chain`]: exact iteration of the discrete master equation, the
//!   first-return-time distribution, a seeded Monte Carlo simulator, and a
//!   tridiagonal mean-first-passage solver;
//! - [`specfun`]: fractional-order Bessel functions, their zeros, and the
//!   Fourier-Bessel orthogonality integral;
//! - [`continuum`]: the analytic eigenseries solution of the continuum
//!   diffusion limit and its return-time density;
//! - [`qstats`]: q-exponential evaluation, tail-slope estimation of q,
//!   one-parameter beta fitting, and the Delta area discrepancy with its
//!   system-size scan.
//!
//! ```
//! use rrw::chain::{WalkSpec, return_distribution};
//!
//! let spec = WalkSpec::new(1.0, 100).unwrap();
//! let series = return_distribution(&spec, 2_000).unwrap();
//! // First-step return probability is g(1)/2 = 1/(2 L).
//! assert_eq!(series.value(1), 0.005);
//! ```

pub mod chain;
pub mod continuum;
mod error;
pub mod qstats;
pub mod specfun;

pub use error::{Error, Result};
