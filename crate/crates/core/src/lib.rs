//! Coverage probabilities of LoRa uplinks whose gateway can recover one
//! collided packet by successive interference cancellation (SIC).
//!
//! * [`params`]: per-SF constants and radio units.
//! * [`geometry`]: SF rings, traffic intensity, distance sampling.
//! * [`specfun`]: the `₂F₁(1, b; 1+b; z)` family and a quadrature cross-check.
//! * [`analytic`]: closed-form connection, capture and SIC probabilities.
//! * [`mcsim`]: seedable, parallel Monte Carlo of the same receiver.
//! * [`experiments`]: sweeps, capacity tables and planning.
//! * [`config`], [`cli`]: scenario files and the `lorasic` binary.

// NaN inputs must fail the `!(x > 0.0)` style guards.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod mcsim;
pub mod params;
pub mod quadrature;
pub mod specfun;

pub use analytic::{CoverageBreakdown, NetworkConfig};
pub use error::{Error, Result};
