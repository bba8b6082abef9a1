//! Bound states of the one-dimensional infinite square well perturbed by a
//! point interaction a*delta(x) + b*delta'(x) at its center, together with
//! numerical machinery relating the two standard parametrizations of the
//! self-adjoint boundary conditions of the kinetic operator: unitary
//! conditions at the walls (phi, m0..m3) and matching conditions at the
//! origin (a, b).
//!
//! - [`numerics`]: dependency-free complex / 2x2 matrix kit and a bracketed
//!   bisection root finder.
//! - [`model`]: domain records, validation, canonicalization.
//! - [`boundary`]: boundary and matching matrices, the wall-side and
//!   origin-side transfer maps, and their consistency residuals.
//! - [`spectrum`]: the quantization condition and its cell-bracketed level
//!   search, plus an independent Dirichlet-wall model for cross-checks.
//! - [`param_map`]: closed maps (a, b, k) -> (phi, m), the per-level
//!   parameter table, and the residual audit of the derivation chain.
//! - [`report`] / [`cli`]: serialization schemas and the command-line tool.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod model;
pub mod numerics;
pub mod param_map;
pub mod report;
pub mod spectrum;

pub use error::{Error, Result};
