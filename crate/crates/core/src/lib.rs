//! Permanents of row-constrained random matrices.
//!
//! A random `n × n` matrix `Y = X ⊙ Z` is formed from a 0–1 matrix `X` drawn
//! uniformly among matrices with exactly `r_i` ones in row `i`, and an
//! independent matrix `Z` of i.i.d. positive weights with mean `ν` and second
//! moment `δ`. This crate computes `per(Y)` exactly, evaluates the closed-form
//! first and second moments of `T_n = per(Y)`, checks them against brute-force
//! enumeration, and runs seeded Monte Carlo experiments on the scaled
//! permanent `T_n / μ_n`.
//!
//! Module map:
//!
//! * [`domain`]: distributions, model specs, dense matrices, log-scaled values.
//! * [`permanent`]: naive expansion and Gray-code Ryser kernels.
//! * [`model`]: uniform sampling of the constrained class and its enumeration.
//! * [`moments`]: closed forms (`μ_n`, `α`, `β`, bounds) and exact oracles.
//! * [`experiments`]: trial runner, concentration sweeps, CSV output.
//! * [`cli`]: the `permlab` command-line front end.

pub mod cli;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod model;
pub mod moments;
pub mod permanent;

pub use domain::{DenseMatrix, Distribution, ModelSpec, ScaledValue};
pub use error::{Error, Result};
