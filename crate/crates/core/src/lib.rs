//! Adversarial stochastic convex optimization testbed.
//!
//! The crate builds the hard function ensembles used in minimax lower bounds for
//! stochastic first-order optimization, serves them through coin-flipping oracles,
//! and runs mirror descent against them so the predicted rates can be measured.
//!
//! * [`packing`] builds Hamming packings of the hypercube (dense and sparse).
//! * [`ensembles`] turns packing vertices into hard instances `g_alpha`.
//! * [`oracles`] serves unbiased noisy values and subgradients (Oracle A and B).
//! * [`solvers`] implements stochastic mirror descent with the `Phi_a` prox family.
//! * [`bounds`] has the information-theoretic calculators and the
//!   optimization-to-identification reduction.
//! * [`harness`] runs sweeps, fits log-log rates and writes reports.

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod norms;
pub mod oracles;
pub mod packing;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
