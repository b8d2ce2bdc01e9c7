//! Statevector simulation and training library for differentiable quantum
//! generative models (DQGM).
//!
//! A DQGM encodes a continuous variable `x` into per-qubit phases with a
//! phase feature map, trains a variational circuit against the resulting
//! latent-space model, and samples the trained distribution in the bit basis
//! after a fixed Fourier-family basis transformation. Because the latent
//! model is a trigonometric polynomial in `x`, first and second derivatives
//! with respect to `x` are available analytically, which makes the model
//! usable inside Fokker-Planck residual losses and implicit time evolution.
//!
//! Crate layout:
//!
//! * [`sim`] — dense statevector simulator: gates, circuits, expectation
//!   values of projected Pauli operators, projective sampling, QFT and
//!   real-amplitude state preparation.
//! * [`map`] — phase feature map, basis transformation, feature-map
//!   sparsification and frequency-spectrum extraction.
//! * [`model`] — ansätze, model evaluation, analytic x-derivatives and
//!   bit-basis sampling circuits.
//! * [`train`] — losses (data MSE, stationary Fokker-Planck residual),
//!   parameter-shift gradients, Adam, staged schedules and Fourier
//!   initialization.
//! * [`evolve`] — implicit time evolution of trained parameters via
//!   Jacobian least-squares Euler updates.
//! * [`stochastics`] — classical references: Gaussian PDFs, quantile
//!   functions, Euler-Maruyama integration, bivariate normal sampling and
//!   the Gaussian copula density.
//! * [`copula`] — two-register copula circuits and bivariate sampling.
//!
//! Bit-ordering convention, fixed project-wide: **qubit 0 is the most
//! significant bit** of every basis-state label. For an `n`-qubit register,
//! basis index `i` assigns qubit `q` the bit `(i >> (n - 1 - q)) & 1`.
//! The phase feature map gives qubit 0 the largest phase coefficient.
//!
//! Determinism: all randomness flows through explicit 64-bit seeds
//! ([`rng`]), and parallel code paths (enabled by the default `parallel`
//! feature) use fixed chunking so results are bitwise identical to the
//! sequential fallback.

pub mod copula;
pub mod error;
pub mod evolve;
mod linalg;
pub mod map;
pub mod model;
pub mod parallel;
pub mod rng;
pub mod sim;
pub mod stochastics;
pub mod train;

pub use error::{Error, Result};
pub use sim::{Circuit, GateKind, GateOp, ProjectedPauliTerm, SampleSet, StateVector};
