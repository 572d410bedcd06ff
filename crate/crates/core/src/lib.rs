//! Simulation laboratory for Heckman–Opdam stochastic processes.
//!
//! The crate builds integral root systems and their Weyl groups, evaluates the
//! drift and reflection-jump coefficients of the Heckman–Opdam Laplacian,
//! simulates the radial diffusion in the Weyl chamber together with its mirror
//! coupling, constructs the full jump process by two independent routes
//! (per-step thinning and the root-by-root skew-product insertion), and runs
//! the Monte Carlo estimators that probe the bounded harmonic functions of the
//! operator: triviality of the radial Poisson boundary and the |W|-dimensional
//! space spanned by the chamber-stabilization probabilities `h_w`.
//!
//! Everything downstream of a `(config, seed)` pair is bit-deterministic:
//! trajectories draw from per-trajectory counter-seeded streams, ensemble
//! reductions use fixed-shape pairwise summation, and the thread budget is
//! observationally irrelevant.

pub mod config;
pub mod diffusion;
pub mod error;
pub mod estimator;
pub mod jumps;
pub mod linalg;
pub mod ops;
pub mod oracle;
pub mod parallel;
pub mod report;
pub mod rng;
pub mod rootsys;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::Point;
pub use ops::Model;
