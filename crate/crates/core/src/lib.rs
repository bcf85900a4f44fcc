//! Truncated-Wigner phase-space simulator for open (pumped and damped)
//! inline Bose-Hubbard chains, with a Gaussian-correlation analysis layer:
//! quadrature squeezing, Duan-Simon inseparability, Reid EPR-steering,
//! van Loock-Furusawa pairwise/triple inequalities and tripartite
//! inferred-variance steering products, all with quadrature-angle
//! optimization.
//!
//! The crate is organised around five modules:
//!
//! - [`model`]: chain configuration, drift, noise placement, and the exact
//!   non-interacting coupling structure (classical fixed points).
//! - [`engine`]: stochastic trajectory integration over large ensembles
//!   with deterministic seeding and mergeable moment accumulators.
//! - [`correlations`]: every criterion computed from a Gaussian moment
//!   snapshot, with angle optimization and batch-means error bars.
//! - [`oracle`]: classical mean-field integration and exact linear-regime
//!   moment evolution used to validate the stochastic engine.
//! - [`cli`]: experiment orchestration (config files, checkpoints, CSV/JSON
//!   reports, reference-table reproduction).

pub mod cli;
pub mod correlations;
pub mod engine;
pub mod model;
pub mod oracle;

pub use model::{ChainConfig, ChainParams, WignerState};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex<f64>;
