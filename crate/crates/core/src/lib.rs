//! Sparse additive regression on regular lattices.
//!
//! Observations on a full factorial design are reduced to their marginal averages,
//! each marginal is transformed with an exact DFT, and the additive components are
//! estimated by a complexity-penalized truncation rule (the MAP estimator) or by
//! blockwise soft-thresholding (the SPAM baseline). A Monte-Carlo harness compares
//! the two on synthetic test functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod error;
pub mod fourier;
pub mod io;
pub mod lattice;
pub mod map;
pub mod rng;
pub mod simulation;
pub mod spam;

pub use error::{Error, Result};
pub use fourier::{energy_tail, forward_dft, inverse_dft, Spectrum};
pub use lattice::{full_lattice_average, synthesize_marginal, validate_design, AveragedData, ComponentFunction, LatticeDesign};
pub use map::{
    estimate_tau, map_fit, map_objective, validate_priors, Candidate, EnergyConvention, MapFit, PriorConfig,
    TieBreak,
};
pub use rng::StreamKey;
pub use simulation::{amse, brute_force_map, oracle_lambda, run_scenario, ScenarioConfig, SpamLambda};
pub use spam::{spam_fit, spam_shrink, OracleLambda, SpamFit};
