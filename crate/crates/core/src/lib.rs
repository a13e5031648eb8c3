//! Penalized predictive regression for time series whose regressors mix
//! stationary, unit-root and cointegrated processes.
//!
//! The crate provides
//!
//! - a weighted-L1 coordinate-descent solver with KKT diagnostics ([`solver`]),
//! - plain, standardized, adaptive and twin-adaptive LASSO fits plus the OLS,
//!   oracle and random-walk-with-drift benchmarks ([`estimators`]),
//! - seeded simulators for three mixed-persistence designs ([`dgp`]),
//! - tuning-rate schedules, consecutive-block cross-validation, calibration
//!   and BIC selection ([`tuning`]),
//! - a Monte Carlo harness with forecast and screening metrics ([`evaluation`]),
//! - a rolling-window return forecasting pipeline ([`empirical`]).
//!
//! The `twinlasso` binary wraps the simulation, Monte Carlo and forecasting
//! entry points; see [`cli`].

pub mod cli;
pub mod config;
pub mod data;
pub mod dgp;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod report;
pub mod rng;
pub mod solver;
pub mod tuning;

pub use data::TimeSeriesDataset;
pub use dgp::{Design, Persistence, TruthInfo};
pub use error::{Error, Result};
pub use estimators::{Family, FitOptions};
pub use solver::{FitResult, PenaltySpec, SolverOptions};
