//! Zeroing-type neural dynamics for time-varying quadratic minimization.
//!
//! The crate provides the adaptive model (AZTND) together with the OZNN,
//! GNN, PTCZNN and NCZNN baselines, a fixed-step integrator that records
//! traces, additive noise generators, an angle-of-arrival tracking scenario,
//! and the trace analytics used to compare runs.
//!
//! ```
//! use ztnd_core::{simulate, summarize, IntegratorConfig, ModelKind, ModelSpec, NoiseModel, Vector};
//! use ztnd_core::problem::example1;
//!
//! let cfg = IntegratorConfig { horizon: 2.0, ..Default::default() };
//! let trace = simulate(
//!     &ModelSpec::new(ModelKind::Aztnd),
//!     &example1(),
//!     &NoiseModel::None,
//!     &Vector::from([1.0, -1.0]),
//!     &cfg,
//! )
//! .unwrap();
//! let summary = summarize(&trace, 1e-4, 0.2).unwrap();
//! assert!(summary.steady_state_max < 1.0);
//! ```

// `!(x > y)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aoa;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod problem;

pub use aoa::{build_scenario, track, AoAScenario, Station, Trajectory};
pub use dynamics::{AdaptiveCoefficientSpec, FeedbackForm, ModelKind, ModelSpec, SolverState};
pub use error::{Error, Result};
pub use integrator::{simulate, IntegratorConfig, Method, Termination, Trace};
pub use linalg::{Matrix, Vector};
pub use metrics::{lyapunov_descent, oracle_gap, summarize, Classification, LyapunovReport, RunSummary};
pub use noise::NoiseModel;
pub use problem::{TimeVaryingLinearProblem, TimeVaryingSystem};
