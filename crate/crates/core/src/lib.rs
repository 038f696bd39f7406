//! Statistics for per-instance benchmarking of stochastic optimizers.
//!
//! A run of a stochastic optimizer on a fixed problem is a Bernoulli trial:
//! it reaches the target within the iteration budget or it does not. This
//! crate estimates the success probability from repeated runs with proper
//! confidence intervals ([`ci`]), propagates that uncertainty into the
//! repeats-to-confidence metric `R_c` and the computational-effort metric
//! `CETS` ([`metrics`]), plans how many repeats an experiment needs for a
//! target accuracy ([`planner`]), and drives synthetic and SAT-solver
//! experiments ([`sim`], [`walksat`]).

// Validations use negated comparisons (`!(x > 0.0)`) so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ci;
pub mod error;
pub mod metrics;
pub mod planner;
pub mod rng;
pub mod sim;
pub mod special;
pub mod walksat;

pub use ci::{CiMethod, IntervalSource, SuccessEstimate, TrialTally};
pub use error::Error;
pub use metrics::{CetsEstimate, MetricEstimate, Mode, RunRecord, SuccessCurve};
pub use planner::{PlanConfig, PlanResult, PlanRound, SuccessOracle};
pub use rng::RngSpec;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
