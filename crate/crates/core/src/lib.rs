//! Diffusion of cooperative spectrum sensing among selfish cognitive-radio
//! sensors.
//!
//! Sensors on a partially connected network choose each step between local
//! spectrum sensing and pooling SNR reports with their neighbors. Pooling
//! lowers the false-alarm rate but costs reporting energy, so whether
//! cooperation spreads depends on the degree distribution, the shadowing
//! statistics, the detection constraint, and the cost distribution. This
//! crate provides:
//!
//! - closed-form false-alarm probabilities with Monte-Carlo and
//!   linear-algebra oracles ([`sensing`]),
//! - degree-distribution algebra and the nearest-neighbor energy-cost model
//!   ([`network`]),
//! - per-sensor utilities, best responses, and the aggregate network map
//!   ([`game`]),
//! - mean-field fixed-point solvers and time dynamics ([`equilibrium`]),
//! - a seeded agent-based simulation ([`abm`]),
//! - dominance/conduciveness comparisons and parameter sweeps
//!   ([`comparative`]),
//! - config parsing and the `cssdiff` CLI entry points ([`cli`]).

pub mod abm;
pub mod cli;
pub mod comparative;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod network;
pub mod output;
pub mod scenario;
pub mod sensing;

pub use abm::{run_abm, AbmResult, Belief, Population};
pub use error::{Error, Result};
pub use game::{Action, ClusterConvention, GameConfig};
pub use network::{CostModel, DegreeDistribution};
pub use scenario::{IntensityConvention, Scenario};
pub use sensing::SensingParams;
