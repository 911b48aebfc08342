//! Simulation and verification toolkit for the triangle count of the random
//! graph G(n,p).
//!
//! The toolkit has three layers:
//!
//! - **Simulation** ([`graph`], [`process`], [`rng`]): sparse graphs, direct
//!   G(n,p) sampling, single-round edge percolation, and the iterated
//!   process that thins K_n round by round with retention probability
//!   `eps` until `eps^I = p`.
//! - **Statistics** ([`triangles`], [`montecarlo`]): exact triangle counts,
//!   per-round co-degree statistics, Lipschitz influence probes, parallel
//!   reproducible trial ensembles, empirical tail estimation, and an exact
//!   small-instance distribution oracle.
//! - **Bounds** ([`bounds`], [`monitor`]): every closed-form quantity used
//!   by the concentration argument (McDiarmid tails, moment formulas,
//!   per-round thresholds, deviation radii, case inequalities, admissible
//!   parameter region) plus a monitor that evaluates the per-round
//!   thresholds on simulated traces.
//!
//! [`config`] and [`report`] provide the file interfaces used by the
//! `tritail` command-line tool: a flat TOML experiment config, CSV result
//! tables, and JSON manifests.

pub mod bounds;
pub mod config;
pub mod graph;
pub mod monitor;
pub mod montecarlo;
pub mod process;
pub mod report;
pub mod rng;
pub mod triangles;

pub use graph::Graph;
pub use montecarlo::{Ensemble, ExactDistribution, ExperimentConfig, TailEstimate};
pub use process::{ProcessTrace, Schedule};
pub use triangles::RoundStats;

/// Errors produced by the library's operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Exhaustive enumeration was requested for an instance with more edge
    /// slots than the supported limit.
    #[error(
        "exact enumeration refused: n = {n} has {edge_slots} edge slots, \
         the limit is {limit} (2^{limit} graphs)"
    )]
    EnumerationTooLarge {
        n: usize,
        edge_slots: u64,
        limit: u32,
    },

    /// The operation would exceed a documented resource limit.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
