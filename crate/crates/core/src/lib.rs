//! Deterministic core of a rural-urban labor migration simulator.
//!
//! Workers sit on a weighted directed social graph. Each carries a signed
//! migration intention that evolves as a forced linear multi-agent system:
//! private inertia, social influence along graph arcs, and a common input
//! equal to the expected urban-rural wage differential of a dual-sector
//! economy. Once a month every worker whose intention points at the other
//! sector migrates with a probability that grows with the intention's
//! magnitude.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! sweep runner live in the `migrasim` crate.
//!
//! Module map:
//!
//! - [`econ`]: wages, relative price and the wage differential driving intentions.
//! - [`graph`]: random digraph generation, Laplacian, spanning-tree test.
//! - [`eigen`] / [`spectrum`]: dense nonsymmetric eigenvalues and their
//!   classification into the structural zero and the rest.
//! - [`dynamics`]: right-hand side, RK4 stepping, consensus prediction.
//! - [`migration`]: monthly migration draws and the hukou constraint.
//! - [`engine`]: scenario configuration, the month loop and summary metrics.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod econ;
pub mod eigen;
pub mod engine;
pub mod graph;
pub mod matrix;
pub mod migration;
pub mod rng;
pub mod spectrum;

pub use dynamics::{ConsensusVerdict, DynamicsParams, IntentionState};
pub use econ::{EconDerived, EconError, EconParams};
pub use engine::{ConfigError, RunStatus, ScenarioConfig, SimResult};
pub use graph::{GraphError, SocialGraph};
pub use matrix::Matrix;
pub use migration::{MigrationCounts, MigrationParams, Sector, WorkerRoster};
pub use spectrum::Spectrum;
