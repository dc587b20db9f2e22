//! Exact-arithmetic analyzer and simulator for permission-graph SCC risk.
//!
//! Builds braid words from gated multi-walker random walks on ratchet SCCs,
//! tracks their growth through the integer Burau representation at `t = -1`,
//! and classifies deployments into the focused/dispersed regimes, with the
//! statistics and lower bounds needed to validate the pipeline at desk scale.

pub mod bounds;
pub mod burau;
pub mod classify;
pub mod corpus;
pub mod experiments;
pub mod graph;
pub mod rng;
pub mod stats;
pub mod walk;

pub use burau::{ExactMatrix, LOG_SR_INJECTION, SR_INJECTION};
pub use classify::{DeploymentRecord, Disagreement, Regime, Thresholds};
pub use graph::{GraphData, PermissionGraph, ValidationReport, WarAssignment};
pub use walk::{BraidTrace, WalkConfig, WalkResult};
