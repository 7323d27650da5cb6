//! Exact Shapley and Myerson attribution for multi-agent systems.
//!
//! The players of the underlying coalitional game are both agent policies
//! and individual agent attributes. Worth comes from a simulator: a partial
//! coalition is completed through a replacement rule (absent attributes
//! drop to zero, absent policies to do-nothing) and rolled out end to end.
//! Constraining the game on a knowledge graph built from an expert
//! classification of the attributes lets the Myerson analysis reuse
//! connected-component scores and skip the bulk of the power set.
//!
//! The crate ships the analysis engine, the Arena proof-of-case
//! environment, the significance tests used to separate relevant players
//! from noise, and the report plumbing behind the CLI.

pub mod arena;
pub mod coalition;
pub mod error;
pub mod graph;
pub mod hkg;
pub mod report;
pub mod rollout;
pub mod stats;

#[cfg(test)]
pub(crate) mod test_support;

pub use coalition::{
    exact_shapley, shapley_weight, subsets_excluding, AttributionVector, CharacteristicOracle,
    Coalition, GameSpec, PlayerId, MAX_PLAYERS,
};
pub use error::{Error, OracleError, Result, SimulatorError};
pub use graph::{
    components, exact_myerson, graph_value, ComponentCover, InteractionGraph, MyersonResult,
};
pub use hkg::{build_hkg, decomposability_probe, AgentFeatureSpec, AttributeClass, HkgGraph};
pub use rollout::{
    apply_replacement, rollout_myerson, rollout_shapley, BaselineSet, EvalCounter,
    FullAssignment, SampleMatrix, Simulator,
};
pub use stats::{mann_whitney_u, prune_relevant, zero_atom_test, RelevanceVerdict, TestResult};
