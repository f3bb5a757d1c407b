//! Squared-weight local search for weighted k-set packing and maximum-weight
//! independent set in (k+1)-claw-free graphs, with exact ground truth and
//! numerical checks of the slack quantities behind its approximation bounds.

pub mod analysis;
pub mod exact;
pub mod format;
pub mod generators;
pub mod instance;
pub mod ratio;
pub mod rng;
pub mod solver;
pub mod tsv;

pub use exact::{exact_mwis, ExactResult};
pub use format::{parse_instance, parse_solution, ParseError, ParsedInstance};
pub use instance::{
    build_conflict_graph, verify_claw_free, Claw, ConflictGraph, InstanceError, SetPackInstance,
    Solution, VertexId, VertexSet, WeightedSet,
};
