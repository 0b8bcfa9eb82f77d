//! Deterministic multi-agent rail-grid simulation core.
//!
//! A grid world where trains move along bit-packed per-cell transition maps.
//! Each cell stores, for every incoming heading, the set of allowed outgoing
//! headings in 4x4 bits, so a whole network costs two bytes per cell and every
//! movement query is a constant-time bit probe.
//!
//! The crate is organised around the life of an episode:
//!
//! * [`grid`] / [`transitions`] — cells, transition codes, cell classification
//!   and whole-grid consistency validation.
//! * [`generate`] — procedural construction of valid networks (cities,
//!   corridors) and agent task assignment.
//! * [`sim`] — the synchronous step engine: actions, departures, cell
//!   exclusivity, malfunctions, deadlock detection.
//! * [`observations`] — distance maps, the 4-branched tree observation, the
//!   global tensor and the projected-occupancy density map.
//! * [`rewards`] — per-step rewards, episode returns and benchmark scoring.
//! * [`policy`] — the non-learned baselines (random, forward, shortest path).
//!
//! Everything is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! companion harness crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod direction;
pub mod generate;
pub mod grid;
pub mod observations;
pub mod policy;
pub mod rewards;
pub mod sim;
pub mod transitions;

pub use direction::{Direction, RelativeDir};
pub use generate::{
    assign_tasks, generate_sparse, City, GenerateError, GeneratorParams, TaskAssignmentError,
};
pub use grid::{CellPos, ConsistencyViolation, Grid};
pub use observations::{
    build_density_observation, build_global_observation, build_tree_observation, flatten_tree,
    DensityObservation, DistanceMap, DistanceMaps, GlobalObservation, TreeNode, TreeObservation,
};
pub use policy::{ForwardPolicy, Policy, RandomPolicy, ShortestPathPolicy};
pub use rewards::{
    benchmark_score, episode_return, normalized_return, step_reward, EpisodeTrace, RewardConfig,
    Score,
};
pub use sim::{
    Action, Agent, AgentStatus, AgentTask, EffectiveMove, EnvState, MalfunctionParams, ResetError,
    StepError, StepOutcome,
};
pub use transitions::{classify_cell, CaseType, CellTransitions, TileShape};
