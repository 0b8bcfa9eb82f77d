//! Observation builders: per-target distance maps, the 4-branched tree
//! observation, the global tensor view, and the projected-occupancy density
//! map. All builders are read-only over an [`EnvState`] snapshot.

mod density;
mod distance;
mod global;
mod tree;

pub use density::{build_density_observation, DensityObservation};
pub use distance::{DistanceMap, UNREACHABLE};
pub use global::{build_global_observation, GlobalObservation, GLOBAL_CHANNELS};
pub use tree::{
    build_tree_observation, flatten_tree, DepthMismatch, NotActive, TreeNode, TreeObservation,
    TREE_FEATURES,
};

use alloc::vec::Vec;

use crate::sim::EnvState;

/// One distance map per agent, keyed by the agent's target.
#[derive(Clone, Debug)]
pub struct DistanceMaps {
    per_agent: Vec<DistanceMap>,
}

impl DistanceMaps {
    pub fn build(env: &EnvState) -> DistanceMaps {
        DistanceMaps {
            per_agent: env
                .agents()
                .iter()
                .map(|a| DistanceMap::build(env.grid(), a.target))
                .collect(),
        }
    }

    pub fn agent(&self, id: usize) -> &DistanceMap {
        &self.per_agent[id]
    }

    pub fn len(&self) -> usize {
        self.per_agent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_agent.is_empty()
    }
}
