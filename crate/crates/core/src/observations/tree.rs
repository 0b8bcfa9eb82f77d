//! The 4-branched tree observation.
//!
//! From the agent's pose, every allowed transition starts a branch; each
//! branch walks the track until a decision point, a dead-end or the agent's
//! target, recording what it passes, and the stop cell becomes a node. Branch
//! slots are ordered Left, Forward, Right, Backward relative to the heading
//! at the parent, so the observation is independent of cell orientation.
//! Missing branches and absent distance features use the -infinity sentinel,
//! keeping the flattened size a function of depth alone.
//!
//! Node features (slot = spec index - 1):
//!
//! 1. distance at which the own target lies on this segment
//! 2. distance of the first other-agent target on this segment
//! 3. distance of the first other agent on this segment
//! 4. conflict flag: an opposite-direction agent sits on the segment and the
//!    projected meeting point (both sides advancing one cell per step) falls
//!    inside the segment
//! 5. distance of the first unusable switch (a switch offering us no choice)
//! 6. cells from the parent node to this node
//! 7. minimum remaining travel distance from this node's pose to the target
//! 8. number of same-direction agents on the segment
//! 9. number of opposite-direction agents on the segment

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::direction::{Direction, RelativeDir};
use crate::grid::CellPos;
use crate::observations::distance::DistanceMap;
use crate::sim::{AgentStatus, EnvState};

pub const TREE_FEATURES: usize = 9;

const ABSENT: f64 = f64::NEG_INFINITY;

/// One node: 9 features plus up to four children in L, F, R, B slot order.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub features: [f64; TREE_FEATURES],
    pub children: [Option<Box<TreeNode>>; 4],
}

impl TreeNode {
    fn leaf(features: [f64; TREE_FEATURES]) -> TreeNode {
        TreeNode {
            features,
            children: [None, None, None, None],
        }
    }
}

/// A built tree plus the depth it was built with.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeObservation {
    pub root: TreeNode,
    pub depth: u32,
}

/// The observed agent is not on the map (ReadyToDepart or Done).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotActive {
    pub agent: usize,
}

impl core::fmt::Display for NotActive {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "agent {} is not active on the map", self.agent)
    }
}

/// Flatten was asked for a different depth than the tree was built with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthMismatch {
    pub built: u32,
    pub requested: u32,
}

impl core::fmt::Display for DepthMismatch {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "tree built with depth {} but flattened at depth {}",
            self.built, self.requested
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NotActive {}
#[cfg(feature = "std")]
impl std::error::Error for DepthMismatch {}

enum Stop {
    Target,
    Switch,
    DeadEnd,
    /// Off the rails: inconsistent grid or walk-length guard tripped.
    Truncated,
}

struct Walker<'a> {
    env: &'a EnvState,
    dist: &'a DistanceMap,
    agent_id: usize,
    own_target: CellPos,
    /// Per cell: some other agent's target sits here.
    other_targets: Vec<bool>,
    /// Guard against switchless loops in hand-built grids.
    max_walk: u32,
}

impl Walker<'_> {
    fn cell_index(&self, pos: CellPos) -> usize {
        self.env.grid().index(pos)
    }

    /// Walks one branch from `start` (already one step away from the parent
    /// node at `start_distance` cells from the agent) and recurses at the
    /// resulting node while `depth_left` allows.
    fn walk(
        &self,
        start: CellPos,
        start_heading: Direction,
        start_distance: u32,
        parent_distance: u32,
        depth_left: u32,
    ) -> TreeNode {
        let grid = self.env.grid();
        let mut features = [ABSENT; TREE_FEATURES];
        let mut cur = start;
        let mut heading = start_heading;
        let mut k = start_distance;
        let mut same_dir = 0u32;
        let mut opposite_dir = 0u32;
        let mut conflict = false;

        let stop = loop {
            if let Some(j) = self.env.occupant(cur) {
                if j != self.agent_id {
                    if features[2] == ABSENT {
                        features[2] = k as f64;
                    }
                    let other = self.env.agent(j).direction.expect("active occupant");
                    if other == heading {
                        same_dir += 1;
                    } else if other == heading.opposite() {
                        opposite_dir += 1;
                        // Meeting point at ~k/2 cells from the agent; a
                        // conflict only if that falls inside this segment.
                        if k.div_ceil(2) >= start_distance {
                            conflict = true;
                        }
                    }
                }
            }
            if self.other_targets[self.cell_index(cur)] && features[1] == ABSENT {
                features[1] = k as f64;
            }
            if cur == self.own_target {
                features[0] = k as f64;
                break Stop::Target;
            }
            let code = grid.get(cur);
            match code.count_choices(heading) {
                0 => break Stop::Truncated,
                1 => {
                    let exit = code.outgoing(heading).next().unwrap();
                    if exit == heading.opposite() {
                        break Stop::DeadEnd;
                    }
                    if code.is_switch() && features[4] == ABSENT {
                        features[4] = k as f64;
                    }
                    match grid.neighbor(cur, exit) {
                        None => break Stop::Truncated,
                        Some(next) => {
                            cur = next;
                            heading = exit;
                            k += 1;
                        }
                    }
                    if k - start_distance > self.max_walk {
                        break Stop::Truncated;
                    }
                }
                _ => break Stop::Switch,
            }
        };

        features[3] = if conflict { 1.0 } else { 0.0 };
        features[5] = (k - parent_distance) as f64;
        features[6] = self.dist.get_f64(cur, heading);
        features[7] = same_dir as f64;
        features[8] = opposite_dir as f64;

        let mut node = TreeNode::leaf(features);
        if depth_left > 0 && matches!(stop, Stop::Switch | Stop::DeadEnd) {
            let code = grid.get(cur);
            for (slot, rel) in RelativeDir::BRANCH_ORDER.into_iter().enumerate() {
                let exit = rel.apply(heading);
                if !code.allows(heading, exit) {
                    continue;
                }
                if let Some(next) = grid.neighbor(cur, exit) {
                    node.children[slot] =
                        Some(Box::new(self.walk(next, exit, k + 1, k, depth_left - 1)));
                }
            }
        }
        node
    }
}

/// Builds the tree observation for one active agent. `dist` must be the
/// distance map of that agent's target (feature 7).
pub fn build_tree_observation(
    env: &EnvState,
    agent_id: usize,
    depth: u32,
    dist: &DistanceMap,
) -> Result<TreeObservation, NotActive> {
    let agent = env.agent(agent_id);
    if agent.status != AgentStatus::Active {
        return Err(NotActive { agent: agent_id });
    }
    let pos = agent.position.unwrap();
    let heading = agent.direction.unwrap();
    let grid = env.grid();

    let mut other_targets = vec![false; grid.width() as usize * grid.height() as usize];
    for other in env.agents() {
        if other.id != agent_id {
            other_targets[grid.index(other.target)] = true;
        }
    }
    let walker = Walker {
        env,
        dist,
        agent_id,
        own_target: agent.target,
        other_targets,
        max_walk: 4 * grid.width() as u32 * grid.height() as u32,
    };

    let code = grid.get(pos);
    let mut features = [ABSENT; TREE_FEATURES];
    if pos == agent.target {
        features[0] = 0.0;
    }
    if walker.other_targets[grid.index(pos)] {
        features[1] = 0.0;
    }
    features[3] = 0.0;
    if code.is_switch() && code.count_choices(heading) == 1 {
        features[4] = 0.0;
    }
    features[5] = 0.0;
    features[6] = dist.get_f64(pos, heading);
    features[7] = 0.0;
    features[8] = 0.0;

    let mut root = TreeNode::leaf(features);
    if depth > 0 {
        for (slot, rel) in RelativeDir::BRANCH_ORDER.into_iter().enumerate() {
            let exit = rel.apply(heading);
            if !code.allows(heading, exit) {
                continue;
            }
            if let Some(next) = grid.neighbor(pos, exit) {
                root.children[slot] = Some(Box::new(walker.walk(next, exit, 1, 0, depth - 1)));
            }
        }
    }
    Ok(TreeObservation { root, depth })
}

/// Number of nodes in a full 4-ary tree with `depth` levels below the root.
fn capacity(depth: u32) -> usize {
    (0..=depth).map(|k| 4usize.pow(k)).sum()
}

/// Pre-order (node, then L, F, R, B subtrees) flattening into a fixed-length
/// vector: `9 * sum(4^k, k=0..=depth)` values regardless of topology, with
/// missing nodes contributing -infinity sentinels.
pub fn flatten_tree(obs: &TreeObservation, depth: u32) -> Result<Vec<f64>, DepthMismatch> {
    if obs.depth != depth {
        return Err(DepthMismatch {
            built: obs.depth,
            requested: depth,
        });
    }
    let mut out = Vec::with_capacity(TREE_FEATURES * capacity(depth));
    emit(Some(&obs.root), depth, &mut out);
    Ok(out)
}

fn emit(node: Option<&TreeNode>, levels_below: u32, out: &mut Vec<f64>) {
    match node {
        None => {
            let missing = TREE_FEATURES * capacity(levels_below);
            out.extend(core::iter::repeat_n(ABSENT, missing));
        }
        Some(n) => {
            out.extend_from_slice(&n.features);
            if levels_below > 0 {
                for child in &n.children {
                    emit(child.as_deref(), levels_below - 1, out);
                }
            }
        }
    }
}
