//! Projected-occupancy density map.
//!
//! Every agent is assumed to follow its shortest path. The cell it would
//! reach `t` steps from now contributes `d(t) = exp(-t / sqrt(t_max))`, so
//! near-future occupancy weighs more than far-future occupancy. Each agent
//! observes two arrays: its own projected values and the per-cell mean of
//! every other agent's values.

use alloc::vec;
use alloc::vec::Vec;

use crate::direction::RelativeDir;
use crate::grid::CellPos;
use crate::observations::distance::UNREACHABLE;
use crate::observations::DistanceMaps;
use crate::sim::{AgentStatus, EnvState};

/// Two h x w arrays (row-major, index `y * width + x`), all values in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityObservation {
    pub width: u16,
    pub height: u16,
    pub own: Vec<f64>,
    pub others: Vec<f64>,
}

/// Occupancy weight for a cell reached `t` steps from now.
fn density_value(t: u32, t_max: u32) -> f64 {
    libm::exp(-(t as f64) / libm::sqrt(t_max as f64))
}

/// Builds the density observation for `agent_id` with projection horizon
/// `t_max >= 1`. Active agents project from their current pose, waiting
/// agents from their start pose, finished agents contribute nothing. When a
/// path revisits a cell (dead-end bounce), the larger (earlier) value is
/// kept.
pub fn build_density_observation(
    env: &EnvState,
    agent_id: usize,
    t_max: u32,
    maps: &DistanceMaps,
) -> DensityObservation {
    let grid = env.grid();
    let n_cells = grid.width() as usize * grid.height() as usize;
    let mut own = vec![0.0; n_cells];
    let mut others_sum = vec![0.0; n_cells];
    let n_others = env.n_agents().saturating_sub(1);

    for agent in env.agents() {
        let pose = match agent.status {
            AgentStatus::Active => (agent.position.unwrap(), agent.direction.unwrap()),
            AgentStatus::ReadyToDepart => (agent.start, agent.start_direction),
            AgentStatus::Done => continue,
        };
        let mut values = vec![0.0f64; n_cells];
        let (mut pos, mut heading) = pose;
        let mut t = 0u32;
        loop {
            let idx = grid.index(pos);
            let v = density_value(t, t_max);
            if v > values[idx] {
                values[idx] = v;
            }
            if pos == agent.target || t == t_max {
                break;
            }
            // Greedy descent on the distance map; ties break in L, F, R
            // relative order (Backward only ever appears alone).
            let map = maps.agent(agent.id);
            if map.get(pos, heading) == UNREACHABLE {
                break;
            }
            let code = grid.get(pos);
            let mut best: Option<(u32, CellPos, crate::direction::Direction)> = None;
            for rel in RelativeDir::BRANCH_ORDER {
                let exit = rel.apply(heading);
                if !code.allows(heading, exit) {
                    continue;
                }
                let Some(next) = grid.neighbor(pos, exit) else {
                    continue;
                };
                let d = map.get(next, exit);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, next, exit));
                }
            }
            let Some((d, next, exit)) = best else { break };
            if d == UNREACHABLE {
                break;
            }
            pos = next;
            heading = exit;
            t += 1;
        }
        if agent.id == agent_id {
            own = values;
        } else {
            for (acc, v) in others_sum.iter_mut().zip(&values) {
                *acc += v;
            }
        }
    }

    if n_others > 0 {
        for v in &mut others_sum {
            *v /= n_others as f64;
        }
    }
    DensityObservation {
        width: grid.width(),
        height: grid.height(),
        own,
        others: others_sum,
    }
}
