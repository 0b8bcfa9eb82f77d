//! The dense grid-shaped observation: an h x w x 5 tensor per agent.
//!
//! Channels:
//! 0. the observed agent's own position and heading, encoded `(dir + 1) / 4`
//! 1. other active agents' positions and headings, same encoding
//! 2. malfunction counters of every active agent (own cell included)
//! 3. fractional speeds of every active agent
//! 4. count of ReadyToDepart agents at each start cell

use alloc::vec;
use alloc::vec::Vec;

use crate::sim::{AgentStatus, EnvState};

pub const GLOBAL_CHANNELS: usize = 5;

/// Row-major h x w x c tensor: index `(y * width + x) * 5 + channel`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalObservation {
    pub width: u16,
    pub height: u16,
    data: Vec<f64>,
}

impl GlobalObservation {
    pub fn get(&self, y: u16, x: u16, channel: usize) -> f64 {
        self.data[(y as usize * self.width as usize + x as usize) * GLOBAL_CHANNELS + channel]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Builds the global view for `agent_id`. Works for off-map agents too:
/// channel 0 is then all zero.
pub fn build_global_observation(env: &EnvState, agent_id: usize) -> GlobalObservation {
    let grid = env.grid();
    let (w, h) = (grid.width() as usize, grid.height() as usize);
    let mut data = vec![0.0; w * h * GLOBAL_CHANNELS];
    let slot = |pos: crate::grid::CellPos, channel: usize| {
        (pos.y as usize * w + pos.x as usize) * GLOBAL_CHANNELS + channel
    };
    for agent in env.agents() {
        match agent.status {
            AgentStatus::Active => {
                let pos = agent.position.unwrap();
                let encoded = (agent.direction.unwrap().index() as f64 + 1.0) / 4.0;
                let channel = if agent.id == agent_id { 0 } else { 1 };
                data[slot(pos, channel)] = encoded;
                data[slot(pos, 2)] = agent.malfunction_remaining as f64;
                data[slot(pos, 3)] = agent.speed;
            }
            AgentStatus::ReadyToDepart => {
                data[slot(agent.start, 4)] += 1.0;
            }
            AgentStatus::Done => {}
        }
    }
    GlobalObservation {
        width: grid.width(),
        height: grid.height(),
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::Direction;
    use crate::grid::{cell, Grid};
    use crate::rewards::RewardConfig;
    use crate::sim::{Action, AgentTask, EnvState, MalfunctionParams};

    fn line_env(tasks: &[AgentTask]) -> EnvState {
        let mut g = Grid::empty(6, 5);
        g.add_track(cell(0, 3), Direction::East, Direction::East);
        for x in 1..5 {
            g.add_track(cell(x, 3), Direction::East, Direction::West);
        }
        g.add_track(cell(5, 3), Direction::West, Direction::West);
        EnvState::reset(g, tasks, MalfunctionParams::OFF, RewardConfig::BENCHMARK, 1).unwrap()
    }

    #[test]
    fn self_channel_encodes_position_and_direction() {
        let tasks = [AgentTask {
            start: cell(2, 3),
            start_direction: Direction::East,
            target: cell(5, 3),
        }];
        let mut env = line_env(&tasks);
        env.step(&[Action::Forward]).unwrap();
        let obs = build_global_observation(&env, 0);
        assert_eq!((obs.height, obs.width), (5, 6));
        assert_eq!(obs.as_slice().len(), 5 * 6 * GLOBAL_CHANNELS);
        // East = 1 -> (1+1)/4.
        assert_eq!(obs.get(3, 2, 0), 0.5);
        assert_eq!(obs.get(3, 2, 3), 1.0, "unit speed");
        let others: f64 = (0..5)
            .flat_map(|y| (0..6).map(move |x| (y, x)))
            .map(|(y, x)| obs.get(y, x, 1))
            .sum();
        assert_eq!(others, 0.0);
    }

    #[test]
    fn malfunction_counter_lands_in_channel_2() {
        let tasks = [AgentTask {
            start: cell(2, 3),
            start_direction: Direction::East,
            target: cell(5, 3),
        }];
        let mut env = line_env(&tasks);
        env.step(&[Action::Forward]).unwrap();
        env.agent_mut(0).malfunction_remaining = 4;
        let obs = build_global_observation(&env, 0);
        assert_eq!(obs.get(3, 2, 2), 4.0);
    }

    #[test]
    fn ready_agents_accumulate_in_channel_4() {
        let tasks = [
            AgentTask {
                start: cell(2, 3),
                start_direction: Direction::East,
                target: cell(5, 3),
            },
            AgentTask {
                start: cell(2, 3),
                start_direction: Direction::East,
                target: cell(4, 3),
            },
        ];
        let env = line_env(&tasks);
        let obs = build_global_observation(&env, 0);
        assert_eq!(obs.get(3, 2, 4), 2.0);
        assert_eq!(obs.get(3, 2, 0), 0.0, "off-map agent has empty channel 0");
    }

    #[test]
    fn channels_0_and_1_are_disjoint() {
        let tasks = [
            AgentTask {
                start: cell(1, 3),
                start_direction: Direction::East,
                target: cell(5, 3),
            },
            AgentTask {
                start: cell(3, 3),
                start_direction: Direction::West,
                target: cell(0, 3),
            },
        ];
        let mut env = line_env(&tasks);
        env.step(&[Action::Forward, Action::Forward]).unwrap();
        let obs = build_global_observation(&env, 0);
        for y in 0..5 {
            for x in 0..6 {
                assert!(obs.get(y, x, 0) == 0.0 || obs.get(y, x, 1) == 0.0);
            }
        }
        assert_eq!(obs.get(3, 1, 0), 0.5);
        assert_eq!(obs.get(3, 3, 1), 1.0, "West = 3 -> (3+1)/4");
    }
}
