//! Non-learned baseline policies behind one pluggable interface.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::direction::RelativeDir;
use crate::observations::{DistanceMap, UNREACHABLE};
use crate::sim::{Action, AgentStatus, EnvState};

/// A per-agent action source. Policies own their RNG stream, so an action is
/// a deterministic function of (state snapshot, agent id, rng state).
pub trait Policy {
    fn name(&self) -> &'static str;
    fn act(&mut self, env: &EnvState, agent_id: usize) -> Action;
}

/// Uniform over the five actions from a dedicated seeded stream.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> RandomPolicy {
        RandomPolicy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn act(&mut self, _env: &EnvState, _agent_id: usize) -> Action {
        Action::ALL[self.rng.random_range(0..Action::ALL.len())]
    }
}

/// Always "go forward".
#[derive(Default)]
pub struct ForwardPolicy;

impl Policy for ForwardPolicy {
    fn name(&self) -> &'static str {
        "forward"
    }

    fn act(&mut self, _env: &EnvState, _agent_id: usize) -> Action {
        Action::Forward
    }
}

/// Greedy descent on the per-target distance map: at every decision the
/// permitted action whose successor pose minimizes the remaining distance,
/// ties broken Left, Forward, Right. Waiting agents issue Forward to enter;
/// an agent whose every successor is unreachable halts.
///
/// One instance serves one episode: distance maps are computed lazily per
/// agent and cached for the episode's (immutable) grid.
#[derive(Default)]
pub struct ShortestPathPolicy {
    maps: Vec<Option<DistanceMap>>,
}

impl ShortestPathPolicy {
    pub fn new() -> ShortestPathPolicy {
        ShortestPathPolicy { maps: Vec::new() }
    }

    fn map_for(&mut self, env: &EnvState, agent_id: usize) -> &DistanceMap {
        if self.maps.len() < env.n_agents() {
            self.maps.resize_with(env.n_agents(), || None);
        }
        self.maps[agent_id]
            .get_or_insert_with(|| DistanceMap::build(env.grid(), env.agent(agent_id).target))
    }
}

impl Policy for ShortestPathPolicy {
    fn name(&self) -> &'static str {
        "shortest-path"
    }

    fn act(&mut self, env: &EnvState, agent_id: usize) -> Action {
        let agent = env.agent(agent_id);
        match agent.status {
            AgentStatus::ReadyToDepart => return Action::Forward,
            AgentStatus::Done => return Action::NoOp,
            AgentStatus::Active => {}
        }
        let pos = agent.position.unwrap();
        let heading = agent.direction.unwrap();
        let map = self.map_for(env, agent_id);
        let code = env.grid().get(pos);
        let mut best: Option<(u32, RelativeDir)> = None;
        for rel in RelativeDir::BRANCH_ORDER {
            let exit = rel.apply(heading);
            if !code.allows(heading, exit) {
                continue;
            }
            let Some(next) = env.grid().neighbor(pos, exit) else {
                continue;
            };
            let d = map.get(next, exit);
            if d != UNREACHABLE && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, rel));
            }
        }
        match best {
            None => Action::Halt,
            Some((_, RelativeDir::Left)) => Action::Left,
            Some((_, RelativeDir::Right)) => Action::Right,
            // Forward covers the straight continuation and the dead-end
            // reversal alike.
            Some((_, RelativeDir::Forward | RelativeDir::Backward)) => Action::Forward,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::Direction;
    use crate::grid::{cell, Grid};
    use crate::rewards::RewardConfig;
    use crate::sim::{AgentTask, MalfunctionParams};
    use alloc::vec;

    fn line_grid(len: u16) -> Grid {
        let mut g = Grid::empty(len, 1);
        g.add_track(cell(0, 0), Direction::East, Direction::East);
        for x in 1..len - 1 {
            g.add_track(cell(x, 0), Direction::East, Direction::West);
        }
        g.add_track(cell(len - 1, 0), Direction::West, Direction::West);
        g
    }

    fn line_env(len: u16, tasks: &[AgentTask], seed: u64) -> EnvState {
        EnvState::reset(
            line_grid(len),
            tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            seed,
        )
        .unwrap()
    }

    fn run(env: &mut EnvState, policy: &mut dyn Policy, cap: u32) -> u32 {
        let mut steps = 0;
        while !env.is_done() && steps < cap {
            let actions: Vec<Action> =
                (0..env.n_agents()).map(|i| policy.act(env, i)).collect();
            env.step(&actions).unwrap();
            steps += 1;
        }
        steps
    }

    #[test]
    fn random_policy_is_reproducible_and_roughly_uniform() {
        let tasks = [AgentTask {
            start: cell(1, 0),
            start_direction: Direction::East,
            target: cell(4, 0),
        }];
        let env = line_env(5, &tasks, 1);
        let mut a = RandomPolicy::new(99);
        let mut b = RandomPolicy::new(99);
        let seq_a: Vec<Action> = (0..64).map(|_| a.act(&env, 0)).collect();
        let seq_b: Vec<Action> = (0..64).map(|_| b.act(&env, 0)).collect();
        assert_eq!(seq_a, seq_b);

        let mut c = RandomPolicy::new(100);
        let seq_c: Vec<Action> = (0..64).map(|_| c.act(&env, 0)).collect();
        assert_ne!(seq_a, seq_c);

        let mut counts = [0u32; 5];
        let mut d = RandomPolicy::new(7);
        for _ in 0..10_000 {
            counts[d.act(&env, 0).index() as usize] += 1;
        }
        for count in counts {
            let freq = count as f64 / 10_000.0;
            assert!((freq - 0.2).abs() < 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn forward_policy_completes_the_line_fixture() {
        let tasks = [AgentTask {
            start: cell(1, 0),
            start_direction: Direction::East,
            target: cell(4, 0),
        }];
        let mut env = line_env(5, &tasks, 1);
        let steps = run(&mut env, &mut ForwardPolicy, 50);
        assert_eq!(steps, 4);
        assert_eq!(env.agents()[0].status, AgentStatus::Done);
    }

    #[test]
    fn forward_policy_deadlocks_head_on() {
        let tasks = [
            AgentTask {
                start: cell(1, 0),
                start_direction: Direction::East,
                target: cell(3, 0),
            },
            AgentTask {
                start: cell(2, 0),
                start_direction: Direction::West,
                target: cell(0, 0),
            },
        ];
        let mut env = line_env(4, &tasks, 1);
        run(&mut env, &mut ForwardPolicy, 64);
        assert!(env.is_done());
        assert!(env.agents().iter().all(|a| a.status == AgentStatus::Active));
        assert_eq!(env.detect_deadlock(), vec![0, 1]);
    }

    /// Two routes of different lengths: a short southern branch and the long
    /// way round. The greedy policy must take the branch that minimizes the
    /// remaining distance.
    #[test]
    fn shortest_path_prefers_the_shorter_branch() {
        use Direction::*;
        // Ring with a chord: target is quickest via the chord.
        //   (0,0)-(1,0)-(2,0)-(3,0)-(4,0)
        //     |                       |
        //   (0,1)-(1,1)-(2,1)-(3,1)-(4,1)
        // Chord: (2,0)-(2,1) making (2,y) switches.
        let mut g = Grid::empty(5, 2);
        for x in 1..4 {
            g.add_track(cell(x, 0), East, West);
            g.add_track(cell(x, 1), East, West);
        }
        g.add_track(cell(0, 0), East, South);
        g.add_track(cell(0, 1), East, North);
        g.add_track(cell(4, 0), West, South);
        g.add_track(cell(4, 1), West, North);
        g.add_track(cell(2, 0), South, West); // branch off the top line
        g.add_track(cell(2, 1), North, West); // joins the bottom line
        assert!(g.validate_consistency().is_empty());

        let tasks = [AgentTask {
            start: cell(1, 0),
            start_direction: East,
            target: cell(1, 1),
        }];
        let mut env = EnvState::reset(
            g,
            &tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            5,
        )
        .unwrap();
        let mut policy = ShortestPathPolicy::new();
        // Via the chord: (2,0) -> (2,1) -> (1,1), 3 moves; round the eastern
        // loop it would be 7.
        let steps = run(&mut env, &mut policy, 50);
        assert_eq!(env.agents()[0].status, AgentStatus::Done);
        assert_eq!(steps, 1 + 3, "departure plus the short route");
    }

    #[test]
    fn shortest_path_completes_in_exactly_dist_steps_after_departure() {
        let tasks = [AgentTask {
            start: cell(1, 0),
            start_direction: Direction::East,
            target: cell(4, 0),
        }];
        let mut env = line_env(6, &tasks, 1);
        let dist = DistanceMap::build(env.grid(), cell(4, 0)).get(cell(1, 0), Direction::East);
        let steps = run(&mut env, &mut ShortestPathPolicy::new(), 64);
        assert_eq!(env.agents()[0].status, AgentStatus::Done);
        assert_eq!(steps, 1 + dist);
    }

    #[test]
    fn shortest_path_halts_without_a_route() {
        let mut g = line_grid(3);
        // A disconnected second segment to host the unreachable target.
        let mut codes: Vec<u16> = g.cells().iter().map(|c| c.code()).collect();
        codes.extend([0, 0, 0]);
        g = Grid::from_codes(3, 2, &codes).unwrap();
        g.add_track(cell(0, 1), Direction::East, Direction::East);
        g.add_track(cell(1, 1), Direction::East, Direction::West);
        g.add_track(cell(2, 1), Direction::West, Direction::West);
        let tasks = [AgentTask {
            start: cell(1, 0),
            start_direction: Direction::East,
            target: cell(1, 1),
        }];
        let mut env = EnvState::reset(
            g,
            &tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            5,
        )
        .unwrap();
        let mut policy = ShortestPathPolicy::new();
        env.step(&[policy.act(&env, 0)]).unwrap(); // departs
        assert_eq!(policy.act(&env, 0), Action::Halt);
    }
}
