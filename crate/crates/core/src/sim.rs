//! The synchronous multi-agent step engine.
//!
//! One simulation step moves the clock forward by one increment and enacts
//! exactly one action per agent. Within a step:
//!
//! 1. malfunctions are drawn and counters decremented; malfunctioning agents
//!    hold position,
//! 2. off-map agents that chose Forward enter their start cell if it is free,
//! 3. active agents' moves resolve in ascending id order against the live
//!    occupancy table plus a per-step claims table (direct swaps can never
//!    commit; a cell vacated by a finishing agent cannot be entered twice),
//! 4. agents landing on their target become Done and leave the map,
//! 5. rewards are computed and the episode ends when everyone is done or the
//!    step limit is reached.
//!
//! Identical inputs (grid, tasks, parameters, seed, action stream) produce
//! bit-identical state traces.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::direction::Direction;
use crate::grid::{CellPos, Grid};
use crate::rewards::{step_reward, RewardConfig};

/// The discrete(5) action space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Action {
    /// Continue whatever the agent was doing (forward if moving, hold if not).
    NoOp = 0,
    Left = 1,
    Forward = 2,
    Right = 3,
    /// Stop on the current cell; always valid.
    Halt = 4,
}

impl Action {
    pub const ALL: [Action; 5] = [
        Action::NoOp,
        Action::Left,
        Action::Forward,
        Action::Right,
        Action::Halt,
    ];

    pub const fn index(self) -> u8 {
        self as u8
    }

    pub const fn from_index(value: u8) -> Option<Action> {
        match value {
            0 => Some(Action::NoOp),
            1 => Some(Action::Left),
            2 => Some(Action::Forward),
            3 => Some(Action::Right),
            4 => Some(Action::Halt),
            _ => None,
        }
    }
}

/// Agent lifecycle: off-map waiting, on-map driving, finished and removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgentStatus {
    ReadyToDepart,
    Active,
    Done,
}

/// One agent's assignment: where it enters the map, facing which way, and
/// which cell completes its run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AgentTask {
    pub start: CellPos,
    pub start_direction: Direction,
    pub target: CellPos,
}

/// A train. `position`/`direction` are defined only while Active.
#[derive(Clone, Debug)]
pub struct Agent {
    pub id: usize,
    pub start: CellPos,
    pub start_direction: Direction,
    pub target: CellPos,
    pub status: AgentStatus,
    pub position: Option<CellPos>,
    pub direction: Option<Direction>,
    /// Carried in the data model; fixed at 1.0 for benchmark-profile runs.
    pub speed: f64,
    /// Steps of forced stop left; the agent holds position while > 0.
    pub malfunction_remaining: u32,
    /// Whether the agent is in motion; NoOp continues motion, Halt clears it.
    pub moving: bool,
}

/// Stochastic forced-stop model: a per-agent per-step Bernoulli onset with a
/// uniformly drawn duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MalfunctionParams {
    pub probability: f64,
    pub min_duration: u32,
    pub max_duration: u32,
}

impl MalfunctionParams {
    pub const OFF: MalfunctionParams = MalfunctionParams {
        probability: 0.0,
        min_duration: 0,
        max_duration: 0,
    };

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.probability) && self.min_duration <= self.max_duration
    }
}

impl Default for MalfunctionParams {
    fn default() -> Self {
        MalfunctionParams::OFF
    }
}

/// What an action resolves to before occupancy is considered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EffectiveMove {
    Stay,
    MoveTo { cell: CellPos, direction: Direction },
    /// The Forward-at-dead-end case: the agent exits backward into the cell
    /// it came from, now facing the opposite way.
    ReverseAtDeadEnd { cell: CellPos, direction: Direction },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResetError {
    InvalidTask { agent: usize, reason: &'static str },
    InvalidConfig(&'static str),
}

impl core::fmt::Display for ResetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ResetError::InvalidTask { agent, reason } => {
                write!(f, "invalid task for agent {agent}: {reason}")
            }
            ResetError::InvalidConfig(reason) => write!(f, "invalid configuration: {reason}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepError {
    /// `step` was called after the episode finished.
    EpisodeFinished,
    ActionCountMismatch { expected: usize, got: usize },
}

impl core::fmt::Display for StepError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StepError::EpisodeFinished => write!(f, "episode already finished"),
            StepError::ActionCountMismatch { expected, got } => {
                write!(f, "expected {expected} actions, got {got}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ResetError {}
#[cfg(feature = "std")]
impl std::error::Error for StepError {}

/// Everything `step` reports about one transition.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub rewards: Vec<f64>,
    /// Episode over (all done or step limit hit).
    pub done: bool,
    /// All agents reached their targets this step or earlier.
    pub all_done: bool,
    pub agent_done: Vec<bool>,
    /// Per agent: the chosen action could not be executed this step.
    pub illegal: Vec<bool>,
    /// Per agent: held by a malfunction this step.
    pub malfunctioning: Vec<bool>,
}

struct Resolution {
    destination: Option<(CellPos, Direction)>,
    reversed: bool,
    illegal: bool,
    moving_after: bool,
}

/// The complete steppable simulation state.
#[derive(Clone, Debug)]
pub struct EnvState {
    grid: Grid,
    agents: Vec<Agent>,
    t: u32,
    max_steps: u32,
    malfunction: MalfunctionParams,
    reward: RewardConfig,
    seed: u64,
    malfunction_rng: ChaCha8Rng,
    /// Reserved stream for stochastic resolution orders; the engine resolves
    /// deterministically in ascending id order and leaves it untouched.
    #[allow(dead_code)]
    movement_rng: ChaCha8Rng,
    occupancy: Vec<Option<u32>>,
    claims: Vec<u32>,
    done: bool,
}

const MALFUNCTION_STREAM: u64 = 1;
const MOVEMENT_STREAM: u64 = 2;

impl EnvState {
    /// Fresh episode at t = 0 with every agent ReadyToDepart and the default
    /// step limit of `8 * (width + height)`.
    pub fn reset(
        grid: Grid,
        tasks: &[AgentTask],
        malfunction: MalfunctionParams,
        reward: RewardConfig,
        seed: u64,
    ) -> Result<EnvState, ResetError> {
        let limit = 8 * (grid.width() as u32 + grid.height() as u32);
        EnvState::reset_with_limit(grid, tasks, malfunction, reward, seed, limit)
    }

    pub fn reset_with_limit(
        grid: Grid,
        tasks: &[AgentTask],
        malfunction: MalfunctionParams,
        reward: RewardConfig,
        seed: u64,
        max_steps: u32,
    ) -> Result<EnvState, ResetError> {
        if !malfunction.is_valid() {
            return Err(ResetError::InvalidConfig(
                "malfunction probability must be in [0,1] and min_duration <= max_duration",
            ));
        }
        for (i, task) in tasks.iter().enumerate() {
            let fail = |reason| Err(ResetError::InvalidTask { agent: i, reason });
            if !grid.contains(task.start) || !grid.contains(task.target) {
                return fail("start or target outside the grid");
            }
            if grid.get(task.start).is_empty() {
                return fail("start cell is empty track");
            }
            if grid.get(task.target).is_empty() {
                return fail("target cell is empty track");
            }
            if task.start == task.target {
                return fail("start equals target");
            }
            if grid.get(task.start).mask(task.start_direction) == 0 {
                return fail("start direction has no transitions at the start cell");
            }
        }
        let agents = tasks
            .iter()
            .enumerate()
            .map(|(id, task)| Agent {
                id,
                start: task.start,
                start_direction: task.start_direction,
                target: task.target,
                status: AgentStatus::ReadyToDepart,
                position: None,
                direction: None,
                speed: 1.0,
                malfunction_remaining: 0,
                moving: false,
            })
            .collect::<Vec<_>>();
        let n_cells = grid.width() as usize * grid.height() as usize;
        let mut malfunction_rng = ChaCha8Rng::seed_from_u64(seed);
        malfunction_rng.set_stream(MALFUNCTION_STREAM);
        let mut movement_rng = ChaCha8Rng::seed_from_u64(seed);
        movement_rng.set_stream(MOVEMENT_STREAM);
        let done = agents.is_empty();
        Ok(EnvState {
            grid,
            agents,
            t: 0,
            max_steps,
            malfunction,
            reward,
            seed,
            malfunction_rng,
            movement_rng,
            occupancy: vec![None; n_cells],
            claims: vec![0; n_cells],
            done,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: usize) -> &Agent {
        &self.agents[id]
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub const fn t(&self) -> u32 {
        self.t
    }

    pub const fn max_steps(&self) -> u32 {
        self.max_steps
    }

    pub const fn is_done(&self) -> bool {
        self.done
    }

    pub const fn seed(&self) -> u64 {
        self.seed
    }

    pub fn reward_config(&self) -> &RewardConfig {
        &self.reward
    }

    pub fn malfunction_params(&self) -> &MalfunctionParams {
        &self.malfunction
    }

    /// The active agent occupying `pos`, if any.
    pub fn occupant(&self, pos: CellPos) -> Option<usize> {
        self.occupancy[self.grid.index(pos)].map(|i| i as usize)
    }

    #[cfg(test)]
    pub(crate) fn agent_mut(&mut self, id: usize) -> &mut Agent {
        &mut self.agents[id]
    }

    /// Resolves one agent's action against the transition map only (occupancy
    /// and malfunctions are the step loop's business). Total: impermissible
    /// actions degrade to the no-op behaviour; non-active agents stay.
    pub fn resolve_action(&self, agent_id: usize, action: Action) -> EffectiveMove {
        if self.agents[agent_id].status != AgentStatus::Active {
            return EffectiveMove::Stay;
        }
        let res = self.resolve_internal(agent_id, action);
        match res.destination {
            None => EffectiveMove::Stay,
            Some((cell, direction)) if res.reversed => {
                EffectiveMove::ReverseAtDeadEnd { cell, direction }
            }
            Some((cell, direction)) => EffectiveMove::MoveTo { cell, direction },
        }
    }

    fn resolve_internal(&self, agent_id: usize, action: Action) -> Resolution {
        let agent = &self.agents[agent_id];
        let pos = agent.position.expect("resolve on active agent");
        let heading = agent.direction.expect("resolve on active agent");
        let code = self.grid.get(pos);

        // Forward rule: the straight continuation if allowed, otherwise the
        // single available transition (curves, and the dead-end reversal).
        let forward_exit = || -> Option<Direction> {
            if code.allows(heading, heading) {
                return Some(heading);
            }
            if code.count_choices(heading) == 1 {
                return code.outgoing(heading).next();
            }
            None
        };

        let (mut exit, illegal, halted) = match action {
            Action::Halt => (None, false, true),
            Action::NoOp => {
                if agent.moving {
                    (forward_exit(), false, false)
                } else {
                    (None, false, false)
                }
            }
            Action::Forward => match forward_exit() {
                Some(e) => (Some(e), false, false),
                None => (None, true, false),
            },
            Action::Left => {
                let l = heading.left();
                if code.allows(heading, l) {
                    (Some(l), false, false)
                } else {
                    (None, true, false)
                }
            }
            Action::Right => {
                let r = heading.right();
                if code.allows(heading, r) {
                    (Some(r), false, false)
                } else {
                    (None, true, false)
                }
            }
        };
        // Impermissible actions degrade to the no-op behaviour: a moving
        // agent keeps going forward where possible, a halted one stays.
        if exit.is_none() && illegal && agent.moving {
            exit = forward_exit();
        }
        let moving_after = if halted {
            false
        } else if exit.is_some() {
            true
        } else {
            agent.moving
        };
        let reversed = exit == Some(heading.opposite());
        let destination = exit.and_then(|e| self.grid.neighbor(pos, e).map(|n| (n, e)));
        Resolution {
            destination,
            reversed,
            illegal,
            moving_after,
        }
    }

    /// Advances the simulation by one step, enacting one action per agent.
    pub fn step(&mut self, actions: &[Action]) -> Result<StepOutcome, StepError> {
        if self.done {
            return Err(StepError::EpisodeFinished);
        }
        if actions.len() != self.agents.len() {
            return Err(StepError::ActionCountMismatch {
                expected: self.agents.len(),
                got: actions.len(),
            });
        }
        let step_no = self.t + 1;
        let n = self.agents.len();
        let mut stalled = vec![false; n];
        let mut illegal = vec![false; n];

        // Phase 1: malfunctions. Existing counters tick down and still hold
        // the agent this step; healthy on-map or waiting agents may start a
        // new malfunction. Draws come only from the malfunction stream, in
        // ascending agent order.
        for i in 0..n {
            let agent = &mut self.agents[i];
            if agent.status == AgentStatus::Done {
                continue;
            }
            if agent.malfunction_remaining > 0 {
                agent.malfunction_remaining -= 1;
                stalled[i] = true;
            } else if self.malfunction.probability > 0.0
                && self
                    .malfunction_rng
                    .random_bool(self.malfunction.probability)
            {
                agent.malfunction_remaining = self
                    .malfunction_rng
                    .random_range(self.malfunction.min_duration..=self.malfunction.max_duration);
                stalled[i] = true;
            }
        }

        // Phase 2: departures and movement in ascending id order. A move
        // commits only if the destination is neither occupied in the live
        // table nor claimed earlier this step; head-on swaps therefore never
        // commit, and a cell freed by a finishing agent stays claimed.
        for i in 0..n {
            if stalled[i] || self.agents[i].status == AgentStatus::Done {
                continue;
            }
            match self.agents[i].status {
                AgentStatus::ReadyToDepart => {
                    if actions[i] == Action::Forward {
                        let dest = self.agents[i].start;
                        let idx = self.grid.index(dest);
                        if self.claims[idx] != step_no && self.occupancy[idx].is_none() {
                            self.claims[idx] = step_no;
                            self.occupancy[idx] = Some(i as u32);
                            let agent = &mut self.agents[i];
                            agent.status = AgentStatus::Active;
                            agent.position = Some(agent.start);
                            agent.direction = Some(agent.start_direction);
                            agent.moving = true;
                        }
                    }
                }
                AgentStatus::Active => {
                    let res = self.resolve_internal(i, actions[i]);
                    illegal[i] = res.illegal;
                    self.agents[i].moving = res.moving_after;
                    let Some((dest, heading)) = res.destination else {
                        continue;
                    };
                    let dest_idx = self.grid.index(dest);
                    if self.claims[dest_idx] == step_no || self.occupancy[dest_idx].is_some() {
                        continue; // blocked; the agent holds its cell
                    }
                    self.claims[dest_idx] = step_no;
                    let src_idx = self.grid.index(self.agents[i].position.unwrap());
                    self.occupancy[src_idx] = None;
                    let agent = &mut self.agents[i];
                    if dest == agent.target {
                        agent.status = AgentStatus::Done;
                        agent.position = None;
                        agent.direction = None;
                        agent.moving = false;
                    } else {
                        agent.position = Some(dest);
                        agent.direction = Some(heading);
                        self.occupancy[dest_idx] = Some(i as u32);
                    }
                }
                AgentStatus::Done => {}
            }
        }

        self.t = step_no;
        let all_done = self.agents.iter().all(|a| a.status == AgentStatus::Done);
        let agent_done: Vec<bool> = self
            .agents
            .iter()
            .map(|a| a.status == AgentStatus::Done)
            .collect();
        let rewards: Vec<f64> = (0..n)
            .map(|i| step_reward(agent_done[i], all_done, illegal[i], &self.reward))
            .collect();
        self.done = all_done || self.t >= self.max_steps;
        Ok(StepOutcome {
            rewards,
            done: self.done,
            all_done,
            agent_done,
            illegal,
            malfunctioning: stalled,
        })
    }

    /// Agents caught in a mutual blocking pattern: every transition available
    /// to them lands on a cell occupied by another agent of the same stuck
    /// set. Computed as a greatest fixpoint on the current occupancy, so a
    /// train stuck behind a head-on pair counts as deadlocked too.
    pub fn detect_deadlock(&self) -> Vec<usize> {
        let n = self.agents.len();
        let mut successors: Vec<Vec<CellPos>> = vec![Vec::new(); n];
        for (i, agent) in self.agents.iter().enumerate() {
            if agent.status != AgentStatus::Active {
                continue;
            }
            let pos = agent.position.unwrap();
            let heading = agent.direction.unwrap();
            for e in self.grid.get(pos).outgoing(heading) {
                if let Some(next) = self.grid.neighbor(pos, e) {
                    successors[i].push(next);
                }
            }
        }
        let mut stuck: Vec<bool> = (0..n)
            .map(|i| {
                self.agents[i].status == AgentStatus::Active
                    && !successors[i].is_empty()
                    && successors[i].iter().all(|c| self.occupant(*c).is_some())
            })
            .collect();
        loop {
            let mut changed = false;
            for i in 0..n {
                if !stuck[i] {
                    continue;
                }
                let escapable = successors[i]
                    .iter()
                    .any(|c| self.occupant(*c).is_none_or(|j| !stuck[j]));
                if escapable {
                    stuck[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).filter(|&i| stuck[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::cell;
    use crate::transitions::CellTransitions;

    /// 1x5 capped line: [dead-end open E, 3 x E-W straight, dead-end open W].
    pub(crate) fn line_grid(len: u16) -> Grid {
        let mut g = Grid::empty(len, 1);
        g.add_track(cell(0, 0), Direction::East, Direction::East);
        for x in 1..len - 1 {
            g.add_track(cell(x, 0), Direction::East, Direction::West);
        }
        g.add_track(cell(len - 1, 0), Direction::West, Direction::West);
        g
    }

    fn single_agent_env(start: CellPos, dir: Direction, target: CellPos) -> EnvState {
        let task = AgentTask {
            start,
            start_direction: dir,
            target,
        };
        EnvState::reset(
            line_grid(5),
            &[task],
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            7,
        )
        .unwrap()
    }

    #[test]
    fn reset_contract() {
        let env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        assert_eq!(env.t(), 0);
        assert_eq!(env.agents().len(), 1);
        assert_eq!(env.agents()[0].status, AgentStatus::ReadyToDepart);
        assert!(env.agents()[0].position.is_none());
    }

    #[test]
    fn reset_rejects_empty_start() {
        let mut g = line_grid(5);
        g.set(cell(1, 0), CellTransitions::EMPTY);
        let err = EnvState::reset(
            g,
            &[AgentTask {
                start: cell(1, 0),
                start_direction: Direction::East,
                target: cell(4, 0),
            }],
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            7,
        )
        .unwrap_err();
        assert!(matches!(err, ResetError::InvalidTask { agent: 0, .. }));
    }

    #[test]
    fn straight_run_completes_in_four_steps() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        let mut rewards = Vec::new();
        let mut steps = 0;
        while !env.is_done() {
            let out = env.step(&[Action::Forward]).unwrap();
            rewards.push(out.rewards[0]);
            steps += 1;
            assert!(steps < 50);
        }
        assert_eq!(steps, 4);
        assert_eq!(rewards, vec![-1.0, -1.0, -1.0, 1.0]);
        assert_eq!(env.agents()[0].status, AgentStatus::Done);
        assert!(env.step(&[Action::Forward]).is_err());
    }

    #[test]
    fn resolve_forward_on_straight() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        env.step(&[Action::Forward]).unwrap(); // departs onto (1,0)
        assert_eq!(
            env.resolve_action(0, Action::Forward),
            EffectiveMove::MoveTo {
                cell: cell(2, 0),
                direction: Direction::East
            }
        );
        // Invalid turn on plain track degrades to the no-op behaviour, which
        // for a moving agent is "keep going forward".
        assert_eq!(
            env.resolve_action(0, Action::Right),
            EffectiveMove::MoveTo {
                cell: cell(2, 0),
                direction: Direction::East
            }
        );
        assert_eq!(env.resolve_action(0, Action::Halt), EffectiveMove::Stay);
    }

    #[test]
    fn dead_end_reverses_forward() {
        // Target unreachable ahead: drive into the far dead-end and bounce.
        let mut env = single_agent_env(cell(3, 0), Direction::East, cell(1, 0));
        env.step(&[Action::Forward]).unwrap(); // enter (3,0)
        env.step(&[Action::Forward]).unwrap(); // (4,0), the dead end
        assert_eq!(env.agents()[0].position, Some(cell(4, 0)));
        assert_eq!(
            env.resolve_action(0, Action::Forward),
            EffectiveMove::ReverseAtDeadEnd {
                cell: cell(3, 0),
                direction: Direction::West
            }
        );
        env.step(&[Action::Forward]).unwrap();
        assert_eq!(env.agents()[0].position, Some(cell(3, 0)));
        assert_eq!(env.agents()[0].direction, Some(Direction::West));
    }

    #[test]
    fn halt_keeps_ready_agents_off_map() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        env.step(&[Action::Halt]).unwrap();
        env.step(&[Action::NoOp]).unwrap();
        assert_eq!(env.agents()[0].status, AgentStatus::ReadyToDepart);
        env.step(&[Action::Forward]).unwrap();
        assert_eq!(env.agents()[0].status, AgentStatus::Active);
    }

    #[test]
    fn noop_continues_previous_motion() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        env.step(&[Action::Forward]).unwrap(); // enter (1,0), moving
        env.step(&[Action::NoOp]).unwrap(); // rolls forward to (2,0)
        assert_eq!(env.agents()[0].position, Some(cell(2, 0)));
        env.step(&[Action::Halt]).unwrap();
        env.step(&[Action::NoOp]).unwrap(); // stays halted
        assert_eq!(env.agents()[0].position, Some(cell(2, 0)));
    }

    #[test]
    fn head_on_pair_rejects_swap_and_deadlocks() {
        let g = line_grid(4); // cells 0..=3, agents will sit adjacent
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
        let mut env = EnvState::reset(
            g,
            &tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            3,
        )
        .unwrap();
        env.step(&[Action::Forward, Action::Forward]).unwrap();
        assert_eq!(env.agents()[0].position, Some(cell(1, 0)));
        assert_eq!(env.agents()[1].position, Some(cell(2, 0)));
        // Both push forward: a direct swap, which must never commit.
        env.step(&[Action::Forward, Action::Forward]).unwrap();
        assert_eq!(env.agents()[0].position, Some(cell(1, 0)));
        assert_eq!(env.agents()[1].position, Some(cell(2, 0)));
        assert_eq!(env.detect_deadlock(), vec![0, 1]);
    }

    #[test]
    fn single_agent_never_deadlocks() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        env.step(&[Action::Forward]).unwrap();
        assert!(env.detect_deadlock().is_empty());
    }

    #[test]
    fn convoy_moves_in_lockstep_when_leader_resolves_first() {
        let g = line_grid(6);
        let tasks = [
            AgentTask {
                start: cell(2, 0),
                start_direction: Direction::East,
                target: cell(5, 0),
            },
            AgentTask {
                start: cell(1, 0),
                start_direction: Direction::East,
                target: cell(4, 0),
            },
        ];
        let mut env = EnvState::reset(
            g,
            &tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            3,
        )
        .unwrap();
        env.step(&[Action::Forward, Action::Forward]).unwrap();
        // Leader (lower id, in front) vacates; the follower takes its cell.
        env.step(&[Action::Forward, Action::Forward]).unwrap();
        assert_eq!(env.agents()[0].position, Some(cell(3, 0)));
        assert_eq!(env.agents()[1].position, Some(cell(2, 0)));
    }

    #[test]
    fn malfunction_counter_holds_agent_and_ticks_down() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        env.step(&[Action::Forward]).unwrap();
        env.agents[0].malfunction_remaining = 3;
        let out = env.step(&[Action::Forward]).unwrap();
        assert!(out.malfunctioning[0]);
        assert_eq!(env.agents()[0].position, Some(cell(1, 0)));
        assert_eq!(env.agents()[0].malfunction_remaining, 2);
    }

    #[test]
    fn degenerate_malfunction_interval_hits_every_agent() {
        let params = MalfunctionParams {
            probability: 1.0,
            min_duration: 2,
            max_duration: 2,
        };
        let tasks = [AgentTask {
            start: cell(1, 0),
            start_direction: Direction::East,
            target: cell(4, 0),
        }];
        let mut env = EnvState::reset(line_grid(5), &tasks, params, RewardConfig::BENCHMARK, 9)
            .unwrap();
        let out = env.step(&[Action::Forward]).unwrap();
        assert!(out.malfunctioning[0]);
        assert_eq!(env.agents()[0].malfunction_remaining, 2);
        assert_eq!(env.agents()[0].status, AgentStatus::ReadyToDepart);
    }

    #[test]
    fn zero_probability_never_malfunctions() {
        let mut env = single_agent_env(cell(1, 0), Direction::East, cell(4, 0));
        for _ in 0..3 {
            if env.is_done() {
                break;
            }
            let out = env.step(&[Action::Forward]).unwrap();
            assert!(!out.malfunctioning[0]);
        }
    }

    #[test]
    fn malfunction_onset_rate_matches_probability() {
        // Monte-Carlo oracle on a fixed seed: hold many agents off-map and
        // count fresh onsets per healthy agent-step.
        let mut g = Grid::empty(12, 1);
        g.add_track(cell(0, 0), Direction::East, Direction::East);
        for x in 1..11 {
            g.add_track(cell(x, 0), Direction::East, Direction::West);
        }
        g.add_track(cell(11, 0), Direction::West, Direction::West);
        let tasks: Vec<AgentTask> = (0..10)
            .map(|i| AgentTask {
                start: cell(1 + i, 0),
                start_direction: Direction::East,
                target: cell(11, 0),
            })
            .collect();
        let params = MalfunctionParams {
            probability: 0.1,
            min_duration: 3,
            max_duration: 6,
        };
        let mut env =
            EnvState::reset_with_limit(g, &tasks, params, RewardConfig::BENCHMARK, 42, 2_000)
                .unwrap();
        let mut healthy_steps = 0u32;
        let mut onsets = 0u32;
        let mut durations_ok = true;
        for _ in 0..1_000 {
            let before: Vec<u32> = env.agents().iter().map(|a| a.malfunction_remaining).collect();
            let halts = vec![Action::Halt; 10];
            env.step(&halts).unwrap();
            for (i, agent) in env.agents().iter().enumerate() {
                if before[i] == 0 {
                    healthy_steps += 1;
                    if agent.malfunction_remaining > 0 {
                        onsets += 1;
                        durations_ok &=
                            (3..=6).contains(&agent.malfunction_remaining);
                    }
                }
            }
        }
        assert!(durations_ok);
        assert!(healthy_steps > 5_000);
        let rate = onsets as f64 / healthy_steps as f64;
        assert!((rate - 0.1).abs() < 0.01, "onset rate {rate}");
    }

    #[test]
    fn conservation_and_exclusivity_on_fixture() {
        let g = line_grid(6);
        let tasks = [
            AgentTask {
                start: cell(1, 0),
                start_direction: Direction::East,
                target: cell(5, 0),
            },
            AgentTask {
                start: cell(1, 0),
                start_direction: Direction::East,
                target: cell(4, 0),
            },
        ];
        // Shared start cell: the second agent has to wait for the first to
        // clear the cell before it can depart.
        let mut env = EnvState::reset(
            g,
            &tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            5,
        )
        .unwrap();
        for _ in 0..12 {
            if env.is_done() {
                break;
            }
            env.step(&[Action::Forward, Action::Forward]).unwrap();
            let mut seen = alloc::collections::BTreeSet::new();
            let mut counts = [0usize; 3];
            for a in env.agents() {
                match a.status {
                    AgentStatus::ReadyToDepart => counts[0] += 1,
                    AgentStatus::Active => {
                        counts[1] += 1;
                        assert!(seen.insert(a.position.unwrap()), "two agents share a cell");
                    }
                    AgentStatus::Done => counts[2] += 1,
                }
            }
            assert_eq!(counts.iter().sum::<usize>(), 2);
        }
        assert!(env.agents().iter().all(|a| a.status == AgentStatus::Done));
    }
}
