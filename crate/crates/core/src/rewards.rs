//! Per-step rewards, episode returns, and benchmark score aggregation.
//!
//! Every step, agent i receives `r_i = alpha * r_l + beta * r_g + r_p` where
//! the local term `r_l` is -1 while the agent is still on its way and 0 once
//! it sits at its target, the global term `r_g` is 1 only on the step where
//! every agent is done, and the configurable penalty `r_p <= 0` applies to
//! illegal moves (0 in the benchmark profile).

use alloc::vec;
use alloc::vec::Vec;

/// Tunable reward weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Applied on steps where the chosen action could not be executed. Must
    /// be <= 0; the benchmark profile fixes it at 0.
    pub illegal_penalty: f64,
}

impl RewardConfig {
    /// The benchmark profile: alpha = 1, beta = 1, no illegal-move penalty.
    pub const BENCHMARK: RewardConfig = RewardConfig {
        alpha: 1.0,
        beta: 1.0,
        illegal_penalty: 0.0,
    };
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig::BENCHMARK
    }
}

/// One step's reward for one agent.
pub fn step_reward(agent_done: bool, all_done: bool, illegal_move: bool, cfg: &RewardConfig) -> f64 {
    let local = if agent_done { 0.0 } else { -1.0 };
    let global = if all_done { 1.0 } else { 0.0 };
    let penalty = if illegal_move { cfg.illegal_penalty } else { 0.0 };
    cfg.alpha * local + cfg.beta * global + penalty
}

/// Full per-step reward record of one episode.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeTrace {
    /// `rewards[agent][t - 1]` for t = 1..=termination_step.
    pub rewards: Vec<Vec<f64>>,
    /// The step at which the episode terminated (all done or step limit).
    pub termination_step: u32,
    /// Per agent: did it reach its target.
    pub completed: Vec<bool>,
}

impl EpisodeTrace {
    pub fn new(n_agents: usize) -> EpisodeTrace {
        EpisodeTrace {
            rewards: vec![Vec::new(); n_agents],
            termination_step: 0,
            completed: vec![false; n_agents],
        }
    }

    pub fn push_step(&mut self, step_rewards: &[f64]) {
        debug_assert_eq!(step_rewards.len(), self.rewards.len());
        for (seq, r) in self.rewards.iter_mut().zip(step_rewards) {
            seq.push(*r);
        }
        self.termination_step += 1;
    }

    pub fn n_agents(&self) -> usize {
        self.rewards.len()
    }
}

/// The episode return `g_i`: the plain sum of agent i's step rewards.
pub fn episode_return(trace: &EpisodeTrace, agent_id: usize) -> f64 {
    trace.rewards[agent_id].iter().sum()
}

/// Normalized return in (-inf, 1]: `1 + g_i / (alpha * t_limit)`, clamped
/// above at 1. An agent that never finishes under the benchmark profile
/// scores 0; instant completion scores 1.
///
/// This normalization is an implementation convention (the raw score ranking
/// is unaffected by it). Assumes `alpha > 0`; a non-positive denominator
/// yields 1.0.
pub fn normalized_return(trace: &EpisodeTrace, agent_id: usize, cfg: &RewardConfig, t_limit: u32) -> f64 {
    let denom = cfg.alpha * t_limit as f64;
    if denom <= 0.0 {
        return 1.0;
    }
    let g = episode_return(trace, agent_id);
    let value = 1.0 + g / denom;
    if value > 1.0 {
        1.0
    } else {
        value
    }
}

/// The aggregate benchmark score and its per-environment breakdown.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Score {
    /// Sum over environments of the sum of per-agent returns; higher is better.
    pub total: f64,
    pub per_env: Vec<f64>,
}

/// Accumulates the double sum `S = sum_j sum_i g_i^j` over environment runs.
pub fn benchmark_score<R: AsRef<[f64]>>(env_returns: &[R]) -> Score {
    let per_env: Vec<f64> = env_returns
        .iter()
        .map(|r| r.as_ref().iter().sum())
        .collect();
    Score {
        total: per_env.iter().sum(),
        per_env,
    }
}
