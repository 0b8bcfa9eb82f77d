//! The episode loop: drives one environment with one step-level policy,
//! recording rewards, a trace, and the report row.

use std::io::Write;
use std::time::{Duration, Instant};

use railgrid_core::{
    episode_return, normalized_return, Action, AgentStatus, EnvState, EpisodeTrace, Policy,
    StepError,
};

use crate::trace::{StepRecord, TraceWriter};

/// A policy queried once per step for the whole action vector. Local
/// per-agent policies adapt via [`LocalPolicy`]; the remote protocol client
/// implements it directly.
pub trait StepPolicy {
    fn name(&self) -> &str;

    /// Called once before the first step of an episode.
    fn on_episode_start(&mut self, _env: &EnvState) -> Result<(), RunError> {
        Ok(())
    }

    fn step_actions(&mut self, env: &EnvState) -> Result<Vec<Action>, RunError>;

    /// Called after the episode finished (or aborted), with the result row.
    fn on_episode_end(&mut self, _result: &EpisodeResult) -> Result<(), RunError> {
        Ok(())
    }

    /// Steps where the policy missed its deadline and all-NoOp was played.
    fn timeouts(&self) -> u32 {
        0
    }
}

/// Adapter: queries a per-agent [`Policy`] for every agent in id order.
pub struct LocalPolicy<P: Policy> {
    inner: P,
}

impl<P: Policy> LocalPolicy<P> {
    pub fn new(inner: P) -> LocalPolicy<P> {
        LocalPolicy { inner }
    }
}

impl<P: Policy> StepPolicy for LocalPolicy<P> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn step_actions(&mut self, env: &EnvState) -> Result<Vec<Action>, RunError> {
        Ok((0..env.n_agents())
            .map(|i| self.inner.act(env, i))
            .collect())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("remote policy exceeded its per-step deadline at step {step}")]
    PolicyTimeout { step: u32 },
    #[error("remote protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Sim(#[from] StepError),
    #[error("trace io: {0}")]
    TraceIo(#[from] std::io::Error),
}

/// One episode's report row.
#[derive(Clone, Debug)]
pub struct EpisodeResult {
    pub steps: u32,
    /// Fraction of agents that reached their target.
    pub completion: f64,
    pub agent_returns: Vec<f64>,
    pub normalized_returns: Vec<f64>,
    pub trace: EpisodeTrace,
    pub wall: Duration,
    /// Steps substituted with all-NoOp after a missed remote deadline.
    pub timeouts: u32,
    /// Agents in a mutual blocking pattern when the episode ended.
    pub deadlocked: usize,
}

/// Runs `env` to completion (all done or the step limit, optionally capped
/// earlier by `step_budget`), returning the trace and the report row.
pub fn run_episode<W: Write>(
    env: &mut EnvState,
    policy: &mut dyn StepPolicy,
    step_budget: Option<u32>,
    mut trace_sink: Option<&mut TraceWriter<W>>,
) -> Result<EpisodeResult, RunError> {
    let started = Instant::now();
    let mut trace = EpisodeTrace::new(env.n_agents());
    policy.on_episode_start(env)?;
    let cap = step_budget.unwrap_or(u32::MAX);
    let mut steps = 0u32;
    while !env.is_done() && steps < cap {
        let actions = policy.step_actions(env)?;
        let outcome = env.step(&actions)?;
        trace.push_step(&outcome.rewards);
        for (agent, done) in trace.completed.iter_mut().zip(&outcome.agent_done) {
            *agent = *done;
        }
        if let Some(writer) = trace_sink.as_deref_mut() {
            writer.write(&StepRecord::capture(env, &actions, &outcome))?;
        }
        steps += 1;
    }
    let done_agents = env
        .agents()
        .iter()
        .filter(|a| a.status == AgentStatus::Done)
        .count();
    let n = env.n_agents().max(1);
    let cfg = *env.reward_config();
    let t_limit = env.max_steps();
    let result = EpisodeResult {
        steps,
        completion: done_agents as f64 / n as f64,
        agent_returns: (0..env.n_agents())
            .map(|i| episode_return(&trace, i))
            .collect(),
        normalized_returns: (0..env.n_agents())
            .map(|i| normalized_return(&trace, i, &cfg, t_limit))
            .collect(),
        trace,
        wall: started.elapsed(),
        timeouts: policy.timeouts(),
        deadlocked: env.detect_deadlock().len(),
    };
    policy.on_episode_end(&result)?;
    Ok(result)
}
