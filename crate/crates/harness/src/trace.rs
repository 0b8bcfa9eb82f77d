//! Line-delimited step traces: one JSON record per simulation step, suitable
//! for replay, diffing, and offline consumers.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use railgrid_core::{Action, AgentStatus, EnvState, StepOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u32,
    pub actions: Vec<u8>,
    pub rewards: Vec<f64>,
    pub agents: Vec<AgentRecord>,
    pub done: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<u16>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<u16>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dir: Option<u8>,
    pub malfunction: u32,
}

impl StepRecord {
    /// Snapshot after `env.step(actions)` returned `outcome`.
    pub fn capture(env: &EnvState, actions: &[Action], outcome: &StepOutcome) -> StepRecord {
        StepRecord {
            t: env.t(),
            actions: actions.iter().map(|a| a.index()).collect(),
            rewards: outcome.rewards.clone(),
            agents: env
                .agents()
                .iter()
                .map(|a| AgentRecord {
                    status: match a.status {
                        AgentStatus::ReadyToDepart => "ready".into(),
                        AgentStatus::Active => "active".into(),
                        AgentStatus::Done => "done".into(),
                    },
                    x: a.position.map(|p| p.x),
                    y: a.position.map(|p| p.y),
                    dir: a.direction.map(|d| d.index()),
                    malfunction: a.malfunction_remaining,
                })
                .collect(),
            done: outcome.done,
        }
    }
}

/// NDJSON sink for step records.
pub struct TraceWriter<W: Write> {
    sink: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(sink: W) -> TraceWriter<W> {
        TraceWriter { sink }
    }

    pub fn write(&mut self, record: &StepRecord) -> io::Result<()> {
        let line = serde_json::to_string(record).expect("step record serializes");
        writeln!(self.sink, "{line}")
    }

    pub fn into_inner(self) -> W {
        self.sink
    }
}

/// Reads a full NDJSON trace back, e.g. for replay diffs.
pub fn read_trace<R: BufRead>(reader: R) -> io::Result<Vec<StepRecord>> {
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: StepRecord = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        records.push(record);
    }
    Ok(records)
}
