//! The environment file format: a versioned JSON document with the grid's
//! 2-byte cell codes carried as base64-encoded little-endian row-major
//! payload. Serialization is canonical (fixed field order, pretty-printed),
//! so generate -> serialize -> deserialize -> serialize is byte-identical.

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use railgrid_core::{
    AgentTask, CellPos, Direction, EnvState, Grid, MalfunctionParams, ResetError, RewardConfig,
};

pub const ENV_FORMAT: &str = "railgrid-env";
pub const ENV_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvFile {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub max_steps: u32,
    pub grid: GridSection,
    pub agents: Vec<TaskSection>,
    pub malfunction: MalfunctionSection,
    pub reward: RewardSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    pub width: u16,
    pub height: u16,
    pub cells_base64: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSection {
    pub start: [u16; 2],
    pub direction: u8,
    pub target: [u16; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MalfunctionSection {
    pub probability: f64,
    pub min_duration: u32,
    pub max_duration: u32,
}

impl Default for MalfunctionSection {
    fn default() -> Self {
        MalfunctionSection {
            probability: 0.0,
            min_duration: 0,
            max_duration: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardSection {
    pub alpha: f64,
    pub beta: f64,
    pub illegal_penalty: f64,
}

impl Default for RewardSection {
    fn default() -> Self {
        RewardSection {
            alpha: 1.0,
            beta: 1.0,
            illegal_penalty: 0.0,
        }
    }
}

impl From<MalfunctionSection> for MalfunctionParams {
    fn from(s: MalfunctionSection) -> Self {
        MalfunctionParams {
            probability: s.probability,
            min_duration: s.min_duration,
            max_duration: s.max_duration,
        }
    }
}

impl From<RewardSection> for RewardConfig {
    fn from(s: RewardSection) -> Self {
        RewardConfig {
            alpha: s.alpha,
            beta: s.beta,
            illegal_penalty: s.illegal_penalty,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EnvFileError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("not an environment file (format tag {0:?})")]
    Format(String),
    #[error("unsupported environment file version {0}")]
    Version(u32),
    #[error("invalid environment payload: {0}")]
    Payload(String),
    #[error(transparent)]
    Reset(#[from] ResetError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Captures a fresh (t = 0) environment as a file document.
pub fn serialize_env(env: &EnvState) -> EnvFile {
    let grid = env.grid();
    EnvFile {
        format: ENV_FORMAT.to_string(),
        version: ENV_VERSION,
        seed: env.seed(),
        max_steps: env.max_steps(),
        grid: GridSection {
            width: grid.width(),
            height: grid.height(),
            cells_base64: BASE64.encode(grid.to_le_bytes()),
        },
        agents: env
            .agents()
            .iter()
            .map(|a| TaskSection {
                start: [a.start.x, a.start.y],
                direction: a.start_direction.index(),
                target: [a.target.x, a.target.y],
            })
            .collect(),
        malfunction: MalfunctionSection {
            probability: env.malfunction_params().probability,
            min_duration: env.malfunction_params().min_duration,
            max_duration: env.malfunction_params().max_duration,
        },
        reward: RewardSection {
            alpha: env.reward_config().alpha,
            beta: env.reward_config().beta,
            illegal_penalty: env.reward_config().illegal_penalty,
        },
    }
}

/// Reconstructs a fresh environment from a file document.
pub fn deserialize_env(file: &EnvFile) -> Result<EnvState, EnvFileError> {
    if file.format != ENV_FORMAT {
        return Err(EnvFileError::Format(file.format.clone()));
    }
    if file.version != ENV_VERSION {
        return Err(EnvFileError::Version(file.version));
    }
    let bytes = BASE64
        .decode(&file.grid.cells_base64)
        .map_err(|e| EnvFileError::Payload(format!("cell payload is not base64: {e}")))?;
    let expected = file.grid.width as usize * file.grid.height as usize * 2;
    if bytes.len() != expected {
        return Err(EnvFileError::Payload(format!(
            "cell payload holds {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let grid = Grid::from_le_bytes(file.grid.width, file.grid.height, &bytes)
        .ok_or_else(|| EnvFileError::Payload("cell payload does not match the grid dimensions".into()))?;
    let tasks: Vec<AgentTask> = file
        .agents
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let direction = Direction::from_index(t.direction).ok_or_else(|| {
                EnvFileError::Payload(format!("agent {i} has invalid direction {}", t.direction))
            })?;
            Ok(AgentTask {
                start: CellPos::new(t.start[0], t.start[1]),
                start_direction: direction,
                target: CellPos::new(t.target[0], t.target[1]),
            })
        })
        .collect::<Result<_, EnvFileError>>()?;
    let env = EnvState::reset_with_limit(
        grid,
        &tasks,
        file.malfunction.into(),
        file.reward.into(),
        file.seed,
        file.max_steps,
    )?;
    Ok(env)
}

/// Canonical text form: pretty JSON plus a trailing newline.
pub fn to_json_string(file: &EnvFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("env file serializes");
    s.push('\n');
    s
}

/// Parses the text form, reporting the defect location on malformed input.
pub fn parse_env_str(text: &str) -> Result<EnvFile, EnvFileError> {
    serde_json::from_str(text).map_err(|e| EnvFileError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn env_to_file(env: &EnvState, path: &Path) -> Result<(), EnvFileError> {
    fs::write(path, to_json_string(&serialize_env(env))).map_err(|source| EnvFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn env_from_file(path: &Path) -> Result<EnvState, EnvFileError> {
    let text = fs::read_to_string(path).map_err(|source| EnvFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    deserialize_env(&parse_env_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use railgrid_core::{assign_tasks, generate_sparse, GeneratorParams};

    fn sample_env(seed: u64) -> EnvState {
        let params = GeneratorParams::small(seed);
        let (grid, cities) = generate_sparse(&params).unwrap();
        let tasks = assign_tasks(&grid, &cities, params.n_agents, seed ^ 0x5EED).unwrap();
        EnvState::reset(
            grid,
            &tasks,
            MalfunctionParams::OFF,
            RewardConfig::BENCHMARK,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let env = sample_env(7);
        let first = to_json_string(&serialize_env(&env));
        let reloaded = deserialize_env(&parse_env_str(&first).unwrap()).unwrap();
        let second = to_json_string(&serialize_env(&reloaded));
        assert_eq!(first, second);
    }

    #[test]
    fn truncated_file_reports_location() {
        let env = sample_env(8);
        let text = to_json_string(&serialize_env(&env));
        let truncated = &text[..text.len() / 2];
        match parse_env_str(truncated) {
            Err(EnvFileError::Parse { line, .. }) => assert!(line > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_format_tag_is_rejected() {
        let env = sample_env(9);
        let mut file = serialize_env(&env);
        file.format = "something-else".into();
        assert!(matches!(
            deserialize_env(&file),
            Err(EnvFileError::Format(_))
        ));
    }

    #[test]
    fn corrupt_payload_is_rejected() {
        let env = sample_env(10);
        let mut file = serialize_env(&env);
        file.grid.cells_base64.truncate(8);
        assert!(matches!(
            deserialize_env(&file),
            Err(EnvFileError::Payload(_))
        ));
    }
}
