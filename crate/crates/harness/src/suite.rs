//! Test-suite configuration: an ordered list of generator-driven test groups,
//! loaded from one JSON config file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use railgrid_core::GeneratorParams;

use crate::env_file::{EnvFileError, MalfunctionSection, RewardSection};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteFile {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    /// Ordered from low to high complexity.
    pub tests: Vec<TestGroupSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestGroupSpec {
    pub name: String,
    pub generator: GeneratorSection,
    #[serde(default)]
    pub malfunction: MalfunctionSection,
    #[serde(default)]
    pub reward: RewardSection,
    /// Step limit override; default is 8 * (width + height).
    #[serde(default)]
    pub max_steps: Option<u32>,
    pub episodes: u32,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSection {
    pub width: u16,
    pub height: u16,
    pub n_cities: u16,
    pub n_agents: u16,
    #[serde(default = "default_parallel_tracks")]
    pub max_parallel_tracks: u8,
    #[serde(default)]
    pub grid_mode: bool,
}

fn default_parallel_tracks() -> u8 {
    2
}

impl GeneratorSection {
    pub fn params(&self, seed: u64) -> GeneratorParams {
        GeneratorParams {
            width: self.width,
            height: self.height,
            n_cities: self.n_cities,
            n_agents: self.n_agents,
            max_parallel_tracks: self.max_parallel_tracks,
            grid_mode: self.grid_mode,
            seed,
        }
    }
}

impl TestGroupSpec {
    /// The benchmark-style starting test: 25x25 cells, 5 agents.
    pub fn benchmark_start(seed: u64) -> TestGroupSpec {
        TestGroupSpec {
            name: "Test_0".into(),
            generator: GeneratorSection {
                width: 25,
                height: 25,
                n_cities: 3,
                n_agents: 5,
                max_parallel_tracks: 2,
                grid_mode: false,
            },
            malfunction: MalfunctionSection::default(),
            reward: RewardSection::default(),
            max_steps: None,
            episodes: 10,
            seed,
        }
    }
}

pub fn suite_from_file(path: &Path) -> Result<SuiteFile, EnvFileError> {
    let text = fs::read_to_string(path).map_err(|source| EnvFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| EnvFileError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn suite_to_file(suite: &SuiteFile, path: &Path) -> Result<(), EnvFileError> {
    let mut text = serde_json::to_string_pretty(suite).expect("suite serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| EnvFileError::Io {
        path: path.display().to_string(),
        source,
    })
}
