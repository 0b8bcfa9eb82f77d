//! Harness around the simulation core: environment and trace file formats,
//! the episode runner, the two-round benchmark protocol, SVG rendering, and
//! the newline-delimited remote-agent protocol.

pub mod env_file;
pub mod remote;
pub mod rounds;
pub mod runner;
pub mod suite;
pub mod svg;
pub mod trace;

pub use env_file::{
    deserialize_env, env_from_file, env_to_file, parse_env_str, serialize_env, EnvFile,
    EnvFileError,
};
pub use remote::{serve_episode, ClientMessage, RemotePolicy, ServerMessage, TimeoutBehavior};
pub use rounds::{
    round2_spec, run_round1, run_round2, should_stop_round2, EpisodeReport, GroupReport,
    RoundOptions, RoundReport, RoundStatus, StopReason,
};
pub use runner::{run_episode, EpisodeResult, LocalPolicy, RunError, StepPolicy};
pub use suite::{SuiteFile, TestGroupSpec};
pub use svg::render_svg;
pub use trace::{AgentRecord, StepRecord, TraceWriter};

/// Splitmix-style seed mixer for deriving independent per-episode streams
/// from one base seed.
pub fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut h = base ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(a.wrapping_add(1));
    h ^= b.wrapping_mul(0xC2B2_AE3D_27D4_EB4Fu64);
    h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^ (h >> 31)
}
