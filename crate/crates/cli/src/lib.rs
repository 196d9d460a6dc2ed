//! Scenario presets, batch execution and result files behind the `collusion` command.

pub mod batch;
pub mod bench;
pub mod config;
pub mod output;
pub mod probe;
pub mod table;

pub use batch::{run_batch, BatchOptions, BatchResult, BatchSummary};
pub use config::{ScenarioConfig, PRESET_NAMES};
