//! Benchmark harness: simulation scenarios, timing summaries and
//! clustering of edge-list files.

pub mod config;
pub mod real;
pub mod records;
pub mod scenarios;
pub mod timing;

pub use config::{Method, Scenario, ScenarioConfig};
pub use real::{run_real, Baseline, RealConfig, RealSummary};
pub use records::{read_records, write_records, Record, RowKind, Status, Trend};
pub use scenarios::{rate_table, run_scenario, run_scenario1, run_scenario2, run_scenario3, run_scenario4};
pub use timing::{loglog_slope, timing_report, TimingReport};
