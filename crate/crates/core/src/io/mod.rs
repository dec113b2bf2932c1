//! Scenario files, synthetic scenarios and the pipeline driver.

pub mod config;
pub mod formats;
pub mod pipeline;
pub mod synth;

pub use config::{load_scenario, load_scenario_with, ConfigIssue, Override, ScenarioConfig};
pub use pipeline::{run_pipeline, run_stages, PipelineRun, RunReport, Stage, TripSource};
pub use synth::{build_synthetic, synth_scenario, NetworkStyle, SynthSpec, SyntheticScenario};
