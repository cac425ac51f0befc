//! Scenario configuration, the worked examples and artifact output.

mod config;
mod examples;
mod run;

pub use config::{bundled, PolicyConfig, Run, Scenario, ScenarioConfig, BUNDLED};
pub use examples::{
    conjugate_on_slit, example_oscillating, example_transmission, golab_demo, graded_tip_mesh,
    midline_mesh, ConjugateRow, GolabDemo, OscillatingRow, TransmissionParams, TransmissionRow,
};
pub use run::{
    oracle_compare, run_scenario, simulate, DeltaSummary, OracleRow, ScenarioReport, ScenarioRun,
};
