use super::config::{Scenario, ScenarioConfig};
use crate::error::Result;
use crate::evolution::{
    compare_traces, energy_balance_report, run_brute_force_evolution, run_discrete_evolution,
    structural_check, DeltaStudy, EnergyBalanceReport, EvolutionTrace, StructuralCheck,
};
use crate::slit_mesh::write_mesh;
use serde::Serialize;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct DeltaSummary {
    pub delta: f64,
    pub steps: usize,
    pub final_length: f64,
    pub final_components: usize,
    pub omega_hat: f64,
    pub lambda_hat: f64,
    pub max_balance_error_jump_free: f64,
    pub max_flux_error_jump_free: f64,
    pub bounds_hold: bool,
    pub a_priori_holds: bool,
    pub structure: StructuralCheck,
    pub trace_csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub runs: Vec<DeltaSummary>,
    pub jump_times: Vec<f64>,
    pub validations_passed: bool,
    /// File names inside the output directory.
    pub artifacts: Vec<String>,
}

/// Traces, energy-balance reports and structural checks for every δ of a scenario.
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub traces: Vec<EvolutionTrace>,
    pub balances: Vec<EnergyBalanceReport>,
    pub checks: Vec<StructuralCheck>,
    pub study: DeltaStudy,
}

impl ScenarioRun {
    pub fn validations_passed(&self) -> bool {
        self.checks.iter().all(StructuralCheck::all)
            && self
                .balances
                .iter()
                .all(|b| b.bounds_hold && b.a_priori_holds)
    }
}

pub fn simulate(scenario: &Scenario) -> Result<ScenarioRun> {
    let c = &scenario.config;
    let evaluator = scenario.evaluator();
    let mut traces = Vec::new();
    let mut balances = Vec::new();
    let mut checks = Vec::new();
    for &delta in &c.deltas {
        let trace = run_discrete_evolution(
            &evaluator,
            &c.program,
            &scenario.k0,
            delta,
            &scenario.policy,
        )?;
        balances.push(energy_balance_report(&trace, c.energy.k));
        checks.push(structural_check(&trace, &evaluator, &c.program)?);
        traces.push(trace);
    }
    let study = compare_traces(traces.clone(), &scenario.sample_times());
    Ok(ScenarioRun {
        scenario: scenario.clone(),
        traces,
        balances,
        checks,
        study,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), value)?;
    Ok(())
}

/// Run a scenario and write its artifacts into `out`:
/// `config.toml`, per-δ `trace_<k>.csv`, `cracks_<k>.json`, `balance_<k>.json`,
/// `delta_study.json`, `final_mesh.txt`, `final_field.csv` and `summary.json`.
pub fn run_scenario(config: &ScenarioConfig, out: &Path) -> Result<ScenarioReport> {
    let scenario = config.build()?;
    let run = simulate(&scenario)?;
    fs::create_dir_all(out)?;
    let mut artifacts: Vec<String> = Vec::new();
    let mut emit = |name: String| {
        let p = out.join(&name);
        artifacts.push(name);
        p
    };

    fs::write(emit("config.toml".into()), config.to_toml()?)?;
    let mut runs = Vec::new();
    for (k, ((trace, balance), check)) in run
        .traces
        .iter()
        .zip(&run.balances)
        .zip(&run.checks)
        .enumerate()
    {
        let csv = format!("trace_{k}.csv");
        trace.write_csv(BufWriter::new(File::create(emit(csv.clone()))?))?;
        trace.write_cracks_json(BufWriter::new(File::create(emit(format!(
            "cracks_{k}.json"
        )))?))?;
        write_json(&emit(format!("balance_{k}.json")), balance)?;
        let last = trace.steps.last().expect("trace has the initial step");
        runs.push(DeltaSummary {
            delta: trace.delta,
            steps: trace.steps.len(),
            final_length: last.crack_length,
            final_components: last.components,
            omega_hat: balance.omega_hat,
            lambda_hat: balance.lambda_hat,
            max_balance_error_jump_free: balance.max_balance_error_jump_free,
            max_flux_error_jump_free: balance.max_flux_error_jump_free,
            bounds_hold: balance.bounds_hold,
            a_priori_holds: balance.a_priori_holds,
            structure: *check,
            trace_csv: csv,
        });
    }
    write_json(&emit("delta_study.json".into()), &run.study)?;

    let finest = run.traces.last().expect("at least one delta");
    let last = finest.steps.last().unwrap();
    let evaluator = scenario.evaluator();
    let eval = evaluator.evaluate(&last.crack)?;
    write_mesh(
        &eval.mesh,
        BufWriter::new(File::create(emit("final_mesh.txt".into()))?),
    )?;
    eval.field(&config.program.coefficients(last.t))
        .write_csv(BufWriter::new(File::create(emit(
            "final_field.csv".into(),
        ))?))?;

    let mut report = ScenarioReport {
        name: config.name.clone(),
        runs,
        jump_times: run.study.jump_times(),
        validations_passed: run.validations_passed(),
        artifacts: Vec::new(),
    };
    artifacts.push("summary.json".into());
    report.artifacts = artifacts;
    write_json(&out.join("summary.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub delta: f64,
    pub steps: usize,
    /// Step energies and cracks coincide exactly.
    pub identical: bool,
    pub max_energy_difference: f64,
}

/// Policy-driven evolution against exhaustive search over the scenario pool, per δ.
pub fn oracle_compare(scenario: &Scenario, deltas: &[f64]) -> Result<Vec<OracleRow>> {
    let c = &scenario.config;
    let evaluator = scenario.evaluator();
    deltas
        .iter()
        .map(|&delta| {
            let a = run_discrete_evolution(
                &evaluator,
                &c.program,
                &scenario.k0,
                delta,
                &scenario.policy,
            )?;
            let b = run_brute_force_evolution(
                &evaluator,
                &c.program,
                &scenario.k0,
                delta,
                scenario.pool(),
                c.max_components,
            )?;
            let identical = a.steps.len() == b.steps.len()
                && a.steps
                    .iter()
                    .zip(&b.steps)
                    .all(|(x, y)| x.energy == y.energy && x.crack == y.crack);
            let max_energy_difference = a
                .steps
                .iter()
                .zip(&b.steps)
                .map(|(x, y)| (x.energy.total - y.energy.total).abs())
                .fold(0.0, f64::max);
            Ok(OracleRow {
                delta,
                steps: a.steps.len(),
                identical,
                max_energy_difference,
            })
        })
        .collect()
}
