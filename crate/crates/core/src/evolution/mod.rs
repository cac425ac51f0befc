//! Time-discrete crack evolution by incremental energy minimization.

mod diagnostics;
mod evaluator;
mod program;
mod run;
mod step;


pub use diagnostics::{
    compare_traces, delta_convergence_study, energy_balance_report, structural_check,
    unilateral_minimality_check, DeltaStudy, EnergyBalanceReport, MinimalityReport, ProbeResult,
    SampleComparison, StepBalance, StructuralCheck,
};
pub use evaluator::{CrackEval, Evaluator};
pub use program::{BoundaryProgram, Profile, ProgramDatum, ProgramTerm, TimeGrid, TimeWeight};
pub use run::{run_brute_force_evolution, run_discrete_evolution, EvolutionTrace, StepRecord};
pub use step::{
    brute_force_step, generate_candidates, incremental_step, select_minimizer, CandidatePolicy,
    PolicyMode, StepOutcome, POOL_LIMIT, TIE_TOLERANCE,
};
