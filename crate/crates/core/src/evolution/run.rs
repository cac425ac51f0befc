use super::evaluator::{CrackEval, Evaluator};
use super::program::{BoundaryProgram, TimeGrid};
use super::step::{brute_force_step, incremental_step, CandidatePolicy, StepOutcome};
use crate::compact_sets::{CrackSet, CrackSetJson, Edge};
use crate::energy::EnergyBreakdown;
use crate::error::{FractureError, Result};
use serde::Serialize;
use std::io::{self, Write};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub t: f64,
    #[serde(serialize_with = "crack_as_json")]
    pub crack: CrackSet,
    pub energy: EnergyBreakdown,
    /// `‖∇u_i‖²`
    pub dirichlet_integral: f64,
    /// `μ (∇u_i | ∇Π_h (g_{i+1} − g_i))`; zero on the last step.
    pub work: f64,
    /// Same increment from boundary fluxes.
    pub flux_work: f64,
    /// `Σ_{r<i} W_r`
    pub work_cumulative: f64,
    pub components: usize,
    pub crack_length: f64,
    pub candidates: usize,
    pub skipped: usize,
    pub solver_iterations: usize,
    pub triangles: usize,
}

fn crack_as_json<S: serde::Serializer>(k: &CrackSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    CrackSetJson::from(k).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionTrace {
    pub delta: f64,
    pub t_end: f64,
    pub max_components: usize,
    /// `max_t ‖∇Π_h g(t)‖²` over the meshes of the run.
    pub a_priori_bound: f64,
    /// `μ/2` times the bound above, in energy units.
    pub reference_bulk: f64,
    pub steps: Vec<StepRecord>,
}

impl EvolutionTrace {
    pub fn lattice_spacing(&self) -> f64 {
        self.steps[0].crack.lattice().spacing
    }

    /// `K_δ(t)`: the crack of the step whose interval contains `t`.
    pub fn crack_at(&self, t: f64) -> &CrackSet {
        let i = ((t / self.delta) + 1e-9).floor().max(0.0) as usize;
        &self.steps[i.min(self.steps.len() - 1)].crack
    }

    pub fn total_energies(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.energy.total).collect()
    }

    /// Columns: `t,bulk,surface,total,work_cumulative,components,crack_length`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(
            w,
            "t,bulk,surface,total,work_cumulative,components,crack_length"
        )?;
        for s in &self.steps {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                s.t,
                s.energy.bulk,
                s.energy.surface,
                s.energy.total,
                s.work_cumulative,
                s.components,
                s.crack_length
            )?;
        }
        Ok(())
    }

    /// `{"delta", "steps": [{"step", "t", "crack": {lattice, edges, snap_error}}]}`
    pub fn write_cracks_json(&self, w: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Entry {
            step: usize,
            t: f64,
            crack: CrackSetJson,
        }
        #[derive(Serialize)]
        struct Doc {
            delta: f64,
            steps: Vec<Entry>,
        }
        let doc = Doc {
            delta: self.delta,
            steps: self
                .steps
                .iter()
                .map(|s| Entry {
                    step: s.index,
                    t: s.t,
                    crack: CrackSetJson::from(&s.crack),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(w, &doc)?;
        Ok(())
    }
}

enum Stepper<'a> {
    Policy(&'a CandidatePolicy),
    BruteForce { pool: &'a [Edge], m: usize },
}

/// Incremental minimization on the grid `t_i = iδ`, starting from `K_0 = k0`.
pub fn run_discrete_evolution(
    evaluator: &Evaluator,
    program: &BoundaryProgram,
    k0: &CrackSet,
    delta: f64,
    policy: &CandidatePolicy,
) -> Result<EvolutionTrace> {
    run(
        evaluator,
        program,
        k0,
        delta,
        policy.max_components,
        Stepper::Policy(policy),
    )
}

/// The same scheme with every step solved by exhaustive search over `pool`.
pub fn run_brute_force_evolution(
    evaluator: &Evaluator,
    program: &BoundaryProgram,
    k0: &CrackSet,
    delta: f64,
    pool: &[Edge],
    m: usize,
) -> Result<EvolutionTrace> {
    run(
        evaluator,
        program,
        k0,
        delta,
        m,
        Stepper::BruteForce { pool, m },
    )
}

fn run(
    evaluator: &Evaluator,
    program: &BoundaryProgram,
    k0: &CrackSet,
    delta: f64,
    m: usize,
    stepper: Stepper,
) -> Result<EvolutionTrace> {
    program.validate()?;
    if evaluator.profiles != program.profiles() {
        return Err(FractureError::InvalidInput(
            "evaluator profiles differ from the program".into(),
        ));
    }
    if k0.component_count() > m {
        return Err(FractureError::InvalidInput(format!(
            "initial crack has {} components, budget is {m}",
            k0.component_count()
        )));
    }
    let grid = TimeGrid::new(delta, program.t_end)?;
    let wrap = |step: usize| {
        move |e: FractureError| FractureError::Step {
            step,
            source: Box::new(e),
        }
    };

    let mut outcomes: Vec<(CrackSet, EnergyBreakdown, Arc<CrackEval>, usize, usize)> = Vec::new();
    let e0 = evaluator.evaluate(k0).map_err(wrap(0))?;
    let a0 = program.coefficients(0.0);
    outcomes.push((k0.clone(), evaluator.energy_of(&e0, &a0), e0, 1, 0));
    for (i, &t) in grid.times.iter().enumerate().skip(1) {
        let prev = &outcomes[i - 1].0;
        let a = program.coefficients(t);
        let StepOutcome {
            crack,
            energy,
            eval,
            candidates,
            skipped,
        } = match stepper {
            Stepper::Policy(p) => incremental_step(evaluator, prev, &a, p),
            Stepper::BruteForce { pool, m } => brute_force_step(evaluator, prev, &a, pool, m),
        }
        .map_err(wrap(i))?;
        outcomes.push((crack, energy, eval, candidates, skipped.len()));
    }

    let mu = evaluator.energy.mu;
    let mut steps = Vec::with_capacity(outcomes.len());
    let mut cumulative = 0.0;
    for (i, (crack, energy, eval, candidates, skipped)) in outcomes.iter().enumerate() {
        let a = program.coefficients(grid.times[i]);
        let (work, flux_work) = match grid.times.get(i + 1) {
            Some(&next) => {
                let da: Vec<f64> = program
                    .coefficients(next)
                    .iter()
                    .zip(&a)
                    .map(|(x, y)| x - y)
                    .collect();
                (mu * eval.pairing(&a, &da), mu * eval.flux_pairing(&a, &da))
            }
            None => (0.0, 0.0),
        };
        steps.push(StepRecord {
            index: i,
            t: grid.times[i],
            crack: crack.clone(),
            energy: *energy,
            dirichlet_integral: eval.dirichlet_integral(&a),
            work,
            flux_work,
            work_cumulative: cumulative,
            components: eval.components,
            crack_length: eval.length,
            candidates: *candidates,
            skipped: *skipped,
            solver_iterations: eval.solver_iterations,
            triangles: eval.mesh.triangle_count(),
        });
        cumulative += work;
    }

    // g is linear in t between breakpoints, so the convex interpolant energy
    // peaks at a grid time or a breakpoint
    let mut times = grid.times.clone();
    times.extend(program.breakpoints());
    let mut bound = 0.0f64;
    for (_, _, eval, _, _) in &outcomes {
        for &t in &times {
            bound = bound.max(eval.interpolant_integral(&program.coefficients(t)));
        }
    }
    Ok(EvolutionTrace {
        delta,
        t_end: program.t_end,
        max_components: m,
        a_priori_bound: bound,
        reference_bulk: 0.5 * mu * bound,
        steps,
    })
}
