use super::evaluator::Evaluator;
use super::program::BoundaryProgram;
use super::run::{run_discrete_evolution, EvolutionTrace};
use super::step::CandidatePolicy;
use crate::compact_sets::CrackSet;
use crate::error::Result;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct StepBalance {
    pub index: usize,
    pub t: f64,
    /// `E_{i+1} − E_i`
    pub delta_total: f64,
    pub work: f64,
    pub flux_work: f64,
    /// `|ΔE − W| / max(|W|, ε)`
    pub balance_error: f64,
    /// `|W_flux − W| / max(|W|, ε)`
    pub flux_error: f64,
    /// The crack changed over this step.
    pub jump: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyBalanceReport {
    /// Smallest `ω` with `E_j ≤ E_i + Σ_{i≤r<j} W_r + ω` for all `i < j`.
    pub omega_hat: f64,
    /// Data bound on `‖∇u_i‖` and `H¹(K_i)`.
    pub lambda_hat: f64,
    pub max_gradient_norm: f64,
    pub max_length: f64,
    pub bounds_hold: bool,
    /// `‖∇u_i‖² ≤ max_t ‖∇Π_h g(t)‖²` at every step.
    pub a_priori_holds: bool,
    /// Floor for the relative errors: `δ · E_ref / T`.
    pub epsilon: f64,
    pub steps: Vec<StepBalance>,
    pub max_balance_error_jump_free: f64,
    pub max_flux_error_jump_free: f64,
}

pub fn energy_balance_report(trace: &EvolutionTrace, toughness: f64) -> EnergyBalanceReport {
    let s = &trace.steps;
    let epsilon = trace.delta * trace.reference_bulk / trace.t_end;
    let floor = |w: f64| w.abs().max(epsilon).max(f64::MIN_POSITIVE);

    let mut steps = Vec::new();
    for i in 0..s.len().saturating_sub(1) {
        let delta_total = s[i + 1].energy.total - s[i].energy.total;
        let w = s[i].work;
        steps.push(StepBalance {
            index: i,
            t: s[i].t,
            delta_total,
            work: w,
            flux_work: s[i].flux_work,
            balance_error: (delta_total - w).abs() / floor(w),
            flux_error: (s[i].flux_work - w).abs() / floor(w),
            jump: s[i + 1].crack != s[i].crack,
        });
    }

    // S_j = E_j − Σ_{r<j} W_r; the slack is the largest rise of S
    let mut omega = 0.0f64;
    let mut min_s = f64::INFINITY;
    for r in s {
        let sj = r.energy.total - r.work_cumulative;
        omega = omega.max(sj - min_s);
        min_s = min_s.min(sj);
    }

    let positive_work: f64 = s.iter().map(|r| r.work.max(0.0)).sum();
    let lambda_hat = trace
        .a_priori_bound
        .sqrt()
        .max((s[0].energy.total + positive_work + omega) / toughness);
    let max_gradient_norm = s
        .iter()
        .map(|r| r.dirichlet_integral.sqrt())
        .fold(0.0, f64::max);
    let max_length = s.iter().map(|r| r.crack_length).fold(0.0, f64::max);
    let jump_free =
        |f: fn(&StepBalance) -> f64| steps.iter().filter(|b| !b.jump).map(f).fold(0.0, f64::max);

    EnergyBalanceReport {
        omega_hat: omega,
        lambda_hat,
        max_gradient_norm,
        max_length,
        bounds_hold: max_gradient_norm <= lambda_hat && max_length <= lambda_hat,
        a_priori_holds: s
            .iter()
            .all(|r| r.dirichlet_integral <= trace.a_priori_bound * (1.0 + 1e-10) + 1e-14),
        epsilon,
        max_balance_error_jump_free: jump_free(|b| b.balance_error),
        max_flux_error_jump_free: jump_free(|b| b.flux_error),
        steps,
    }
}

/// Exact structural checks on a trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StructuralCheck {
    pub irreversible: bool,
    pub component_budget: bool,
    pub surface_monotone: bool,
    pub one_sided_stability: bool,
}

impl StructuralCheck {
    pub fn all(&self) -> bool {
        self.irreversible
            && self.component_budget
            && self.surface_monotone
            && self.one_sided_stability
    }
}

/// `stability` compares `E(g_i, K_i)` with `E(g_i, K_{i−1})`, which needs the evaluator.
pub fn structural_check(
    trace: &EvolutionTrace,
    evaluator: &Evaluator,
    program: &BoundaryProgram,
) -> Result<StructuralCheck> {
    let s = &trace.steps;
    let mut stable = true;
    for w in s.windows(2) {
        let prev = evaluator.evaluate(&w[0].crack)?;
        let e_prev = evaluator
            .energy_of(&prev, &program.coefficients(w[1].t))
            .total;
        stable &= w[1].energy.total <= e_prev;
    }
    Ok(StructuralCheck {
        irreversible: s.windows(2).all(|w| w[0].crack.is_subset(&w[1].crack)),
        component_budget: s.iter().all(|r| r.components <= trace.max_components),
        surface_monotone: s
            .windows(2)
            .all(|w| w[0].energy.surface <= w[1].energy.surface),
        one_sided_stability: stable,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleComparison {
    pub t: f64,
    /// `d_H(K_{δ_j}(t), K_{δ_k}(t))`
    pub distances: Vec<Vec<f64>>,
    pub lengths: Vec<f64>,
    /// Distances between consecutive δ never grow.
    pub cauchy: bool,
    pub max_distance: f64,
    /// Some pair of traces is more than three lattice spacings apart.
    pub jump: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaStudy {
    pub deltas: Vec<f64>,
    pub samples: Vec<SampleComparison>,
    /// `K_δ(s) ⊆ K_δ(t)` for `s ≤ t`, per δ.
    pub monotone: Vec<bool>,
    #[serde(skip)]
    pub traces: Vec<EvolutionTrace>,
}

impl DeltaStudy {
    pub fn jump_times(&self) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.jump)
            .map(|s| s.t)
            .collect()
    }
}

pub fn delta_convergence_study(
    evaluator: &Evaluator,
    program: &BoundaryProgram,
    k0: &CrackSet,
    deltas: &[f64],
    policy: &CandidatePolicy,
    sample_times: &[f64],
) -> Result<DeltaStudy> {
    let traces = deltas
        .iter()
        .map(|&d| run_discrete_evolution(evaluator, program, k0, d, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(compare_traces(traces, sample_times))
}

/// Study over traces that were already computed, ordered by decreasing δ.
pub fn compare_traces(traces: Vec<EvolutionTrace>, sample_times: &[f64]) -> DeltaStudy {
    let n = traces.len();
    let spacing = traces.first().map_or(0.0, |t| t.lattice_spacing());
    let samples = sample_times
        .iter()
        .map(|&t| {
            let ks: Vec<&CrackSet> = traces.iter().map(|tr| tr.crack_at(t)).collect();
            let distances: Vec<Vec<f64>> = (0..n)
                .map(|j| (0..n).map(|k| ks[j].hausdorff(ks[k])).collect())
                .collect();
            let chain: Vec<f64> = (1..n).map(|j| distances[j - 1][j]).collect();
            let max_distance = distances.iter().flatten().copied().fold(0.0, f64::max);
            SampleComparison {
                t,
                lengths: ks.iter().map(|k| k.length()).collect(),
                cauchy: chain.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                max_distance,
                jump: max_distance > 3.0 * spacing,
                distances,
            }
        })
        .collect();
    DeltaStudy {
        deltas: traces.iter().map(|t| t.delta).collect(),
        monotone: traces
            .iter()
            .map(|tr| {
                tr.steps
                    .windows(2)
                    .all(|w| w[0].crack.is_subset(&w[1].crack))
            })
            .collect(),
        samples,
        traces,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub step: usize,
    pub t: f64,
    pub trace_energy: f64,
    pub probe_energy: Option<f64>,
    /// The probe contains the trace crack and respects the component budget.
    pub admissible: bool,
    pub holds: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub probes: Vec<ProbeResult>,
    pub violations: usize,
}

/// `E(g(t), K(t)) ≤ E(g(t), K) + tol` for every admissible probe `K ⊇ K(t)`.
/// A violation means the candidate family missed a better competitor.
pub fn unilateral_minimality_check(
    evaluator: &Evaluator,
    trace: &EvolutionTrace,
    program: &BoundaryProgram,
    probes: &[(usize, CrackSet)],
    tol: f64,
) -> MinimalityReport {
    let mut out = Vec::new();
    for (step, probe) in probes {
        let rec = &trace.steps[*step];
        let admissible =
            rec.crack.is_subset(probe) && probe.component_count() <= trace.max_components;
        let mut res = ProbeResult {
            step: *step,
            t: rec.t,
            trace_energy: rec.energy.total,
            probe_energy: None,
            admissible,
            holds: true,
            note: None,
        };
        if admissible {
            match evaluator.evaluate(probe) {
                Ok(e) => {
                    let pe = evaluator.energy_of(&e, &program.coefficients(rec.t)).total;
                    res.probe_energy = Some(pe);
                    res.holds = rec.energy.total <= pe + tol;
                }
                Err(err) => res.note = Some(err.to_string()),
            }
        } else {
            res.note = Some(
                "probe does not contain the trace crack or exceeds the component budget".into(),
            );
        }
        out.push(res);
    }
    MinimalityReport {
        violations: out.iter().filter(|p| !p.holds).count(),
        probes: out,
    }
}
