use super::evaluator::{CrackEval, Evaluator};
use crate::compact_sets::{CrackSet, Edge, LatticeNode};
use crate::energy::EnergyBreakdown;
use crate::error::{FractureError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Largest pool the exhaustive search accepts.
pub const POOL_LIMIT: usize = 20;

/// Relative tolerance under which two total energies count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyMode {
    /// Paths of at most `budget` edges grown from the crack endpoints.
    TipGrowth,
    /// Every subset of the pool with at most `budget` edges.
    PoolEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePolicy {
    pub mode: PolicyMode,
    pub budget: usize,
    /// Component budget `m`.
    pub max_components: usize,
    /// Restricts growth to these edges when present.
    #[serde(default)]
    pub pool: Option<Vec<Edge>>,
    /// Single-edge nucleation, used only while the component count is below `m`.
    #[serde(default = "yes")]
    pub nucleation: bool,
}

fn yes() -> bool {
    true
}

impl CandidatePolicy {
    pub fn pool_enumeration(pool: Vec<Edge>, max_components: usize) -> Self {
        Self {
            mode: PolicyMode::PoolEnumeration,
            budget: pool.len(),
            max_components,
            pool: Some(pool),
            nucleation: true,
        }
    }

    pub fn tip_growth(budget: usize, max_components: usize, pool: Option<Vec<Edge>>) -> Self {
        Self {
            mode: PolicyMode::TipGrowth,
            budget,
            max_components,
            pool,
            nucleation: true,
        }
    }
}

/// Result of one minimization step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub crack: CrackSet,
    pub energy: EnergyBreakdown,
    pub eval: Arc<CrackEval>,
    /// Candidates evaluated, the previous crack included.
    pub candidates: usize,
    /// Candidates dropped because meshing or solving failed.
    pub skipped: Vec<String>,
}

const DIRECTIONS: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

fn step(n: LatticeNode, (di, dj): (i64, i64), k: &CrackSet) -> Option<LatticeNode> {
    let lat = k.lattice();
    let (i, j) = (n.i as i64 + di, n.j as i64 + dj);
    (i >= 0 && j >= 0 && i <= lat.nx as i64 && j <= lat.ny as i64)
        .then(|| LatticeNode::new(i as u32, j as u32))
}

fn all_lattice_edges(k: &CrackSet) -> Vec<Edge> {
    let lat = k.lattice();
    let mut out = Vec::new();
    for j in 0..=lat.ny {
        for i in 0..=lat.nx {
            let a = LatticeNode::new(i, j);
            for d in DIRECTIONS.iter().take(4) {
                if let Some(b) = step(a, *d, k) {
                    out.push(Edge::new(a, b).expect("neighbours"));
                }
            }
        }
    }
    out
}

/// Candidate cracks strictly containing `prev` with at most `m` components.
pub fn generate_candidates(prev: &CrackSet, policy: &CandidatePolicy) -> Result<Vec<CrackSet>> {
    let mut sets: BTreeSet<Vec<Edge>> = BTreeSet::new();
    let pool: Option<Vec<Edge>> = policy.pool.as_ref().map(|p| {
        let mut v: Vec<Edge> = p
            .iter()
            .copied()
            .filter(|e| !prev.contains_edge(e))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    });
    match policy.mode {
        PolicyMode::PoolEnumeration => {
            let free = pool.ok_or_else(|| {
                FractureError::InvalidInput("pool enumeration needs an edge pool".into())
            })?;
            if free.len() > POOL_LIMIT {
                return Err(FractureError::PoolTooLarge {
                    size: free.len(),
                    limit: POOL_LIMIT,
                });
            }
            for mask in 1u32..(1u32 << free.len()) {
                if mask.count_ones() as usize > policy.budget {
                    continue;
                }
                let extra: Vec<Edge> = (0..free.len())
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| free[b])
                    .collect();
                sets.insert(extra);
            }
        }
        PolicyMode::TipGrowth => {
            for tip in prev.endpoints() {
                match &pool {
                    Some(free) => {
                        let mut path = Vec::new();
                        grow_in_pool(tip, free, policy.budget, &mut path, &mut sets);
                    }
                    None => {
                        for d in DIRECTIONS {
                            let mut path = Vec::new();
                            let mut at = tip;
                            while path.len() < policy.budget {
                                let Some(next) = step(at, d, prev) else { break };
                                let e = Edge::new(at, next)?;
                                if prev.contains_edge(&e) {
                                    break;
                                }
                                path.push(e);
                                sets.insert(path.clone());
                                at = next;
                            }
                        }
                    }
                }
            }
            if policy.nucleation && prev.component_count() < policy.max_components {
                let seeds = match &pool {
                    Some(free) => free.clone(),
                    None => all_lattice_edges(prev)
                        .into_iter()
                        .filter(|e| !prev.contains_edge(e))
                        .collect(),
                };
                for e in seeds {
                    sets.insert(vec![e]);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(sets.len());
    for extra in sets {
        let k = prev.with_edges(extra)?;
        if k.len() > prev.len() && k.component_count() <= policy.max_components {
            out.push(k);
        }
    }
    Ok(out)
}

fn grow_in_pool(
    at: LatticeNode,
    free: &[Edge],
    budget: usize,
    path: &mut Vec<Edge>,
    out: &mut BTreeSet<Vec<Edge>>,
) {
    if path.len() == budget {
        return;
    }
    for e in free {
        let next = if e.a == at {
            e.b
        } else if e.b == at {
            e.a
        } else {
            continue;
        };
        if path.contains(e) {
            continue;
        }
        path.push(*e);
        let mut key = path.clone();
        key.sort_unstable();
        out.insert(key);
        grow_in_pool(next, free, budget, path, out);
        path.pop();
    }
}

/// Index of the minimizer: lowest total energy, ties (within
/// [`TIE_TOLERANCE`]) to the smaller surface, then to the
/// lexicographically smaller edge list. Independent of input order.
pub fn select_minimizer(cands: &[(CrackSet, EnergyBreakdown)]) -> usize {
    assert!(!cands.is_empty());
    let best = cands
        .iter()
        .map(|c| c.1.total)
        .fold(f64::INFINITY, f64::min);
    let tol = TIE_TOLERANCE * best.abs().max(1.0);
    let tied: Vec<usize> = (0..cands.len())
        .filter(|&i| cands[i].1.total <= best + tol)
        .collect();
    let shortest = tied
        .iter()
        .map(|&i| cands[i].1.surface)
        .fold(f64::INFINITY, f64::min);
    tied.into_iter()
        .filter(|&i| cands[i].1.surface <= shortest + TIE_TOLERANCE * shortest.max(1.0))
        .min_by(|&a, &b| cands[a].0.edges().cmp(cands[b].0.edges()))
        .unwrap()
}

fn choose(
    evaluator: &Evaluator,
    prev: &CrackSet,
    coeffs: &[f64],
    cands: Vec<CrackSet>,
) -> Result<StepOutcome> {
    let prev_eval = evaluator.evaluate(prev)?;
    let mut scored = vec![(prev.clone(), evaluator.energy_of(&prev_eval, coeffs))];
    let mut evals = vec![prev_eval];
    let mut skipped = Vec::new();
    for (k, r) in cands.iter().zip(evaluator.evaluate_all(&cands)) {
        match r {
            Ok(e) => {
                scored.push((k.clone(), evaluator.energy_of(&e, coeffs)));
                evals.push(e);
            }
            Err(err) => skipped.push(format!("{} edges: {err}", k.len())),
        }
    }
    let i = select_minimizer(&scored);
    Ok(StepOutcome {
        crack: scored[i].0.clone(),
        energy: scored[i].1,
        eval: evals[i].clone(),
        candidates: scored.len(),
        skipped,
    })
}

/// Minimize `E(g, ·)` over the candidates the policy generates from `prev`
/// (always including `prev`), for the datum with coefficients `coeffs`.
pub fn incremental_step(
    evaluator: &Evaluator,
    prev: &CrackSet,
    coeffs: &[f64],
    policy: &CandidatePolicy,
) -> Result<StepOutcome> {
    let cands = generate_candidates(prev, policy)?;
    choose(evaluator, prev, coeffs, cands)
}

/// Exact minimizer over all `prev ∪ S`, `S ⊆ pool`, with at most `m` components.
pub fn brute_force_step(
    evaluator: &Evaluator,
    prev: &CrackSet,
    coeffs: &[f64],
    pool: &[Edge],
    m: usize,
) -> Result<StepOutcome> {
    if pool.len() > POOL_LIMIT {
        return Err(FractureError::PoolTooLarge {
            size: pool.len(),
            limit: POOL_LIMIT,
        });
    }
    let mut free: Vec<Edge> = pool
        .iter()
        .copied()
        .filter(|e| !prev.contains_edge(e))
        .collect();
    free.sort_unstable();
    free.dedup();
    let mut leaves = Vec::new();
    let mut current = prev.clone();
    include_exclude(&free, &mut current, m, &mut leaves)?;
    leaves.retain(|k| k.len() > prev.len());
    choose(evaluator, prev, coeffs, leaves)
}

fn include_exclude(
    rest: &[Edge],
    current: &mut CrackSet,
    m: usize,
    leaves: &mut Vec<CrackSet>,
) -> Result<()> {
    let Some((&e, tail)) = rest.split_first() else {
        if current.component_count() <= m {
            leaves.push(current.clone());
        }
        return Ok(());
    };
    include_exclude(tail, current, m, leaves)?;
    current.insert(e)?;
    include_exclude(tail, current, m, leaves)?;
    current.remove(&e);
    Ok(())
}
