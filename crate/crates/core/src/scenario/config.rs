use crate::compact_sets::{CrackSet, Edge, LatticeSpec};
use crate::energy::EnergyParams;
use crate::error::{FractureError, Result};
use crate::evolution::{BoundaryProgram, CandidatePolicy, Evaluator, PolicyMode};
use crate::geometry::Point;
use crate::slit_mesh::{DomainSpec, MeshParams};
use serde::{Deserialize, Serialize};

/// Straight run `[[x0, y0], [x1, y1]]` in world coordinates.
pub type Run = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub mode: PolicyMode,
    /// Edges added per step; defaults to the pool size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default = "yes")]
    pub nucleation: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<Run>>,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

/// On-disk scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub lattice_spacing: f64,
    #[serde(default)]
    pub initial_crack: Vec<Run>,
    #[serde(default = "one")]
    pub max_components: usize,
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub sample_times: Vec<f64>,
    pub domain: DomainSpec,
    pub mesh: MeshParams,
    #[serde(default)]
    pub energy: EnergyParams,
    pub program: BoundaryProgram,
    pub policy: PolicyConfig,
}

const SNAP: f64 = 1e-9;

fn runs_to_crack(lattice: LatticeSpec, runs: &[Run], field: &str) -> Result<CrackSet> {
    let mut k = CrackSet::empty(lattice);
    for (i, [p, q]) in runs.iter().enumerate() {
        let run = (Point::new(p[0], p[1]), Point::new(q[0], q[1]));
        let piece = CrackSet::from_runs(lattice, &[run], SNAP * lattice.spacing)
            .map_err(|e| FractureError::config(format!("{field}[{i}]"), e.to_string()))?;
        k = k.with_edges(piece.edges().copied())?;
    }
    Ok(k)
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "config".into());
            FractureError::config(field, e.message().trim())
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FractureError::config("config", e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Check every field and resolve geometry onto the lattice.
    pub fn build(&self) -> Result<Scenario> {
        self.domain.validate()?;
        let lattice = LatticeSpec::covering(self.domain.rect, self.lattice_spacing)
            .map_err(|e| FractureError::config("lattice_spacing", e.to_string()))?;
        if !(self.mesh.h > 0.0 && self.mesh.h.is_finite()) {
            return Err(FractureError::config("mesh.h", "must be positive"));
        }
        for (i, b) in self.mesh.refinement_boxes.iter().enumerate() {
            if b.factor == 0 {
                return Err(FractureError::config(
                    format!("mesh.refinement_boxes[{i}].factor"),
                    "must be at least 1",
                ));
            }
        }
        if !(self.energy.mu > 0.0 && self.energy.k > 0.0) {
            return Err(FractureError::config("energy", "mu and k must be positive"));
        }
        self.program.validate()?;
        if self.max_components == 0 {
            return Err(FractureError::config(
                "max_components",
                "must be at least 1",
            ));
        }
        let k0 = runs_to_crack(lattice, &self.initial_crack, "initial_crack")?;
        if k0.component_count() > self.max_components {
            return Err(FractureError::config(
                "initial_crack",
                format!(
                    "{} components exceed max_components = {}",
                    k0.component_count(),
                    self.max_components
                ),
            ));
        }
        if self.deltas.is_empty() {
            return Err(FractureError::config(
                "deltas",
                "at least one time step is required",
            ));
        }
        for (i, &d) in self.deltas.iter().enumerate() {
            if !(d > 0.0 && d <= self.program.t_end) {
                return Err(FractureError::config(
                    format!("deltas[{i}]"),
                    "must lie in (0, T]",
                ));
            }
            if i > 0 && d >= self.deltas[i - 1] {
                return Err(FractureError::config(
                    format!("deltas[{i}]"),
                    "time steps must decrease",
                ));
            }
        }
        for (i, &t) in self.sample_times.iter().enumerate() {
            if !(0.0..=self.program.t_end).contains(&t) {
                return Err(FractureError::config(
                    format!("sample_times[{i}]"),
                    "must lie in [0, T]",
                ));
            }
        }
        let pool: Option<Vec<Edge>> = match &self.policy.pool {
            Some(runs) => Some(
                runs_to_crack(lattice, runs, "policy.pool")?
                    .edges()
                    .copied()
                    .collect(),
            ),
            None => None,
        };
        if self.policy.mode == PolicyMode::PoolEnumeration && pool.is_none() {
            return Err(FractureError::config(
                "policy.pool",
                "pool-enumeration needs an edge pool",
            ));
        }
        let budget = match (self.policy.budget, &pool) {
            (Some(b), _) => b,
            (None, Some(p)) => p.len(),
            (None, None) => {
                return Err(FractureError::config(
                    "policy.budget",
                    "required when no pool is given",
                ))
            }
        };
        if budget == 0 {
            return Err(FractureError::config("policy.budget", "must be at least 1"));
        }
        let policy = CandidatePolicy {
            mode: self.policy.mode,
            budget,
            max_components: self.max_components,
            pool,
            nucleation: self.policy.nucleation,
        };
        Ok(Scenario {
            config: self.clone(),
            lattice,
            k0,
            policy,
        })
    }
}

/// A validated scenario with its geometry on the lattice.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub lattice: LatticeSpec,
    pub k0: CrackSet,
    pub policy: CandidatePolicy,
}

impl Scenario {
    pub fn evaluator(&self) -> Evaluator {
        self.evaluator_with(self.config.mesh.clone())
    }

    pub fn evaluator_with(&self, mesh: MeshParams) -> Evaluator {
        let c = &self.config;
        Evaluator::new(c.domain.clone(), mesh, c.energy, c.program.profiles())
    }

    /// Pool edges, empty for unrestricted tip growth.
    pub fn pool(&self) -> &[Edge] {
        self.policy.pool.as_deref().unwrap_or(&[])
    }

    pub fn sample_times(&self) -> Vec<f64> {
        if !self.config.sample_times.is_empty() {
            return self.config.sample_times.clone();
        }
        let t = self.config.program.t_end;
        (1..16).map(|i| t * i as f64 / 16.0).collect()
    }
}

/// Bundled configurations, by name.
pub const BUNDLED: [(&str, &str); 3] = [
    ("midline", include_str!("../../../../configs/midline.toml")),
    (
        "zero_load",
        include_str!("../../../../configs/zero_load.toml"),
    ),
    (
        "tip_growth",
        include_str!("../../../../configs/tip_growth.toml"),
    ),
];

pub fn bundled(name: &str) -> Result<ScenarioConfig> {
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        FractureError::InvalidInput(format!("no bundled scenario named `{name}`"))
    })?;
    ScenarioConfig::from_toml(text)
}
