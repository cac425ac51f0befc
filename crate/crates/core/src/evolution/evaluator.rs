use super::program::Profile;
use crate::compact_sets::{CrackSet, Edge};
use crate::energy::{breakdown, EnergyBreakdown, EnergyParams};
use crate::error::Result;
use crate::laplace::{DirichletDatum, LaplaceSystem, ScalarField};
use crate::slit_mesh::{build_mesh, BoundaryTag, DomainSpec, MeshParams, SlitMesh};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

type Matrix = Vec<Vec<f64>>;

/// Everything the energy of `Σ a_k G_k` on one crack depends on. The
/// problem is linear in the datum, so one solve per profile suffices.
#[derive(Debug)]
pub struct CrackEval {
    pub crack: CrackSet,
    pub mesh: Arc<SlitMesh>,
    /// Equilibrium field of each profile.
    pub fields: Vec<ScalarField>,
    /// `(∇u_k | ∇u_l)`
    pub gram: Matrix,
    /// `(∇u_k | ∇Π_h G_l)`
    pub pairing: Matrix,
    /// `(∇Π_h G_k | ∇Π_h G_l)`
    pub interpolant_gram: Matrix,
    /// `∫_{∂_D} ∂u_k/∂ν · G_l`, flux taken from the boundary triangles.
    pub flux_pairing: Matrix,
    pub length: f64,
    pub components: usize,
    pub solver_iterations: usize,
}

fn quadratic(m: &Matrix, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (k, row) in m.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            s += a[k] * v * b[l];
        }
    }
    s
}

impl CrackEval {
    /// `∫|∇u|²` for the datum with coefficients `a`.
    pub fn dirichlet_integral(&self, a: &[f64]) -> f64 {
        quadratic(&self.gram, a, a)
    }

    /// `(∇u_a | ∇Π_h g_b)`
    pub fn pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        quadratic(&self.pairing, a, b)
    }

    pub fn flux_pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        quadratic(&self.flux_pairing, a, b)
    }

    pub fn interpolant_integral(&self, a: &[f64]) -> f64 {
        quadratic(&self.interpolant_gram, a, a)
    }

    /// Equilibrium field for coefficients `a`.
    pub fn field(&self, a: &[f64]) -> ScalarField {
        let mut values = vec![0.0; self.mesh.node_count()];
        for (f, &c) in self.fields.iter().zip(a) {
            for (v, x) in values.iter_mut().zip(&f.values) {
                *v += c * x;
            }
        }
        ScalarField {
            mesh: self.mesh.clone(),
            values,
        }
    }
}

/// Solves and caches crack evaluations for a fixed domain, mesh recipe and
/// profile list. Safe to share between threads.
pub struct Evaluator {
    pub domain: DomainSpec,
    pub mesh: MeshParams,
    pub energy: EnergyParams,
    pub profiles: Vec<Profile>,
    cache: Mutex<HashMap<Vec<Edge>, Arc<CrackEval>>>,
}

impl Evaluator {
    pub fn new(
        domain: DomainSpec,
        mesh: MeshParams,
        energy: EnergyParams,
        profiles: Vec<Profile>,
    ) -> Self {
        Self {
            domain,
            mesh,
            energy,
            profiles,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    pub fn evaluate(&self, crack: &CrackSet) -> Result<Arc<CrackEval>> {
        let key: Vec<Edge> = crack.edges().copied().collect();
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let eval = Arc::new(self.compute(crack)?);
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(eval.clone());
        Ok(eval)
    }

    /// Evaluate independent cracks in parallel; order of results matches input.
    pub fn evaluate_all(&self, cracks: &[CrackSet]) -> Vec<Result<Arc<CrackEval>>> {
        cracks.par_iter().map(|k| self.evaluate(k)).collect()
    }

    pub fn energy_of(&self, eval: &CrackEval, a: &[f64]) -> EnergyBreakdown {
        breakdown(&self.energy, eval.dirichlet_integral(a), eval.length)
    }

    fn compute(&self, crack: &CrackSet) -> Result<CrackEval> {
        let mesh = Arc::new(build_mesh(&self.domain, crack, &self.mesh)?);
        let system = LaplaceSystem::new(mesh.clone());
        let mut fields = Vec::with_capacity(self.profiles.len());
        let mut iterations = 0;
        for p in &self.profiles {
            let (u, stats) = system.solve(p)?;
            iterations += stats.iterations;
            fields.push(u);
        }
        let grads: Vec<_> = fields.iter().map(|u| u.gradient()).collect();
        let interp: Vec<_> = self
            .profiles
            .iter()
            .map(|p| ScalarField::interpolate(mesh.clone(), p).gradient())
            .collect();
        let n = self.profiles.len();
        let table = |f: &dyn Fn(usize, usize) -> f64| -> Matrix {
            (0..n).map(|k| (0..n).map(|l| f(k, l)).collect()).collect()
        };
        let gram = table(&|k, l| grads[k].inner(&grads[l]));
        let pairing = table(&|k, l| grads[k].inner(&interp[l]));
        let interpolant_gram = table(&|k, l| interp[k].inner(&interp[l]));
        let flux_pairing = table(&|k, l| {
            mesh.boundary_edges
                .iter()
                .filter(|e| e.tag == BoundaryTag::Dirichlet)
                .map(|e| {
                    let (p, q) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
                    let d = q - p;
                    let normal = crate::geometry::Point::new(d.y, -d.x) * (1.0 / d.norm());
                    grads[k].grads[e.triangle].dot(normal) * edge_integral(&self.profiles[l], p, q)
                })
                .sum()
        });
        Ok(CrackEval {
            crack: crack.clone(),
            length: crack.length(),
            components: crack.component_count(),
            mesh,
            fields,
            gram,
            pairing,
            interpolant_gram,
            flux_pairing,
            solver_iterations: iterations,
        })
    }
}

/// Three-point Gauss–Legendre rule along an edge.
fn edge_integral(
    g: &dyn DirichletDatum,
    p: crate::geometry::Point,
    q: crate::geometry::Point,
) -> f64 {
    let r = (0.6f64).sqrt() / 2.0;
    let len = p.dist(q);
    let at = |s: f64| p + (q - p) * s;
    len * (5.0 * g.value(at(0.5 - r)) + 8.0 * g.value(at(0.5)) + 5.0 * g.value(at(0.5 + r))) / 18.0
}
