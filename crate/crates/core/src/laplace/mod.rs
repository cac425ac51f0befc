//! P1 finite elements for the mixed Dirichlet/Neumann Laplace problem on a
//! slit mesh: stiffness assembly, constrained solves, gradients, fluxes,
//! crack-face traces and the discrete harmonic conjugate.

mod conjugate;
mod flux;
mod locate;
pub mod sparse;

pub use conjugate::{harmonic_conjugate, Conjugate};
pub use flux::{boundary_flux, trace_jump, FluxSample, FluxSegment, TraceJump};
pub use locate::PointLocator;
pub use sparse::{CsrMatrix, SolveStats};

use crate::error::Result;
use crate::geometry::Point;
use crate::slit_mesh::{CrackSide, SlitMesh};
use std::io::{self, Write};
use std::sync::Arc;

/// Relative residual at which the linear solves stop.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Boundary datum `g`, defined on all of `Ω`.
pub trait DirichletDatum: Sync {
    fn value(&self, p: Point) -> f64;
}

impl<F: Fn(Point) -> f64 + Sync> DirichletDatum for F {
    fn value(&self, p: Point) -> f64 {
        self(p)
    }
}

/// Gradients of the three barycentric coordinates of a CCW triangle.
pub fn shape_gradients(a: Point, b: Point, c: Point) -> ([Point; 3], f64) {
    let twice = crate::geometry::orient2d(a, b, c);
    let g = |p: Point, q: Point| Point::new(p.y - q.y, q.x - p.x) * (1.0 / twice);
    ([g(b, c), g(c, a), g(a, b)], 0.5 * twice)
}

/// One value per slit node.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub mesh: Arc<SlitMesh>,
    pub values: Vec<f64>,
}

/// Piecewise-constant gradient, one vector per triangle.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub mesh: Arc<SlitMesh>,
    pub grads: Vec<Point>,
}

impl GradientField {
    /// `(∇u | ∇v)` in `L²(Ω \ K)`.
    pub fn inner(&self, other: &GradientField) -> f64 {
        assert!(
            Arc::ptr_eq(&self.mesh, &other.mesh),
            "gradients live on different meshes"
        );
        self.grads
            .iter()
            .zip(&other.grads)
            .enumerate()
            .map(|(t, (a, b))| self.mesh.area(t) * a.dot(*b))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }
}

impl ScalarField {
    pub fn constant(mesh: Arc<SlitMesh>, c: f64) -> Self {
        let n = mesh.node_count();
        Self {
            mesh,
            values: vec![c; n],
        }
    }

    /// Nodal interpolant `Π_h g`.
    pub fn interpolate(mesh: Arc<SlitMesh>, g: &dyn DirichletDatum) -> Self {
        let values = mesh.nodes.iter().map(|&p| g.value(p)).collect();
        Self { mesh, values }
    }

    pub fn gradient(&self) -> GradientField {
        let m = &self.mesh;
        let grads = m
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                let (dphi, _) = shape_gradients(m.nodes[a], m.nodes[b], m.nodes[c]);
                dphi[0] * self.values[a] + dphi[1] * self.values[b] + dphi[2] * self.values[c]
            })
            .collect();
        GradientField {
            mesh: m.clone(),
            grads,
        }
    }

    /// Value at `p` inside triangle `t`.
    pub fn value_in(&self, t: usize, p: Point) -> f64 {
        let [a, b, c] = self.mesh.triangles[t];
        let (pa, pb, pc) = (self.mesh.nodes[a], self.mesh.nodes[b], self.mesh.nodes[c]);
        let (dphi, _) = shape_gradients(pa, pb, pc);
        let la = 1.0 + dphi[0].dot(p - pa);
        let lb = 1.0 + dphi[1].dot(p - pb);
        let lc = 1.0 - la - lb;
        la * self.values[a] + lb * self.values[b] + lc * self.values[c]
    }

    /// `‖u_h − f‖_{L²}` with a degree-5 rule per triangle.
    pub fn l2_error(&self, f: &dyn Fn(Point) -> f64) -> f64 {
        let m = &self.mesh;
        let mut sum = 0.0;
        for (t, &[a, b, c]) in m.triangles.iter().enumerate() {
            let (pa, pb, pc) = (m.nodes[a], m.nodes[b], m.nodes[c]);
            let area = m.area(t);
            for &(w, l) in DUNAVANT5.iter() {
                let p = pa * l[0] + pb * l[1] + pc * l[2];
                let uh = l[0] * self.values[a] + l[1] * self.values[b] + l[2] * self.values[c];
                sum += w * area * (uh - f(p)).powi(2);
            }
        }
        sum.sqrt()
    }

    /// `‖u − v‖_{L²}` for two fields on the same mesh (exact P1 mass matrix).
    pub fn l2_distance(&self, other: &ScalarField) -> f64 {
        assert!(
            Arc::ptr_eq(&self.mesh, &other.mesh),
            "fields live on different meshes"
        );
        let m = &self.mesh;
        let mut sum = 0.0;
        for (t, tri) in m.triangles.iter().enumerate() {
            let e = tri.map(|v| self.values[v] - other.values[v]);
            let s: f64 = e.iter().sum();
            let sq: f64 = e.iter().map(|x| x * x).sum();
            sum += m.area(t) / 12.0 * (sq + s * s);
        }
        sum.sqrt()
    }

    /// Area-weighted mean.
    pub fn mean(&self) -> f64 {
        let m = &self.mesh;
        let mut sum = 0.0;
        for (t, tri) in m.triangles.iter().enumerate() {
            sum += m.area(t) * tri.iter().map(|&v| self.values[v]).sum::<f64>() / 3.0;
        }
        sum / m.total_area()
    }

    /// CSV with header `node,x,y,side,value`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let tags = side_tags(&self.mesh);
        writeln!(w, "node,x,y,side,value")?;
        for (i, p) in self.mesh.nodes.iter().enumerate() {
            writeln!(w, "{i},{},{},{},{}", p.x, p.y, tags[i], self.values[i])?;
        }
        Ok(())
    }
}

impl GradientField {
    /// CSV with header `triangle,cx,cy,gx,gy`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "triangle,cx,cy,gx,gy")?;
        for (t, &[a, b, c]) in self.mesh.triangles.iter().enumerate() {
            let n = &self.mesh.nodes;
            let cen = (n[a] + n[b] + n[c]) * (1.0 / 3.0);
            let g = self.grads[t];
            writeln!(w, "{t},{},{},{},{}", cen.x, cen.y, g.x, g.y)?;
        }
        Ok(())
    }
}

fn side_tags(mesh: &SlitMesh) -> Vec<&'static str> {
    let mut tags = vec!["bulk"; mesh.node_count()];
    for s in &mesh.slit_nodes {
        for &c in &s.copies {
            tags[c] = if s.is_tip() { "tip" } else { "crack" };
        }
        if let Some(p) = s.plus {
            tags[p] = "plus";
        }
        if let Some(m) = s.minus {
            tags[m] = "minus";
        }
    }
    tags
}

/// Degree-5 Dunavant rule: weights (summing to one) and barycentrics.
const DUNAVANT5: [(f64, [f64; 3]); 7] = {
    const A1: f64 = 0.059_715_871_789_770;
    const B1: f64 = 0.470_142_064_105_115;
    const A2: f64 = 0.797_426_985_353_087;
    const B2: f64 = 0.101_286_507_323_456;
    const W0: f64 = 0.225;
    const W1: f64 = 0.132_394_152_788_506;
    const W2: f64 = 0.125_939_180_544_827;
    [
        (W0, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
        (W1, [A1, B1, B1]),
        (W1, [B1, A1, B1]),
        (W1, [B1, B1, A1]),
        (W2, [A2, B2, B2]),
        (W2, [B2, A2, B2]),
        (W2, [B2, B2, A2]),
    ]
};

/// Stiffness matrix of a slit mesh with the Dirichlet/floating split
/// precomputed, so several data can be solved on one mesh.
#[derive(Debug, Clone)]
pub struct LaplaceSystem {
    pub mesh: Arc<SlitMesh>,
    /// Full stiffness over all slit nodes.
    pub stiffness: CsrMatrix,
    /// Reduced index of every free node, `None` for Dirichlet and floating nodes.
    free_index: Vec<Option<usize>>,
    free_nodes: Vec<usize>,
    reduced: CsrMatrix,
    /// Components without any Dirichlet node.
    pub floating: Vec<bool>,
}

impl LaplaceSystem {
    pub fn new(mesh: Arc<SlitMesh>) -> Self {
        let n = mesh.node_count();
        let mut triplets = Vec::with_capacity(9 * mesh.triangle_count());
        for tri in &mesh.triangles {
            let (dphi, area) =
                shape_gradients(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
            for i in 0..3 {
                for j in 0..3 {
                    triplets.push((tri[i], tri[j], area * dphi[i].dot(dphi[j])));
                }
            }
        }
        let stiffness = CsrMatrix::from_triplets(n, triplets);

        let comp = mesh.node_component();
        let mut anchored = vec![false; mesh.component_count];
        for (v, &d) in mesh.dirichlet.iter().enumerate() {
            if d {
                anchored[comp[v]] = true;
            }
        }
        let floating: Vec<bool> = anchored.iter().map(|a| !a).collect();
        let mut free_index = vec![None; n];
        let mut free_nodes = Vec::new();
        for v in 0..n {
            if !mesh.dirichlet[v] && !floating[comp[v]] {
                free_index[v] = Some(free_nodes.len());
                free_nodes.push(v);
            }
        }
        let mut reduced = Vec::new();
        for (r, &v) in free_nodes.iter().enumerate() {
            for (j, a) in stiffness.row(v) {
                if let Some(c) = free_index[j] {
                    reduced.push((r, c, a));
                }
            }
        }
        let reduced = CsrMatrix::from_triplets(free_nodes.len(), reduced);
        Self {
            mesh,
            stiffness,
            free_index,
            free_nodes,
            reduced,
            floating,
        }
    }

    /// Solve with nodal Dirichlet values; entries at free nodes serve as the
    /// initial guess. Floating components get the zero-mean constant, i.e. zero.
    pub fn solve_nodal(&self, data: &[f64]) -> Result<(ScalarField, SolveStats)> {
        let m = &self.mesh;
        let mut values = vec![0.0; m.node_count()];
        for v in 0..m.node_count() {
            if m.dirichlet[v] {
                values[v] = data[v];
            }
        }
        let mut rhs = vec![0.0; self.free_nodes.len()];
        for (r, &v) in self.free_nodes.iter().enumerate() {
            rhs[r] = -self
                .stiffness
                .row(v)
                .filter(|&(j, _)| m.dirichlet[j])
                .map(|(j, a)| a * values[j])
                .sum::<f64>();
        }
        let mut x: Vec<f64> = self.free_nodes.iter().map(|&v| data[v]).collect();
        let stats = sparse::pcg(
            &self.reduced,
            &rhs,
            &mut x,
            SOLVER_TOLERANCE,
            20 * rhs.len() + 1000,
        )?;
        for (r, &v) in self.free_nodes.iter().enumerate() {
            values[v] = x[r];
        }
        Ok((
            ScalarField {
                mesh: m.clone(),
                values,
            },
            stats,
        ))
    }

    pub fn solve(&self, g: &dyn DirichletDatum) -> Result<(ScalarField, SolveStats)> {
        let data: Vec<f64> = self.mesh.nodes.iter().map(|&p| g.value(p)).collect();
        self.solve_nodal(&data)
    }

    /// `∫∇u·∇v` through the stiffness matrix.
    pub fn energy_form(&self, u: &[f64], v: &[f64]) -> f64 {
        self.stiffness.bilinear(u, v)
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.free_index[v].is_some()
    }
}

/// Discrete minimizer of `∫|∇v|²` with `v = g` on the Dirichlet nodes.
pub fn solve_mixed(mesh: &Arc<SlitMesh>, g: &dyn DirichletDatum) -> Result<ScalarField> {
    LaplaceSystem::new(mesh.clone()).solve(g).map(|(u, _)| u)
}

/// `∫_{Ω\K} |∇u|²`, exact for P1.
pub fn dirichlet_energy(u: &ScalarField) -> f64 {
    u.gradient().norm_sq()
}

/// Which side of the crack a slit node sits on, if defined.
pub fn node_side(mesh: &SlitMesh, node: usize) -> Option<CrackSide> {
    let s = mesh.slit_node(mesh.geo_of[node])?;
    if s.plus == Some(node) {
        Some(CrackSide::Plus)
    } else if s.minus == Some(node) {
        Some(CrackSide::Minus)
    } else {
        Some(CrackSide::Undetermined)
    }
}

#[cfg(test)]
mod tests;
