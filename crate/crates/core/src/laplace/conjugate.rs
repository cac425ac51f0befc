use super::{shape_gradients, sparse, CsrMatrix, ScalarField, SOLVER_TOLERANCE};
use crate::error::Result;
use crate::geometry::Point;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Conjugate {
    /// Zero-mean potential on the unslit mesh.
    pub v: ScalarField,
    /// `‖∇v − R∇u‖²`.
    pub misfit: f64,
    /// `misfit / ‖∇u‖²`, zero when `∇u = 0`.
    pub relative_misfit: f64,
}

/// Least-squares potential `v` with `∇v ≈ R∇u`, `R(y₁, y₂) = (−y₂, y₁)`,
/// over continuous P1 functions on the unslit mesh.
pub fn harmonic_conjugate(u: &ScalarField) -> Result<Conjugate> {
    let slit = &u.mesh;
    let mesh = Arc::new(slit.unslit());
    let n = mesh.node_count();
    let target: Vec<Point> = u.gradient().grads.iter().map(|g| g.rot90()).collect();

    let mut triplets = Vec::with_capacity(9 * mesh.triangle_count());
    let mut rhs = vec![0.0; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let (dphi, area) =
            shape_gradients(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
        for i in 0..3 {
            rhs[tri[i]] += area * dphi[i].dot(target[t]);
            for j in 0..3 {
                triplets.push((tri[i], tri[j], area * dphi[i].dot(dphi[j])));
            }
        }
    }
    // the Neumann system is singular; keep the load orthogonal to constants
    let shift = rhs.iter().sum::<f64>() / n as f64;
    rhs.iter_mut().for_each(|r| *r -= shift);
    let a = CsrMatrix::from_triplets(n, triplets);
    let mut x = vec![0.0; n];
    sparse::pcg(&a, &rhs, &mut x, SOLVER_TOLERANCE, 20 * n + 1000)?;

    let mut v = ScalarField { mesh, values: x };
    let mean = v.mean();
    v.values.iter_mut().for_each(|x| *x -= mean);

    let grads = v.gradient().grads;
    let mut misfit = 0.0;
    let mut norm = 0.0;
    for (t, g) in grads.iter().enumerate() {
        let area = v.mesh.area(t);
        misfit += area * (*g - target[t]).norm_sq();
        norm += area * target[t].norm_sq();
    }
    Ok(Conjugate {
        v,
        misfit,
        relative_misfit: if norm > 0.0 { misfit / norm } else { 0.0 },
    })
}
