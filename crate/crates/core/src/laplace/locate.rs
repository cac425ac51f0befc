use super::ScalarField;
use crate::geometry::{orient2d, Point};
use crate::slit_mesh::SlitMesh;

/// Bucket grid over the triangles of a mesh for point queries.
#[derive(Debug, Clone)]
pub struct PointLocator {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl PointLocator {
    pub fn new(mesh: &SlitMesh) -> Self {
        let r = mesh.domain.rect;
        let cell = mesh.h;
        let nx = ((r.width() / cell).ceil() as usize).max(1);
        let ny = ((r.height() / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let p = tri.map(|v| mesh.nodes[v]);
            let (xmin, xmax) = (
                p[0].x.min(p[1].x).min(p[2].x),
                p[0].x.max(p[1].x).max(p[2].x),
            );
            let (ymin, ymax) = (
                p[0].y.min(p[1].y).min(p[2].y),
                p[0].y.max(p[1].y).max(p[2].y),
            );
            for j in clamp((ymin - r.y0) / cell, ny)..=clamp((ymax - r.y0) / cell, ny) {
                for i in clamp((xmin - r.x0) / cell, nx)..=clamp((xmax - r.x0) / cell, nx) {
                    buckets[j * nx + i].push(t);
                }
            }
        }
        Self {
            x0: r.x0,
            y0: r.y0,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// A triangle containing `p` (closed), if any.
    pub fn locate(&self, mesh: &SlitMesh, p: Point) -> Option<usize> {
        let i = ((p.x - self.x0) / self.cell).floor();
        let j = ((p.y - self.y0) / self.cell).floor();
        if i < -1.0 || j < -1.0 {
            return None;
        }
        let i = (i.max(0.0) as usize).min(self.nx - 1);
        let j = (j.max(0.0) as usize).min(self.ny - 1);
        let tol = -1e-12 * mesh.h * mesh.h;
        self.buckets[j * self.nx + i].iter().copied().find(|&t| {
            let [a, b, c] = mesh.triangles[t].map(|v| mesh.nodes[v]);
            orient2d(a, b, p) >= tol && orient2d(b, c, p) >= tol && orient2d(c, a, p) >= tol
        })
    }

    pub fn value_at(&self, u: &ScalarField, p: Point) -> Option<f64> {
        self.locate(&u.mesh, p).map(|t| u.value_in(t, p))
    }
}
