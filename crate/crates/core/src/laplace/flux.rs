use super::ScalarField;
use crate::error::{FractureError, Result};
use crate::geometry::{Point, Segment};
use crate::slit_mesh::{BoundaryTag, CrackSide};
use serde::Serialize;

/// Straight piece of `∂(Ω \ K)`: part of the outer boundary when `side`
/// is `None`, otherwise one face of the crack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSegment {
    pub a: Point,
    pub b: Point,
    pub side: Option<CrackSide>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FluxSample {
    /// Edge midpoint.
    pub point: Point,
    /// Arc-length position of the midpoint along the segment.
    pub s: f64,
    pub length: f64,
    pub normal: Point,
    /// `∂u/∂ν` from the adjacent triangle.
    pub flux: f64,
}

/// Normal flux on every mesh edge of the segment, ordered from `a` to `b`.
pub fn boundary_flux(u: &ScalarField, seg: &FluxSegment) -> Result<Vec<FluxSample>> {
    let mesh = &u.mesh;
    let tol = mesh.geometric_tolerance();
    let line = Segment::new(seg.a, seg.b);
    let grads = u.gradient();
    let mut out = Vec::new();
    for e in &mesh.boundary_edges {
        let wanted = match (seg.side, e.tag) {
            (None, BoundaryTag::Dirichlet | BoundaryTag::Neumann) => true,
            (Some(s), BoundaryTag::CrackFace(t)) => s == t,
            _ => false,
        };
        let (p, q) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
        if !wanted || line.dist_to_point(p) > tol || line.dist_to_point(q) > tol {
            continue;
        }
        let d = q - p;
        let length = d.norm();
        let normal = Point::new(d.y, -d.x) * (1.0 / length);
        let point = p.midpoint(q);
        out.push(FluxSample {
            point,
            s: (point - seg.a).dot(seg.b - seg.a) / line.length(),
            length,
            normal,
            flux: grads.grads[e.triangle].dot(normal),
        });
    }
    let covered: f64 = out.iter().map(|f| f.length).sum();
    if (covered - line.length()).abs() > 1e-9 * line.length().max(mesh.h) {
        return Err(FractureError::SegmentNotOnMesh(format!(
            "({}, {}) -> ({}, {}) is covered by boundary edges of total length {covered}",
            seg.a.x, seg.a.y, seg.b.x, seg.b.y
        )));
    }
    out.sort_by(|x, y| x.s.total_cmp(&y.s));
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceJump {
    pub geo: usize,
    pub point: Point,
    pub plus: f64,
    pub minus: f64,
}

/// `(u⁺, u⁻)` at every crack node with two well-defined sides, and
/// `u⁺ = u⁻` at tips.
pub fn trace_jump(u: &ScalarField) -> Vec<TraceJump> {
    let mesh = &u.mesh;
    mesh.slit_nodes
        .iter()
        .filter_map(|s| {
            let (plus, minus) = match (s.plus, s.minus) {
                (Some(p), Some(m)) => (u.values[p], u.values[m]),
                _ if s.copies.len() == 1 => (u.values[s.copies[0]], u.values[s.copies[0]]),
                _ => return None,
            };
            Some(TraceJump {
                geo: s.geo,
                point: mesh.geo_nodes[s.geo],
                plus,
                minus,
            })
        })
        .collect()
}
