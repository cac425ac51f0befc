//! Conforming triangulations of the cracked domain `Ω \ K`.
//!
//! The base mesh is a union-jack split of an `h`-square grid. Refinement
//! boxes and crack conformity are handled by newest-vertex bisection, so
//! every crack becomes a union of mesh edges no matter how the crack
//! lattice relates to `h`. Nodes on the crack are then duplicated, one
//! copy per side, by grouping the triangles around each crack node into
//! fans that do not cross crack edges.

mod domain;
mod export;
mod refine;
mod slit;
mod validate;

pub use domain::{BoundaryInterval, DomainSpec, Side};
pub use export::write_mesh;
pub use validate::{validate_mesh, CheckResult, MeshReport};

use crate::compact_sets::CrackSet;
use crate::error::{FractureError, Result};
use crate::geometry::{Point, Rect, Segment};
use refine::Refiner;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Local refinement: element size inside `rect` is `h / factor`
/// (factor rounded up to a power of two).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementBox {
    pub rect: Rect,
    pub factor: u32,
}

/// Nested boxes around every crack tip. The innermost box has half-width
/// `radius * h / 2^(levels-1)` and refinement `factor`; each outer level
/// doubles the half-width and halves the factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipRefinement {
    pub factor: u32,
    pub levels: u32,
    pub radius: f64,
}

impl Default for TipRefinement {
    fn default() -> Self {
        Self {
            factor: 4,
            levels: 2,
            radius: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshParams {
    pub h: f64,
    #[serde(default)]
    pub refinement_boxes: Vec<RefinementBox>,
    #[serde(default)]
    pub tip_refinement: Option<TipRefinement>,
    #[serde(default = "default_min_angle")]
    pub min_angle_deg: f64,
    /// Bisection depth beyond which crack conformity is declared impossible.
    #[serde(default = "default_max_level")]
    pub max_level: u32,
}

fn default_min_angle() -> f64 {
    30.0
}

fn default_max_level() -> u32 {
    24
}

impl MeshParams {
    pub fn uniform(h: f64) -> Self {
        Self {
            h,
            refinement_boxes: Vec::new(),
            tip_refinement: None,
            min_angle_deg: default_min_angle(),
            max_level: default_max_level(),
        }
    }

    pub fn with_box(mut self, rect: Rect, factor: u32) -> Self {
        self.refinement_boxes.push(RefinementBox { rect, factor });
        self
    }

    pub fn with_tip_refinement(mut self, tips: TipRefinement) -> Self {
        self.tip_refinement = Some(tips);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrackSide {
    Plus,
    Minus,
    /// Junctions and other nodes where the two sides are not defined.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
    /// Traction-free crack face; `side` relative to the crack normal.
    CrackFace(CrackSide),
}

/// Edge on the boundary of `Ω \ K`, oriented counter-clockwise with
/// respect to its triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub triangle: usize,
    pub tag: BoundaryTag,
}

/// Copies of one geometric crack node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitNode {
    pub geo: usize,
    pub copies: Vec<usize>,
    /// Copy on the side the crack normal points to, when the node has two sides.
    pub plus: Option<usize>,
    pub minus: Option<usize>,
    /// Number of crack mesh edges at the node.
    pub crack_degree: usize,
    pub on_outer_boundary: bool,
}

impl SlitNode {
    pub fn is_tip(&self) -> bool {
        self.crack_degree == 1 && !self.on_outer_boundary
    }
}

/// Triangulation of `Ω \ K`. Slit nodes are the finite-element degrees of
/// freedom; geometric nodes are the underlying unslit vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlitMesh {
    pub domain: DomainSpec,
    pub h: f64,
    pub min_angle_deg: f64,
    pub nodes: Vec<Point>,
    pub geo_of: Vec<usize>,
    pub geo_nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub geo_triangles: Vec<[usize; 3]>,
    pub slit_nodes: Vec<SlitNode>,
    /// Geometric node pairs of mesh edges lying on the crack.
    pub crack_edges: Vec<[usize; 2]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub dirichlet: Vec<bool>,
    pub triangle_component: Vec<usize>,
    pub component_count: usize,
    /// Crack segments the mesh was built for, in world coordinates.
    pub crack_segments: Vec<Segment>,
}

impl SlitMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * crate::geometry::orient2d(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangle_count()).map(|t| self.area(t)).sum()
    }

    /// Mesh component of every slit node.
    pub fn node_component(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.nodes.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                comp[v] = self.triangle_component[t];
            }
        }
        comp
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| triangle_min_angle(self.nodes[a], self.nodes[b], self.nodes[c]))
            .fold(180.0, f64::min)
    }

    pub fn slit_node(&self, geo: usize) -> Option<&SlitNode> {
        self.slit_nodes
            .binary_search_by_key(&geo, |s| s.geo)
            .ok()
            .map(|i| &self.slit_nodes[i])
    }

    /// Whether the geometric node lies on the crack.
    pub fn is_crack_geo(&self, geo: usize) -> bool {
        self.slit_node(geo).is_some()
    }

    pub fn geometric_tolerance(&self) -> f64 {
        1e-9 * self.h
    }

    /// The same triangulation without node duplication, as a mesh of `Ω`.
    pub fn unslit(&self) -> SlitMesh {
        let tol = self.geometric_tolerance();
        let mut dirichlet = vec![false; self.geo_nodes.len()];
        let mut boundary_edges = Vec::new();
        for e in &self.boundary_edges {
            let nodes = [self.geo_of[e.nodes[0]], self.geo_of[e.nodes[1]]];
            let mid = self.geo_nodes[nodes[0]].midpoint(self.geo_nodes[nodes[1]]);
            let tag = match e.tag {
                BoundaryTag::CrackFace(_) if !self.domain.on_boundary(mid, tol) => continue,
                BoundaryTag::CrackFace(_) if self.domain.is_dirichlet(mid, tol) => {
                    BoundaryTag::Dirichlet
                }
                BoundaryTag::CrackFace(_) => BoundaryTag::Neumann,
                tag => tag,
            };
            if tag == BoundaryTag::Dirichlet {
                dirichlet[nodes[0]] = true;
                dirichlet[nodes[1]] = true;
            }
            boundary_edges.push(BoundaryEdge {
                nodes,
                triangle: e.triangle,
                tag,
            });
        }
        SlitMesh {
            domain: self.domain.clone(),
            h: self.h,
            min_angle_deg: self.min_angle_deg,
            nodes: self.geo_nodes.clone(),
            geo_of: (0..self.geo_nodes.len()).collect(),
            geo_nodes: self.geo_nodes.clone(),
            triangles: self.geo_triangles.clone(),
            geo_triangles: self.geo_triangles.clone(),
            slit_nodes: Vec::new(),
            crack_edges: Vec::new(),
            boundary_edges,
            dirichlet,
            triangle_component: vec![0; self.geo_triangles.len()],
            component_count: 1,
            crack_segments: Vec::new(),
        }
    }
}

pub(crate) fn triangle_min_angle(a: Point, b: Point, c: Point) -> f64 {
    let angle = |p: Point, q: Point, r: Point| {
        let (u, v) = (q - p, r - p);
        u.cross(v).abs().atan2(u.dot(v)).to_degrees()
    };
    angle(a, b, c).min(angle(b, c, a)).min(angle(c, a, b))
}

/// Triangulate `domain \ crack` with nominal element size `params.h`.
pub fn build_mesh(domain: &DomainSpec, crack: &CrackSet, params: &MeshParams) -> Result<SlitMesh> {
    domain.validate()?;
    let rect = domain.rect;
    let h = params.h;
    if !(h > 0.0 && h.is_finite()) {
        return Err(FractureError::InvalidInput(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    let (fx, fy) = (rect.width() / h, rect.height() / h);
    let (nx, ny) = (fx.round(), fy.round());
    if (fx - nx).abs() > 1e-9 * fx || (fy - ny).abs() > 1e-9 * fy || nx < 1.0 || ny < 1.0 {
        return Err(FractureError::MeshFailure(format!(
            "h = {h} does not divide the {} x {} domain",
            rect.width(),
            rect.height()
        )));
    }
    let (nx, ny) = (nx as usize, ny as usize);
    let tol = 1e-9 * h;

    let segments = crack.segments();
    for s in &segments {
        if !rect.contains(s.a, tol) || !rect.contains(s.b, tol) {
            return Err(FractureError::CrackOffLattice(format!(
                "crack segment {:?} -> {:?} leaves the domain",
                s.a, s.b
            )));
        }
    }

    // cells whose diagonal is itself a crack edge get that diagonal
    let origin = Point::new(rect.x0, rect.y0);
    let mut forced: HashMap<(usize, usize), bool> = HashMap::new();
    for s in &segments {
        let d = s.b - s.a;
        if ((d.x.abs() - h).abs() <= tol) && ((d.y.abs() - h).abs() <= tol) {
            let lo = Point::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y));
            let fi = (lo.x - origin.x) / h;
            let fj = (lo.y - origin.y) / h;
            if (fi - fi.round()).abs() < 1e-9 && (fj - fj.round()).abs() < 1e-9 {
                let anti = d.x * d.y < 0.0;
                let cell = (fi.round() as usize, fj.round() as usize);
                if forced.insert(cell, anti).is_some_and(|prev| prev != anti) {
                    // crossing diagonals: leave it to conformity refinement
                    forced.insert(cell, false);
                }
            }
        }
    }
    let mut refiner = Refiner::union_jack(origin, h, nx, ny, |i, j| {
        forced.get(&(i, j)).copied().unwrap_or((i + j) % 2 == 1)
    });

    let mut boxes = params.refinement_boxes.clone();
    if let Some(tips) = params.tip_refinement {
        boxes.extend(tip_boxes(crack, domain, h, &tips));
    }
    for b in &boxes {
        refine_box(&mut refiner, b, params.max_level)?;
    }

    let buckets = CrackBuckets::new(&segments, origin, h, nx, ny, tol);
    conform_to_crack(&mut refiner, &buckets, domain, params.max_level, tol)?;

    let mesh = slit::assemble(
        refiner,
        domain.clone(),
        h,
        params.min_angle_deg,
        &buckets,
        segments,
        tol,
    )?;
    let min_angle = mesh.min_angle();
    if min_angle < params.min_angle_deg {
        return Err(FractureError::MeshFailure(format!(
            "minimum angle {min_angle:.2} deg is below the floor {:.2} deg",
            params.min_angle_deg
        )));
    }
    Ok(mesh)
}

fn tip_boxes(
    crack: &CrackSet,
    domain: &DomainSpec,
    h: f64,
    tips: &TipRefinement,
) -> Vec<RefinementBox> {
    let lattice = crack.lattice();
    let mut out = Vec::new();
    for n in crack.endpoints() {
        let p = lattice.position(n);
        if domain.on_boundary(p, 1e-9 * h) {
            continue;
        }
        for level in 1..=tips.levels.max(1) {
            let inward = tips.levels.max(1) - level;
            let factor = (tips.factor >> inward).max(1);
            let half = tips.radius * h * (1u64 << inward) as f64
                / (1u64 << (tips.levels.max(1) - 1)) as f64;
            out.push(RefinementBox {
                rect: Rect::around(p, half),
                factor,
            });
        }
    }
    out
}

fn refine_box(r: &mut Refiner, b: &RefinementBox, max_level: u32) -> Result<()> {
    if b.factor <= 1 {
        return Ok(());
    }
    let target = 2 * (b.factor as f64).log2().ceil() as u32;
    if target > max_level {
        return Err(FractureError::MeshFailure(format!(
            "refinement factor {} exceeds the bisection depth limit {max_level}",
            b.factor
        )));
    }
    loop {
        let marked: Vec<usize> = r
            .alive_indices()
            .into_iter()
            .filter(|&t| r.tris[t].level < target && triangle_bbox(&r.corners(t)).overlaps(&b.rect))
            .collect();
        if marked.is_empty() {
            return Ok(());
        }
        r.refine(&marked);
    }
}

fn triangle_bbox(c: &[Point; 3]) -> Rect {
    Rect::new(
        c[0].x.min(c[1].x).min(c[2].x),
        c[0].x.max(c[1].x).max(c[2].x),
        c[0].y.min(c[1].y).min(c[2].y),
        c[0].y.max(c[1].y).max(c[2].y),
    )
}

/// Crack segments bucketed by base grid cell.
pub(crate) struct CrackBuckets {
    pub segments: Vec<Segment>,
    cells: Vec<Vec<usize>>,
}

impl CrackBuckets {
    fn new(segments: &[Segment], origin: Point, h: f64, nx: usize, ny: usize, tol: f64) -> Self {
        let mut cells = vec![Vec::new(); nx * ny];
        for (k, s) in segments.iter().enumerate() {
            let lo = |v: f64, o: f64, n: usize| {
                (((v - tol - o) / h).floor().max(0.0) as usize).min(n - 1)
            };
            let hi = |v: f64, o: f64, n: usize| {
                (((v + tol - o) / h).floor().max(0.0) as usize).min(n - 1)
            };
            let (i0, i1) = (
                lo(s.a.x.min(s.b.x), origin.x, nx),
                hi(s.a.x.max(s.b.x), origin.x, nx),
            );
            let (j0, j1) = (
                lo(s.a.y.min(s.b.y), origin.y, ny),
                hi(s.a.y.max(s.b.y), origin.y, ny),
            );
            for j in j0..=j1 {
                for i in i0..=i1 {
                    cells[j * nx + i].push(k);
                }
            }
        }
        Self {
            segments: segments.to_vec(),
            cells,
        }
    }

    pub fn in_cell(&self, cell: usize) -> impl Iterator<Item = &Segment> + '_ {
        self.cells[cell].iter().map(move |&k| &self.segments[k])
    }
}

/// Fraction of the mesh edge `p-q` covered by collinear crack segments.
pub(crate) fn crack_coverage<'a>(
    p: Point,
    q: Point,
    segs: impl Iterator<Item = &'a Segment>,
    tol: f64,
) -> f64 {
    let d = q - p;
    let len2 = d.norm_sq();
    let len = len2.sqrt();
    let mut covered = 0.0;
    for s in segs {
        if d.cross(s.a - p).abs() > tol * len || d.cross(s.b - p).abs() > tol * len {
            continue;
        }
        let ua = (s.a - p).dot(d) / len2;
        let ub = (s.b - p).dot(d) / len2;
        let lo = ua.min(ub).max(0.0);
        let hi = ua.max(ub).min(1.0);
        if hi > lo {
            covered += hi - lo;
        }
    }
    covered
}

/// Whether the segment passes through the open triangle (CCW corners).
pub(crate) fn crosses_interior(s: &Segment, c: &[Point; 3], tol: f64) -> bool {
    let d = s.b - s.a;
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for k in 0..3 {
        let (p, q) = (c[k], c[(k + 1) % 3]);
        let n = (q - p).rot90();
        let num = n.dot(s.a - p);
        let den = n.dot(d);
        if den == 0.0 {
            if num < 0.0 {
                return false;
            }
        } else if den > 0.0 {
            t0 = t0.max(-num / den);
        } else {
            t1 = t1.min(-num / den);
        }
    }
    if (t1 - t0) * d.norm() <= tol {
        return false;
    }
    let m = s.at(0.5 * (t0 + t1));
    (0..3).all(|k| {
        let (p, q) = (c[k], c[(k + 1) % 3]);
        (q - p).cross(m - p) / (q - p).norm() > tol
    })
}

fn conform_to_crack(
    r: &mut Refiner,
    buckets: &CrackBuckets,
    domain: &DomainSpec,
    max_level: u32,
    tol: f64,
) -> Result<()> {
    if buckets.segments.is_empty() {
        return Ok(());
    }
    loop {
        let mut marked = Vec::new();
        for t in r.alive_indices() {
            let c = r.corners(t);
            let cell = r.tris[t].cell;
            let crossed = buckets.in_cell(cell).any(|s| crosses_interior(s, &c, tol));
            let partial = (0..3).any(|k| {
                let cov = crack_coverage(c[k], c[(k + 1) % 3], buckets.in_cell(cell), tol);
                cov > 1e-9 && cov < 1.0 - 1e-9
            });
            if crossed || partial {
                marked.push(t);
            }
        }
        if marked.is_empty() {
            // a crack edge with two tips carries no interior node, so the
            // P1 space could not open it
            marked = tip_to_tip_edges(r, buckets, domain, tol);
            if marked.is_empty() {
                return Ok(());
            }
        }
        if marked.iter().any(|&t| r.tris[t].level >= max_level) {
            return Err(FractureError::MeshFailure(format!(
                "crack is not resolvable within {max_level} bisection levels (is the crack lattice aligned with h?)"
            )));
        }
        r.refine(&marked);
    }
}

fn tip_to_tip_edges(
    r: &Refiner,
    buckets: &CrackBuckets,
    domain: &DomainSpec,
    tol: f64,
) -> Vec<usize> {
    let mut degree: HashMap<usize, usize> = HashMap::new();
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for t in r.alive_indices() {
        let v = r.tris[t].v;
        let cell = r.tris[t].cell;
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            if crack_coverage(r.pts[a], r.pts[b], buckets.in_cell(cell), tol) >= 1.0 - 1e-9 {
                edges.entry(key).or_default().push(t);
            }
        }
    }
    for &(a, b) in edges.keys() {
        *degree.entry(a).or_insert(0) += 1;
        *degree.entry(b).or_insert(0) += 1;
    }
    let is_tip = |n: usize| degree[&n] == 1 && !domain.on_boundary(r.pts[n], tol);
    let mut marked: Vec<usize> = edges
        .iter()
        .filter(|(&(a, b), _)| is_tip(a) && is_tip(b))
        .flat_map(|(_, ts)| ts.iter().copied())
        .collect();
    marked.sort_unstable();
    marked.dedup();
    marked
}

#[cfg(test)]
mod tests;
