//! Crack sets: finite unions of lattice edges with Hausdorff-metric tools.
//!
//! A crack lives on an 8-connected lattice covering the closed domain.
//! Every crack edge joins two lattice nodes that are horizontal, vertical
//! or diagonal neighbours, so the admissible family is finite and every
//! set is a compact polyline with finite length.

mod components;
mod families;
mod golab;
mod hausdorff;

pub use components::{connected_components, ComponentLabeling};
pub use families::{growing_segment, oscillating_crack, packed_crack, straight_crack};
pub use golab::{golab_report, GolabReport};
pub use hausdorff::{
    directed_distance, hausdorff_distance, segment_distance, Dilation, SegmentSet,
};

use crate::error::{FractureError, Result};
use crate::geometry::{Point, Rect, Segment};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Regular square lattice covering a closed rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub origin: Point,
    pub spacing: f64,
    pub nx: u32,
    pub ny: u32,
}

impl LatticeSpec {
    pub fn new(origin: Point, spacing: f64, nx: u32, ny: u32) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(FractureError::InvalidInput(format!(
                "lattice spacing must be positive, got {spacing}"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(FractureError::InvalidInput(
                "lattice needs at least one cell per direction".into(),
            ));
        }
        Ok(Self {
            origin,
            spacing,
            nx,
            ny,
        })
    }

    /// Lattice whose node rows and columns cover `rect` exactly.
    pub fn covering(rect: Rect, spacing: f64) -> Result<Self> {
        let fx = rect.width() / spacing;
        let fy = rect.height() / spacing;
        let (nx, ny) = (fx.round(), fy.round());
        if (fx - nx).abs() > 1e-9 * fx.max(1.0) || (fy - ny).abs() > 1e-9 * fy.max(1.0) {
            return Err(FractureError::InvalidInput(format!(
                "spacing {spacing} does not divide the {}x{} rectangle",
                rect.width(),
                rect.height()
            )));
        }
        Self::new(Point::new(rect.x0, rect.y0), spacing, nx as u32, ny as u32)
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(
            self.origin.x,
            self.origin.x + self.nx as f64 * self.spacing,
            self.origin.y,
            self.origin.y + self.ny as f64 * self.spacing,
        )
    }

    pub fn diameter(&self) -> f64 {
        self.bounds().diameter()
    }

    pub fn position(&self, n: LatticeNode) -> Point {
        Point::new(
            self.origin.x + n.i as f64 * self.spacing,
            self.origin.y + n.j as f64 * self.spacing,
        )
    }

    pub fn contains_node(&self, n: LatticeNode) -> bool {
        n.i <= self.nx && n.j <= self.ny
    }

    /// Nearest lattice node and the distance to it.
    pub fn snap(&self, p: Point) -> Option<(LatticeNode, f64)> {
        let fi = ((p.x - self.origin.x) / self.spacing).round();
        let fj = ((p.y - self.origin.y) / self.spacing).round();
        if fi < 0.0 || fj < 0.0 || fi > self.nx as f64 || fj > self.ny as f64 {
            return None;
        }
        let n = LatticeNode::new(fi as u32, fj as u32);
        Some((n, self.position(n).dist(p)))
    }

    pub fn on_boundary(&self, n: LatticeNode) -> bool {
        n.i == 0 || n.j == 0 || n.i == self.nx || n.j == self.ny
    }

    /// Decompose the straight run from `a` to `b` into unit lattice edges.
    /// The run must be horizontal, vertical or at 45 degrees.
    pub fn run_edges(&self, a: LatticeNode, b: LatticeNode) -> Result<Vec<Edge>> {
        let di = b.i as i64 - a.i as i64;
        let dj = b.j as i64 - a.j as i64;
        let steps = di.abs().max(dj.abs());
        if steps == 0 {
            return Ok(Vec::new());
        }
        if !(di == 0 || dj == 0 || di.abs() == dj.abs()) {
            return Err(FractureError::CrackOffLattice(format!(
                "run {a:?} -> {b:?} is neither axis-aligned nor diagonal"
            )));
        }
        let (si, sj) = (di.signum(), dj.signum());
        let mut out = Vec::with_capacity(steps as usize);
        let mut cur = a;
        for _ in 0..steps {
            let next = LatticeNode::new((cur.i as i64 + si) as u32, (cur.j as i64 + sj) as u32);
            out.push(Edge::new(cur, next)?);
            cur = next;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeNode {
    pub i: u32,
    pub j: u32,
}

impl LatticeNode {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }
}

/// Lattice edge between 8-neighbours, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: LatticeNode,
    pub b: LatticeNode,
}

impl Edge {
    pub fn new(p: LatticeNode, q: LatticeNode) -> Result<Self> {
        let di = (p.i as i64 - q.i as i64).abs();
        let dj = (p.j as i64 - q.j as i64).abs();
        if di > 1 || dj > 1 || (di == 0 && dj == 0) {
            return Err(FractureError::CrackOffLattice(format!(
                "{p:?} and {q:?} are not lattice neighbours"
            )));
        }
        Ok(if p < q {
            Self { a: p, b: q }
        } else {
            Self { a: q, b: p }
        })
    }

    pub fn is_diagonal(&self) -> bool {
        self.a.i != self.b.i && self.a.j != self.b.j
    }

    /// Lower-left corner of the lattice cell a diagonal edge crosses.
    pub(crate) fn diagonal_cell(&self) -> Option<(u32, u32)> {
        self.is_diagonal()
            .then(|| (self.a.i.min(self.b.i), self.a.j.min(self.b.j)))
    }

    pub fn segment(&self, lattice: &LatticeSpec) -> Segment {
        Segment::new(lattice.position(self.a), lattice.position(self.b))
    }
}

/// A compact crack: a finite set of lattice edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackSet {
    lattice: LatticeSpec,
    edges: BTreeSet<Edge>,
    /// Largest distance any requested endpoint moved when snapped onto the lattice.
    #[serde(default)]
    snap_error: f64,
}

impl CrackSet {
    pub fn empty(lattice: LatticeSpec) -> Self {
        Self {
            lattice,
            edges: BTreeSet::new(),
            snap_error: 0.0,
        }
    }

    pub fn from_edges(lattice: LatticeSpec, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = Self::empty(lattice);
        for e in edges {
            set.insert(e)?;
        }
        Ok(set)
    }

    /// Union of straight runs given in world coordinates; endpoints snap
    /// to the nearest node and the snap distance must stay within `snap_tol`.
    pub fn from_runs(lattice: LatticeSpec, runs: &[(Point, Point)], snap_tol: f64) -> Result<Self> {
        let mut set = Self::empty(lattice);
        for &(p, q) in runs {
            let (a, ea) = snap_checked(&lattice, p, snap_tol)?;
            let (b, eb) = snap_checked(&lattice, q, snap_tol)?;
            set.snap_error = set.snap_error.max(ea).max(eb);
            for e in lattice.run_edges(a, b)? {
                set.insert(e)?;
            }
        }
        Ok(set)
    }

    pub fn insert(&mut self, e: Edge) -> Result<bool> {
        if !self.lattice.contains_node(e.a) || !self.lattice.contains_node(e.b) {
            return Err(FractureError::CrackOffLattice(format!(
                "edge {e:?} leaves the {}x{} lattice",
                self.lattice.nx, self.lattice.ny
            )));
        }
        Ok(self.edges.insert(e))
    }

    pub(crate) fn remove(&mut self, e: &Edge) -> bool {
        self.edges.remove(e)
    }

    pub fn with_edges(&self, extra: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut out = self.clone();
        for e in extra {
            out.insert(e)?;
        }
        Ok(out)
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn snap_error(&self) -> f64 {
        self.snap_error
    }

    pub fn is_subset(&self, other: &CrackSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// One-dimensional Hausdorff measure: the summed Euclidean edge lengths.
    pub fn length(&self) -> f64 {
        let diag = std::f64::consts::SQRT_2 * self.lattice.spacing;
        self.edges
            .iter()
            .map(|e| {
                if e.is_diagonal() {
                    diag
                } else {
                    self.lattice.spacing
                }
            })
            .sum()
    }

    /// Length of the part of the crack inside `rect`.
    pub fn length_in(&self, rect: &Rect) -> f64 {
        self.segments().iter().map(|s| rect.clipped_length(s)).sum()
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.edges
            .iter()
            .map(|e| e.segment(&self.lattice))
            .collect()
    }

    pub fn segment_set(&self) -> SegmentSet {
        SegmentSet::new(self.segments())
    }

    /// Number of crack edges incident to each node.
    pub fn degrees(&self) -> BTreeMap<LatticeNode, usize> {
        let mut deg = BTreeMap::new();
        for e in &self.edges {
            *deg.entry(e.a).or_insert(0) += 1;
            *deg.entry(e.b).or_insert(0) += 1;
        }
        deg
    }

    /// Nodes of degree one: the free ends of the polyline.
    pub fn endpoints(&self) -> Vec<LatticeNode> {
        self.degrees()
            .into_iter()
            .filter_map(|(n, d)| (d == 1).then_some(n))
            .collect()
    }

    pub fn component_count(&self) -> usize {
        connected_components(self).count
    }

    /// Hausdorff distance with the empty-set conventions, using the
    /// lattice rectangle as the domain.
    pub fn hausdorff(&self, other: &CrackSet) -> f64 {
        hausdorff_distance(
            &self.segment_set(),
            &other.segment_set(),
            self.lattice.diameter(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CrackSetJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CrackSetJson = serde_json::from_str(s)?;
        let mut set = Self::from_edges(
            raw.lattice,
            raw.edges
                .iter()
                .map(|&[p, q]| {
                    Edge::new(LatticeNode::new(p[0], p[1]), LatticeNode::new(q[0], q[1]))
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        set.snap_error = raw.snap_error;
        Ok(set)
    }
}

fn snap_checked(lattice: &LatticeSpec, p: Point, tol: f64) -> Result<(LatticeNode, f64)> {
    let (n, err) = lattice.snap(p).ok_or_else(|| {
        FractureError::CrackOffLattice(format!("point ({}, {}) lies outside the lattice", p.x, p.y))
    })?;
    if err > tol {
        return Err(FractureError::SnapTolerance {
            what: format!("endpoint ({}, {})", p.x, p.y),
            error: err,
            tolerance: tol,
        });
    }
    Ok((n, err))
}

/// Serialized form: lattice plus node-index pairs in lexicographic order.
#[derive(Debug, Serialize, Deserialize)]
pub struct CrackSetJson {
    pub lattice: LatticeSpec,
    pub edges: Vec<[[u32; 2]; 2]>,
    #[serde(default)]
    pub snap_error: f64,
}

impl From<&CrackSet> for CrackSetJson {
    fn from(k: &CrackSet) -> Self {
        Self {
            lattice: k.lattice,
            edges: k
                .edges
                .iter()
                .map(|e| [[e.a.i, e.a.j], [e.b.i, e.b.j]])
                .collect(),
            snap_error: k.snap_error,
        }
    }
}
