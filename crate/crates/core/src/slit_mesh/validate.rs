use super::slit::edge_key;
use super::{BoundaryTag, CrackSide, SlitMesh};
use crate::geometry::orient2d;
use crate::union_find::UnionFind;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshReport {
    pub checks: Vec<CheckResult>,
}

impl MeshReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, failures: Vec<String>) -> CheckResult {
    CheckResult {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "ok".into()
        } else {
            let shown: Vec<_> = failures.iter().take(5).cloned().collect();
            format!("{} violation(s): {}", failures.len(), shown.join("; "))
        },
    }
}

/// Re-derive the structural properties of a slit mesh from its raw arrays.
pub fn validate_mesh(mesh: &SlitMesh) -> MeshReport {
    let tol = mesh.geometric_tolerance();
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        if orient2d(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]) <= 0.0 {
            bad.push(format!("triangle {t} is not counter-clockwise"));
        }
        if [a, b, c]
            .iter()
            .zip(mesh.geo_triangles[t])
            .any(|(&s, g)| mesh.geo_of[s] != g)
        {
            bad.push(format!(
                "triangle {t} disagrees with its geometric triangle"
            ));
        }
    }
    checks.push(check("orientation", bad));

    let min = mesh.min_angle();
    checks.push(check(
        "min_angle",
        if min + 1e-9 >= mesh.min_angle_deg {
            vec![]
        } else {
            vec![format!("{min:.3} deg < {:.3} deg", mesh.min_angle_deg)]
        },
    ));

    let area = mesh.total_area();
    let expected = mesh.domain.rect.area();
    checks.push(check(
        "area",
        if (area - expected).abs() <= 1e-10 {
            vec![]
        } else {
            vec![format!("triangles cover {area}, domain has {expected}")]
        },
    ));

    let mut bad = Vec::new();
    let crack_len: f64 = mesh.crack_segments.iter().map(|s| s.length()).sum();
    let mut edge_len = 0.0;
    for &[a, b] in &mesh.crack_edges {
        let (p, q) = (mesh.geo_nodes[a], mesh.geo_nodes[b]);
        edge_len += p.dist(q);
        if super::crack_coverage(p, q, mesh.crack_segments.iter(), tol) < 1.0 - 1e-9 {
            bad.push(format!("mesh edge {a}-{b} is not on the crack"));
        }
    }
    if (edge_len - crack_len).abs() > 1e-9 * crack_len.max(1.0) {
        bad.push(format!(
            "crack edges have length {edge_len}, crack has {crack_len}"
        ));
    }
    checks.push(check("crack_conformity", bad));

    // each crack edge must separate its two triangles in the slit numbering
    let mut edge_tris: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.geo_triangles.iter().enumerate() {
        for k in 0..3 {
            edge_tris
                .entry(edge_key(tri[k], tri[(k + 1) % 3]))
                .or_default()
                .push(t);
        }
    }
    let slit_of = |t: usize, g: usize| {
        let k = mesh.geo_triangles[t].iter().position(|&v| v == g).unwrap();
        mesh.triangles[t][k]
    };
    let mut bad = Vec::new();
    for &[a, b] in &mesh.crack_edges {
        let ts = &edge_tris[&(a, b)];
        if ts.len() != 2 {
            continue;
        }
        let separated = [a, b]
            .iter()
            .any(|&g| slit_of(ts[0], g) != slit_of(ts[1], g));
        if !separated {
            bad.push(format!("crack edge {a}-{b} joins both sides"));
        }
        for &g in &[a, b] {
            let tip = mesh.slit_node(g).is_some_and(|s| s.is_tip());
            if !tip && slit_of(ts[0], g) == slit_of(ts[1], g) {
                bad.push(format!(
                    "node {g} has a single copy across crack edge {a}-{b}"
                ));
            }
        }
    }
    let mut faces: HashMap<(usize, usize), Vec<CrackSide>> = HashMap::new();
    for e in &mesh.boundary_edges {
        if let BoundaryTag::CrackFace(side) = e.tag {
            let [a, b] = e.nodes;
            faces
                .entry(edge_key(mesh.geo_of[a], mesh.geo_of[b]))
                .or_default()
                .push(side);
        }
    }
    for (&(a, b), sides) in &faces {
        if sides.len() == 2 && sides[0] == sides[1] {
            bad.push(format!(
                "both faces of crack edge {a}-{b} are tagged {:?}",
                sides[0]
            ));
        }
    }
    checks.push(check("side_consistency", bad));

    let mut bad = Vec::new();
    for s in &mesh.slit_nodes {
        if s.is_tip() && s.copies.len() != 1 {
            bad.push(format!("tip {} has {} copies", s.geo, s.copies.len()));
        }
    }
    checks.push(check("tip_single_copy", bad));

    let mut bad = Vec::new();
    for s in &mesh.slit_nodes {
        if s.crack_degree == 2 && !s.on_outer_boundary && s.copies.len() != 2 {
            bad.push(format!(
                "crack node {} has {} copies",
                s.geo,
                s.copies.len()
            ));
        }
    }
    checks.push(check("interior_two_copies", bad));

    let mut bad = Vec::new();
    for s in &mesh.slit_nodes {
        for &c in &s.copies {
            if mesh.dirichlet[c] {
                bad.push(format!(
                    "crack node {} carries a Dirichlet condition",
                    s.geo
                ));
            }
        }
    }
    for e in &mesh.boundary_edges {
        let mid = mesh.nodes[e.nodes[0]].midpoint(mesh.nodes[e.nodes[1]]);
        let expect = mesh.domain.is_dirichlet(mid, tol);
        if (e.tag == BoundaryTag::Dirichlet) != expect
            && !matches!(e.tag, BoundaryTag::CrackFace(_))
        {
            bad.push(format!("boundary edge at {mid:?} has tag {:?}", e.tag));
        }
    }
    checks.push(check("dirichlet_exclusion", bad));

    let mut uf = UnionFind::new(mesh.triangles.len());
    let mut slit_edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            slit_edges
                .entry(edge_key(tri[k], tri[(k + 1) % 3]))
                .or_default()
                .push(t);
        }
    }
    for ts in slit_edges.values() {
        for w in ts.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let (labels, count) = uf.labels();
    let mut bad = Vec::new();
    if count != mesh.component_count {
        bad.push(format!(
            "{count} components by adjacency, mesh records {}",
            mesh.component_count
        ));
    }
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (t, &l) in labels.iter().enumerate() {
        if *seen.entry(l).or_insert(mesh.triangle_component[t]) != mesh.triangle_component[t] {
            bad.push(format!("triangle {t} has an inconsistent component label"));
        }
    }
    checks.push(check("components", bad));

    MeshReport { checks }
}
