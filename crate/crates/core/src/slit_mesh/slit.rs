//! Node duplication along the crack and boundary classification.

use super::refine::Refiner;
use super::{
    crack_coverage, BoundaryEdge, BoundaryTag, CrackBuckets, CrackSide, DomainSpec, SlitMesh,
    SlitNode,
};
use crate::error::{FractureError, Result};
use crate::geometry::{Point, Segment};
use crate::union_find::UnionFind;
use std::collections::HashMap;

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Crack direction with a fixed orientation, so that "plus" means the
/// same thing on every edge of a straight run.
pub(crate) fn canonical_normal(p: Point, q: Point) -> Point {
    let d = q - p;
    let d = if d.x > 0.0 || (d.x == 0.0 && d.y > 0.0) {
        d
    } else {
        -d
    };
    d.rot90()
}

pub(super) fn assemble(
    r: Refiner,
    domain: DomainSpec,
    h: f64,
    min_angle_deg: f64,
    buckets: &CrackBuckets,
    crack_segments: Vec<Segment>,
    tol: f64,
) -> Result<SlitMesh> {
    let live = r.alive_indices();
    let geo_triangles: Vec<[usize; 3]> = live.iter().map(|&t| r.tris[t].v).collect();
    let cells: Vec<usize> = live.iter().map(|&t| r.tris[t].cell).collect();
    let geo_nodes = r.pts;
    let nt = geo_triangles.len();

    let mut edge_tris: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in geo_triangles.iter().enumerate() {
        for k in 0..3 {
            edge_tris
                .entry(edge_key(tri[k], tri[(k + 1) % 3]))
                .or_default()
                .push(t);
        }
    }
    let mut crack_edges: Vec<[usize; 2]> = edge_tris
        .iter()
        .filter(|(&(a, b), ts)| {
            crack_coverage(
                geo_nodes[a],
                geo_nodes[b],
                buckets.in_cell(cells[ts[0]]),
                tol,
            ) >= 1.0 - 1e-9
        })
        .map(|(&(a, b), _)| [a, b])
        .collect();
    crack_edges.sort_unstable();
    let is_crack_edge =
        |a: usize, b: usize| crack_edges.binary_search(&[a.min(b), a.max(b)]).is_ok();

    let mut crack_degree: HashMap<usize, usize> = HashMap::new();
    let mut first_edge: HashMap<usize, [usize; 2]> = HashMap::new();
    for &[a, b] in &crack_edges {
        for n in [a, b] {
            *crack_degree.entry(n).or_insert(0) += 1;
            first_edge.entry(n).or_insert([a, b]);
        }
    }

    let mut node_tris: Vec<Vec<usize>> = vec![Vec::new(); geo_nodes.len()];
    for (t, tri) in geo_triangles.iter().enumerate() {
        for &v in tri {
            node_tris[v].push(t);
        }
    }

    // group the triangle fan of each crack node across non-crack edges
    let mut crack_nodes: Vec<usize> = crack_degree.keys().copied().collect();
    crack_nodes.sort_unstable();
    let mut group_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut groups_per_node: HashMap<usize, usize> = HashMap::new();
    for &n in &crack_nodes {
        let fan = &node_tris[n];
        let mut uf = UnionFind::new(fan.len());
        for (i, &ti) in fan.iter().enumerate() {
            for (j, &tj) in fan.iter().enumerate().skip(i + 1) {
                if let Some(m) = shared_other_vertex(&geo_triangles[ti], &geo_triangles[tj], n) {
                    if !is_crack_edge(n, m) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let (labels, count) = uf.labels();
        for (i, &t) in fan.iter().enumerate() {
            group_of.insert((n, t), labels[i]);
        }
        groups_per_node.insert(n, count);
    }

    // number slit nodes geometric node by geometric node
    let mut first_copy = Vec::with_capacity(geo_nodes.len());
    let mut nodes = Vec::new();
    let mut geo_of = Vec::new();
    for (g, &p) in geo_nodes.iter().enumerate() {
        first_copy.push(nodes.len());
        let copies = groups_per_node.get(&g).copied().unwrap_or(1);
        for _ in 0..copies {
            nodes.push(p);
            geo_of.push(g);
        }
    }
    let slit_index =
        |g: usize, t: usize| first_copy[g] + group_of.get(&(g, t)).copied().unwrap_or(0);
    let triangles: Vec<[usize; 3]> = geo_triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            [
                slit_index(tri[0], t),
                slit_index(tri[1], t),
                slit_index(tri[2], t),
            ]
        })
        .collect();

    let side_of_tri = |a: usize, b: usize, t: usize| -> CrackSide {
        let third = geo_triangles[t]
            .iter()
            .copied()
            .find(|&v| v != a && v != b)
            .unwrap();
        let n = canonical_normal(geo_nodes[a], geo_nodes[b]);
        if n.dot(geo_nodes[third] - geo_nodes[a]) > 0.0 {
            CrackSide::Plus
        } else {
            CrackSide::Minus
        }
    };

    let mut slit_nodes = Vec::with_capacity(crack_nodes.len());
    for &g in &crack_nodes {
        let count = groups_per_node[&g];
        let degree = crack_degree[&g];
        let copies: Vec<usize> = (first_copy[g]..first_copy[g] + count).collect();
        let (mut plus, mut minus) = (None, None);
        if count == 2 && degree <= 2 {
            let [a, b] = first_edge[&g];
            for &t in &edge_tris[&(a, b)] {
                let copy = slit_index(g, t);
                match side_of_tri(a, b, t) {
                    CrackSide::Plus => plus = Some(copy),
                    _ => minus = Some(copy),
                }
            }
            if plus.is_none() || minus.is_none() || plus == minus {
                plus = None;
                minus = None;
            }
        }
        slit_nodes.push(SlitNode {
            geo: g,
            copies,
            plus,
            minus,
            crack_degree: degree,
            on_outer_boundary: domain.on_boundary(geo_nodes[g], tol),
        });
    }

    let mut boundary_edges = Vec::new();
    let mut dirichlet = vec![false; nodes.len()];
    for (t, tri) in geo_triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let shared = edge_tris[&edge_key(a, b)].len();
            let crack = is_crack_edge(a, b);
            let tag = if crack {
                BoundaryTag::CrackFace(side_of_tri(a, b, t))
            } else if shared == 1 {
                if domain.is_dirichlet(geo_nodes[a].midpoint(geo_nodes[b]), tol) {
                    BoundaryTag::Dirichlet
                } else {
                    BoundaryTag::Neumann
                }
            } else {
                continue;
            };
            let (sa, sb) = (triangles[t][k], triangles[t][(k + 1) % 3]);
            if tag == BoundaryTag::Dirichlet {
                for (s, g) in [(sa, a), (sb, b)] {
                    if !crack_degree.contains_key(&g) {
                        dirichlet[s] = true;
                    }
                }
            }
            boundary_edges.push(BoundaryEdge {
                nodes: [sa, sb],
                triangle: t,
                tag,
            });
        }
    }

    let mut uf = UnionFind::new(nt);
    for (&(a, b), ts) in &edge_tris {
        if ts.len() == 2 && !is_crack_edge(a, b) {
            uf.union(ts[0], ts[1]);
        } else if ts.len() > 2 {
            return Err(FractureError::MeshFailure(format!(
                "edge {a}-{b} is shared by {} triangles",
                ts.len()
            )));
        }
    }
    let (triangle_component, component_count) = uf.labels();

    Ok(SlitMesh {
        domain,
        h,
        min_angle_deg,
        nodes,
        geo_of,
        geo_nodes,
        triangles,
        geo_triangles,
        slit_nodes,
        crack_edges,
        boundary_edges,
        dirichlet,
        triangle_component,
        component_count,
        crack_segments,
    })
}

/// The vertex other than `n` shared by two triangles that both contain `n`.
fn shared_other_vertex(a: &[usize; 3], b: &[usize; 3], n: usize) -> Option<usize> {
    a.iter().copied().find(|&v| v != n && b.contains(&v))
}
