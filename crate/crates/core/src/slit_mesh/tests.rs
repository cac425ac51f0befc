use super::*;
use crate::compact_sets::{oscillating_crack, straight_crack, Edge, LatticeNode, LatticeSpec};
use crate::geometry::orient2d;
use proptest::prelude::*;

fn unit() -> Rect {
    Rect::new(0.0, 1.0, 0.0, 1.0)
}

fn strip_lattice(s: f64) -> LatticeSpec {
    LatticeSpec::covering(DomainSpec::strip().rect, s).unwrap()
}

fn segments_cross(p: Point, q: Point, s: &Segment) -> bool {
    let d1 = orient2d(p, q, s.a);
    let d2 = orient2d(p, q, s.b);
    let d3 = orient2d(s.a, s.b, p);
    let d4 = orient2d(s.a, s.b, q);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0 && !(d1 == 0.0 && d2 == 0.0)
}

/// Components of `rect \ crack` by flood fill on a pixel grid whose centers
/// avoid every lattice line and diagonal.
fn raster_components(rect: Rect, segments: &[Segment], res: f64) -> usize {
    let nx = (rect.width() / res).round() as usize;
    let ny = (rect.height() / res).round() as usize;
    let center = |i: usize, j: usize| {
        Point::new(
            rect.x0 + (i as f64 + 0.37) * res,
            rect.y0 + (j as f64 + 0.61) * res,
        )
    };
    let mut uf = crate::union_find::UnionFind::new(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = center(i, j);
            for (di, dj) in [(1, 0), (0, 1)] {
                let (ii, jj) = (i + di, j + dj);
                if ii >= nx || jj >= ny {
                    continue;
                }
                let q = center(ii, jj);
                if !segments.iter().any(|s| segments_cross(p, q, s)) {
                    uf.union(j * nx + i, jj * nx + ii);
                }
            }
        }
    }
    uf.labels().1
}

fn checked(domain: &DomainSpec, crack: &CrackSet, params: &MeshParams) -> SlitMesh {
    let mesh = build_mesh(domain, crack, params).unwrap();
    let report = validate_mesh(&mesh);
    assert!(report.passed(), "{:?}", report.failures());
    mesh
}

#[test]
fn uncracked_strip() {
    let d = DomainSpec::strip();
    let mesh = checked(
        &d,
        &CrackSet::empty(strip_lattice(0.25)),
        &MeshParams::uniform(0.25),
    );
    assert_eq!(mesh.triangle_count(), 2 * 4 * 8);
    assert_eq!(mesh.node_count(), 5 * 9);
    assert_eq!(mesh.component_count, 1);
    assert_eq!(mesh.dirichlet.iter().filter(|&&d| d).count(), 10);
    assert!((mesh.min_angle() - 45.0).abs() < 1e-9);
}

#[test]
fn full_midline_cuts_the_strip() {
    let lat = strip_lattice(0.125);
    let k = straight_crack(lat, Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.125));
    assert_eq!(mesh.component_count, 2);
    // every crack node is split, the boundary ones included
    assert_eq!(mesh.slit_nodes.len(), 9);
    assert!(mesh.slit_nodes.iter().all(|s| s.copies.len() == 2));
    let faces = mesh
        .boundary_edges
        .iter()
        .filter(|e| matches!(e.tag, BoundaryTag::CrackFace(_)))
        .count();
    assert_eq!(faces, 16);
}

#[test]
fn interior_slit_keeps_one_component() {
    let lat = strip_lattice(0.125);
    let k = straight_crack(lat, Point::new(0.25, 0.0), Point::new(0.75, 0.0)).unwrap();
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.125));
    assert_eq!(mesh.component_count, 1);
    let tips: Vec<_> = mesh.slit_nodes.iter().filter(|s| s.is_tip()).collect();
    assert_eq!(tips.len(), 2);
    let inner = mesh.slit_nodes.iter().filter(|s| !s.is_tip()).count();
    assert_eq!(inner, 3);
    for s in mesh.slit_nodes.iter().filter(|s| !s.is_tip()) {
        let (p, m) = (s.plus.unwrap(), s.minus.unwrap());
        assert_ne!(p, m);
    }
}

#[test]
fn single_edge_between_two_tips_is_opened() {
    let lat = strip_lattice(0.125);
    let k = straight_crack(lat, Point::new(0.5, 0.0), Point::new(0.625, 0.0)).unwrap();
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.125));
    assert_eq!(mesh.crack_edges.len(), 2);
    assert!(mesh.slit_nodes.iter().any(|s| s.copies.len() == 2));
}

#[test]
fn fine_lattice_on_coarse_mesh() {
    // lattice spacing 1/16 on an h = 1/4 grid, diagonal included
    let lat = strip_lattice(1.0 / 16.0);
    let mut k = straight_crack(lat, Point::new(0.0, 0.0), Point::new(0.5, 0.0)).unwrap();
    let diag = straight_crack(lat, Point::new(0.5, 0.0), Point::new(0.75, 0.25)).unwrap();
    for e in diag.edges() {
        k.insert(*e).unwrap();
    }
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.25));
    assert_eq!(mesh.component_count, 1);
    // mesh edges along the crack may span several lattice edges
    let len: f64 = mesh
        .crack_edges
        .iter()
        .map(|&[a, b]| mesh.geo_nodes[a].dist(mesh.geo_nodes[b]))
        .sum();
    assert!((len - k.length()).abs() < 1e-12);
}

#[test]
fn non_dyadic_lattice_fails_cleanly() {
    let lat = LatticeSpec::covering(unit(), 1.0 / 3.0).unwrap();
    let k = straight_crack(lat, Point::new(0.0, 1.0 / 3.0), Point::new(1.0, 1.0 / 3.0)).unwrap();
    let params = MeshParams {
        max_level: 10,
        ..MeshParams::uniform(0.25)
    };
    match build_mesh(&DomainSpec::clamped(unit()), &k, &params) {
        Err(FractureError::MeshFailure(_)) => {}
        other => panic!("expected a mesh failure, got {other:?}"),
    }
}

#[test]
fn h_must_divide_domain() {
    let lat = LatticeSpec::covering(unit(), 0.25).unwrap();
    assert!(matches!(
        build_mesh(
            &DomainSpec::clamped(unit()),
            &CrackSet::empty(lat),
            &MeshParams::uniform(0.3)
        ),
        Err(FractureError::MeshFailure(_))
    ));
}

#[test]
fn refinement_box_shrinks_elements() {
    let lat = strip_lattice(0.25);
    let params = MeshParams::uniform(0.25).with_box(Rect::new(0.4, 0.6, -0.1, 0.1), 4);
    let mesh = checked(&DomainSpec::strip(), &CrackSet::empty(lat), &params);
    let smallest = (0..mesh.triangle_count())
        .map(|t| mesh.area(t))
        .fold(f64::INFINITY, f64::min);
    assert!((smallest - 0.5 * (0.25f64 / 4.0).powi(2)).abs() < 1e-15);
}

#[test]
fn tip_refinement_concentrates_near_tips() {
    let lat = strip_lattice(0.125);
    let k = straight_crack(lat, Point::new(0.0, 0.0), Point::new(0.5, 0.0)).unwrap();
    let plain = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.125));
    let tipped = checked(
        &DomainSpec::strip(),
        &k,
        &MeshParams::uniform(0.125).with_tip_refinement(TipRefinement::default()),
    );
    assert!(tipped.triangle_count() > plain.triangle_count());
    let tip = Point::new(0.5, 0.0);
    let near = (0..tipped.triangle_count())
        .filter(|&t| {
            tipped.triangles[t]
                .iter()
                .any(|&v| tipped.nodes[v].dist(tip) < 1e-12)
        })
        .map(|t| tipped.area(t))
        .fold(f64::INFINITY, f64::min);
    assert!(near <= 0.5 * (0.125f64 / 4.0).powi(2) + 1e-15);
}

#[test]
fn closed_loop_encloses_a_component() {
    let lat = LatticeSpec::covering(unit(), 0.25).unwrap();
    let n = |i, j| LatticeNode { i, j };
    let edges = [
        Edge::new(n(1, 1), n(2, 1)),
        Edge::new(n(2, 1), n(3, 2)),
        Edge::new(n(3, 2), n(2, 3)),
        Edge::new(n(2, 3), n(1, 2)),
        Edge::new(n(1, 2), n(1, 1)),
    ];
    let k = CrackSet::from_edges(lat, edges.into_iter().map(|e| e.unwrap())).unwrap();
    let mesh = checked(&DomainSpec::clamped(unit()), &k, &MeshParams::uniform(0.25));
    assert_eq!(mesh.component_count, 2);
    assert_eq!(raster_components(unit(), &k.segments(), 0.25 / 4.0), 2);
}

#[test]
fn oscillating_crack_matches_raster() {
    let lat = strip_lattice(1.0 / 16.0);
    let k = oscillating_crack(4, lat, 1e-12).unwrap();
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(1.0 / 16.0));
    assert_eq!(mesh.component_count, 1);
    assert_eq!(
        raster_components(DomainSpec::strip().rect, &k.segments(), 1.0 / 64.0),
        1
    );
    assert_eq!(mesh.slit_nodes.iter().filter(|s| s.is_tip()).count(), 7);
}

#[test]
fn corrupted_meshes_are_reported() {
    let lat = strip_lattice(0.125);
    let k = straight_crack(lat, Point::new(0.25, 0.0), Point::new(0.75, 0.0)).unwrap();
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.125));

    let mut flipped = mesh.clone();
    flipped.triangles[0].swap(1, 2);
    let r = validate_mesh(&flipped);
    assert!(!r.check("orientation").unwrap().passed);

    // glue the two sides of an interior crack node back together
    let mut glued = mesh.clone();
    let s = glued
        .slit_nodes
        .iter()
        .find(|s| !s.is_tip())
        .unwrap()
        .clone();
    let (keep, drop) = (s.copies[0], s.copies[1]);
    for tri in &mut glued.triangles {
        for v in tri.iter_mut() {
            if *v == drop {
                *v = keep;
            }
        }
    }
    let r = validate_mesh(&glued);
    assert!(!r.check("side_consistency").unwrap().passed);

    let mut dirichlet_crack = mesh.clone();
    dirichlet_crack.dirichlet[s.copies[0]] = true;
    assert!(
        !validate_mesh(&dirichlet_crack)
            .check("dirichlet_exclusion")
            .unwrap()
            .passed
    );

    let mut holed = mesh;
    holed.triangles.pop();
    holed.geo_triangles.pop();
    holed.triangle_component.pop();
    assert!(!validate_mesh(&holed).check("area").unwrap().passed);
}

#[test]
fn crack_touching_dirichlet_boundary_frees_that_node() {
    let rect = unit();
    let lat = LatticeSpec::covering(rect, 0.25).unwrap();
    let k = straight_crack(lat, Point::new(0.5, 0.0), Point::new(0.5, 0.5)).unwrap();
    let mesh = checked(&DomainSpec::clamped(rect), &k, &MeshParams::uniform(0.25));
    let foot = mesh
        .slit_nodes
        .iter()
        .find(|s| s.on_outer_boundary)
        .unwrap();
    assert_eq!(foot.copies.len(), 2);
    assert!(foot.copies.iter().all(|&c| !mesh.dirichlet[c]));
    assert_eq!(mesh.component_count, 1);
}

#[test]
fn export_lists_every_entity() {
    let lat = strip_lattice(0.25);
    let k = straight_crack(lat, Point::new(0.0, 0.0), Point::new(0.5, 0.0)).unwrap();
    let mesh = checked(&DomainSpec::strip(), &k, &MeshParams::uniform(0.25));
    let mut buf = Vec::new();
    write_mesh(&mesh, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains(&format!("nodes {}", mesh.node_count())));
    assert!(text.contains(&format!("triangles {}", mesh.triangle_count())));
    assert_eq!(text.matches("crack+").count(), 2);
    assert_eq!(text.matches("crack-").count(), 2);
}

fn random_crack(lat: LatticeSpec, picks: &[(u32, u32, u8)]) -> CrackSet {
    let mut k = CrackSet::empty(lat);
    for &(i, j, dir) in picks {
        let (di, dj): (i64, i64) = [(1, 0), (0, 1), (1, 1), (1, -1)][dir as usize % 4];
        let (ii, jj) = (i as i64 + di, j as i64 + dj);
        if ii < 0 || jj < 0 || ii > lat.nx as i64 || jj > lat.ny as i64 {
            continue;
        }
        let e = Edge::new(
            LatticeNode { i, j },
            LatticeNode {
                i: ii as u32,
                j: jj as u32,
            },
        )
        .unwrap();
        k.insert(e).unwrap();
    }
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn components_match_raster_oracle(
        picks in prop::collection::vec((0u32..=4, 0u32..=4, 0u8..4), 0..14),
        coarse in any::<bool>(),
    ) {
        let lat = LatticeSpec::covering(unit(), 0.25).unwrap();
        let k = random_crack(lat, &picks);
        let h = if coarse { 0.5 } else { 0.25 };
        let mesh = build_mesh(&DomainSpec::clamped(unit()), &k, &MeshParams::uniform(h)).unwrap();
        let report = validate_mesh(&mesh);
        prop_assert!(report.passed(), "{:?}", report.failures());
        let oracle = raster_components(unit(), &k.segments(), 0.25 / 4.0);
        prop_assert_eq!(mesh.component_count, oracle);
    }
}
