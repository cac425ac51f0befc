use super::*;
use crate::compact_sets::{CrackSet, Edge, LatticeNode, LatticeSpec};
use crate::geometry::Rect;
use crate::slit_mesh::{build_mesh, DomainSpec, MeshParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn strip_mesh(crack: &[(Point, Point)], s: f64, h: f64) -> Arc<SlitMesh> {
    let d = DomainSpec::strip();
    let lat = LatticeSpec::covering(d.rect, s).unwrap();
    let k = CrackSet::from_runs(lat, crack, 1e-12).unwrap();
    Arc::new(build_mesh(&d, &k, &MeshParams::uniform(h)).unwrap())
}

fn x2(p: Point) -> f64 {
    p.y
}

fn interior_slit(h: f64) -> Arc<SlitMesh> {
    strip_mesh(&[(Point::new(0.25, 0.0), Point::new(0.75, 0.0))], 0.125, h)
}

#[test]
fn constant_data_gives_constant_solution() {
    let mesh = interior_slit(0.125);
    let u = solve_mixed(&mesh, &|_: Point| 3.5).unwrap();
    assert!(u.values.iter().all(|&v| (v - 3.5).abs() < 1e-12));
    assert!(u.gradient().grads.iter().all(|g| g.norm() < 1e-12));
    assert_eq!(dirichlet_energy(&u), 0.0);
}

#[test]
fn uncracked_strip_reproduces_x2() {
    let mesh = strip_mesh(&[], 0.125, 0.125);
    let u = solve_mixed(&mesh, &x2).unwrap();
    for (p, v) in mesh.nodes.iter().zip(&u.values) {
        assert!((v - p.y).abs() < 1e-9);
    }
    assert!((dirichlet_energy(&u) - 2.0).abs() < 1e-9);
    assert!(u.l2_error(&x2) < 1e-9);
}

#[test]
fn full_cut_gives_constants_per_side() {
    let mesh = strip_mesh(
        &[(Point::new(0.0, 0.0), Point::new(1.0, 0.0))],
        0.125,
        0.125,
    );
    let u = solve_mixed(&mesh, &x2).unwrap();
    for (p, v) in mesh.nodes.iter().zip(&u.values) {
        if p.y.abs() > 1e-12 {
            assert!((v - p.y.signum()).abs() < 1e-9);
        }
    }
    assert!(dirichlet_energy(&u) < 1e-16);
    let jumps = trace_jump(&u);
    assert_eq!(jumps.len(), 9);
    for j in jumps {
        assert!((j.plus - 1.0).abs() < 1e-9 && (j.minus + 1.0).abs() < 1e-9);
    }
}

#[test]
fn floating_component_is_zero() {
    let rect = Rect::new(0.0, 1.0, 0.0, 1.0);
    let lat = LatticeSpec::covering(rect, 0.25).unwrap();
    let n = |i, j| LatticeNode { i, j };
    let edges = [
        (n(1, 1), n(3, 1)),
        (n(3, 1), n(3, 3)),
        (n(3, 3), n(1, 3)),
        (n(1, 3), n(1, 1)),
    ];
    let mut k = CrackSet::empty(lat);
    for (a, b) in edges {
        for e in lat.run_edges(a, b).unwrap() {
            k.insert(e).unwrap();
        }
    }
    let mesh =
        Arc::new(build_mesh(&DomainSpec::clamped(rect), &k, &MeshParams::uniform(0.125)).unwrap());
    assert_eq!(mesh.component_count, 2);
    let u = solve_mixed(&mesh, &|p: Point| 1.0 + p.x).unwrap();
    let comp = mesh.node_component();
    let inside = comp[mesh
        .nodes
        .iter()
        .position(|p| p.dist(Point::new(0.5, 0.5)) < 1e-12)
        .unwrap()];
    for (v, &c) in u.values.iter().zip(&comp) {
        if c == inside {
            assert_eq!(*v, 0.0);
        }
    }
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let rect = Rect::new(0.0, 1.0, 0.0, 1.0);
    let exact = |p: Point| p.x * p.x - p.y * p.y;
    let errors: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            let lat = LatticeSpec::covering(rect, h).unwrap();
            let mesh = Arc::new(
                build_mesh(
                    &DomainSpec::clamped(rect),
                    &CrackSet::empty(lat),
                    &MeshParams::uniform(h),
                )
                .unwrap(),
            );
            let u = solve_mixed(&mesh, &exact).unwrap();
            u.l2_error(&exact)
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (3.4..=4.6).contains(&ratio),
            "ratio {ratio}, errors {errors:?}"
        );
    }
}

#[test]
fn gradient_norm_matches_stiffness_form() {
    let mesh = interior_slit(0.0625);
    let sys = LaplaceSystem::new(mesh.clone());
    let (u, stats) = sys.solve(&|p: Point| p.y + 0.3 * p.x * p.y).unwrap();
    assert!(stats.relative_residual <= SOLVER_TOLERANCE);
    let a = dirichlet_energy(&u);
    let b = sys.energy_form(&u.values, &u.values);
    assert!((a - b).abs() <= 1e-10 * a);
}

#[test]
fn top_flux_of_x2_is_one() {
    let mesh = strip_mesh(&[], 0.125, 0.125);
    let u = ScalarField::interpolate(mesh.clone(), &x2);
    let top = FluxSegment {
        a: Point::new(0.0, 1.0),
        b: Point::new(1.0, 1.0),
        side: None,
    };
    let samples = boundary_flux(&u, &top).unwrap();
    assert_eq!(samples.len(), 8);
    assert!(samples.iter().all(|s| (s.flux - 1.0).abs() < 1e-12));
    assert!(samples.windows(2).all(|w| w[0].s < w[1].s));
    let c = ScalarField::constant(mesh, 2.0);
    assert!(boundary_flux(&c, &top)
        .unwrap()
        .iter()
        .all(|s| s.flux == 0.0));
}

#[test]
fn flux_needs_a_boundary_chain() {
    let mesh = strip_mesh(&[], 0.125, 0.125);
    let u = ScalarField::interpolate(mesh, &x2);
    let inner = FluxSegment {
        a: Point::new(0.0, 0.5),
        b: Point::new(1.0, 0.5),
        side: None,
    };
    assert!(matches!(
        boundary_flux(&u, &inner),
        Err(crate::FractureError::SegmentNotOnMesh(_))
    ));
}

#[test]
fn crack_face_flux_vanishes_under_refinement() {
    let mean_flux = |h: f64| {
        let mesh = interior_slit(h);
        let u = solve_mixed(&mesh, &x2).unwrap();
        let face = FluxSegment {
            a: Point::new(0.375, 0.0),
            b: Point::new(0.625, 0.0),
            side: Some(CrackSide::Plus),
        };
        let s = boundary_flux(&u, &face).unwrap();
        s.iter().map(|f| f.flux.abs() * f.length).sum::<f64>() / 0.25
    };
    let f: Vec<f64> = [0.125, 0.0625, 0.03125]
        .iter()
        .map(|&h| mean_flux(h))
        .collect();
    assert!(f[1] < f[0] && f[2] < f[1], "{f:?}");
}

#[test]
fn even_data_does_not_open_the_crack() {
    let mesh = interior_slit(0.0625);
    let u = solve_mixed(&mesh, &|p: Point| p.x * p.x).unwrap();
    for j in trace_jump(&u) {
        assert!((j.plus - j.minus).abs() < 1e-8);
    }
}

#[test]
fn conjugate_of_x2_is_minus_x1() {
    let mesh = strip_mesh(&[], 0.125, 0.125);
    let u = ScalarField::interpolate(mesh, &x2);
    let c = harmonic_conjugate(&u).unwrap();
    assert!(c.misfit < 1e-18);
    for (p, v) in c.v.mesh.nodes.iter().zip(&c.v.values) {
        assert!((v - (0.5 - p.x)).abs() < 1e-9);
    }
    let zero = harmonic_conjugate(&ScalarField::constant(interior_slit(0.125), 1.0)).unwrap();
    assert!(zero.v.values.iter().all(|&v| v == 0.0));
}

#[test]
fn conjugate_is_flatter_on_the_crack_when_refined() {
    let spread = |h: f64| {
        let mesh = interior_slit(h);
        let u = solve_mixed(&mesh, &x2).unwrap();
        let c = harmonic_conjugate(&u).unwrap();
        let vals: Vec<f64> = mesh.slit_nodes.iter().map(|s| c.v.values[s.geo]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt()
    };
    assert!(spread(0.0625) < spread(0.125));
}

#[test]
fn locator_finds_interpolated_values() {
    let mesh = interior_slit(0.125);
    let u = ScalarField::interpolate(mesh.clone(), &|p: Point| 2.0 * p.x - p.y);
    let loc = PointLocator::new(&mesh);
    for p in [
        Point::new(0.33, 0.41),
        Point::new(0.999, -0.999),
        Point::new(0.0, 1.0),
    ] {
        let v = loc.value_at(&u, p).unwrap();
        assert!((v - (2.0 * p.x - p.y)).abs() < 1e-12);
    }
    assert!(loc.value_at(&u, Point::new(2.0, 0.0)).is_none());
}

#[test]
fn mass_matrix_distance_agrees_with_quadrature() {
    let mesh = interior_slit(0.125);
    let f = |p: Point| p.x * p.y;
    let u = ScalarField::interpolate(mesh.clone(), &f);
    let z = ScalarField::constant(mesh, 0.0);
    let q = u.l2_error(&|_| 0.0);
    assert!((u.l2_distance(&z) - q).abs() < 1e-14);
}

#[test]
fn csv_export_has_one_row_per_node() {
    let mesh = interior_slit(0.25);
    let u = ScalarField::interpolate(mesh.clone(), &x2);
    let mut buf = Vec::new();
    u.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), mesh.node_count() + 1);
    assert!(text.starts_with("node,x,y,side,value"));
    assert!(text.contains(",plus,") && text.contains(",minus,") && text.contains(",tip,"));
}

fn random_mesh(seed: u64) -> Arc<SlitMesh> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = DomainSpec::strip();
    let lat = LatticeSpec::covering(d.rect, 0.125).unwrap();
    let mut k = CrackSet::empty(lat);
    for _ in 0..rng.gen_range(0..10) {
        let a = LatticeNode {
            i: rng.gen_range(0..8),
            j: rng.gen_range(1..15),
        };
        let (di, dj) = [(1, 0), (0, 1), (1, 1), (1, -1)][rng.gen_range(0..4)];
        let b = LatticeNode {
            i: (a.i as i32 + di) as u32,
            j: (a.j as i32 + dj) as u32,
        };
        k.insert(Edge::new(a, b).unwrap()).unwrap();
    }
    Arc::new(build_mesh(&d, &k, &MeshParams::uniform(0.125)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_minimizes_energy(seed in any::<u64>(), c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let mesh = random_mesh(seed);
        let g = move |p: Point| c * p.y + d * p.x * p.y + p.x * p.x;
        let sys = LaplaceSystem::new(mesh.clone());
        let (u, _) = sys.solve(&g).unwrap();
        let e = dirichlet_energy(&u);
        // estimate against the interpolated datum
        prop_assert!(e <= dirichlet_energy(&ScalarField::interpolate(mesh.clone(), &g)) + 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..10 {
            let z: Vec<f64> = (0..mesh.node_count())
                .map(|v| if mesh.dirichlet[v] { 0.0 } else { rng.gen_range(-1.0..1.0) })
                .collect();
            let a = sys.energy_form(&u.values, &z);
            let zz = sys.energy_form(&z, &z);
            // Galerkin orthogonality
            prop_assert!(a.abs() <= 1e-9 * (e * zz).sqrt().max(1e-12), "a(u,z) = {a}");
            let eps = 1e-3;
            let perturbed: Vec<f64> = u.values.iter().zip(&z).map(|(u, z)| u + eps * z).collect();
            prop_assert!(sys.energy_form(&perturbed, &perturbed) >= e - 1e-9);
        }
    }
}
