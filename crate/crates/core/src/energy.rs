//! Total energy `E(g, K) = (μ/2)∫|∇u|² + k·H¹(K)` and its differential in `g`.

use crate::compact_sets::CrackSet;
use crate::error::Result;
use crate::laplace::{solve_mixed, DirichletDatum, ScalarField};
use crate::slit_mesh::{build_mesh, DomainSpec, MeshParams};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Shear modulus; the bulk term is `μ/2 ∫|∇u|²`.
    pub mu: f64,
    /// Toughness multiplying crack length.
    pub k: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self { mu: 2.0, k: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(bulk: f64, surface: f64) -> Self {
        Self {
            bulk,
            surface,
            total: bulk + surface,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// Energy from `∫|∇u|²` and `H¹(K)`.
pub fn breakdown(params: &EnergyParams, dirichlet_integral: f64, length: f64) -> EnergyBreakdown {
    EnergyBreakdown::new(0.5 * params.mu * dirichlet_integral, params.k * length)
}

/// Energy of the elastic equilibrium for datum `g` on `Ω \ K`, with that equilibrium.
pub fn total_energy(
    g: &dyn DirichletDatum,
    crack: &CrackSet,
    domain: &DomainSpec,
    mesh: &MeshParams,
    params: &EnergyParams,
) -> Result<(EnergyBreakdown, ScalarField)> {
    let m = Arc::new(build_mesh(domain, crack, mesh)?);
    let u = solve_mixed(&m, g)?;
    let e = breakdown(params, crate::laplace::dirichlet_energy(&u), crack.length());
    Ok((e, u))
}

/// `dE(g, K) h = μ (∇u_g | ∇Π_h h)` on the slit mesh.
pub fn energy_differential(
    g: &dyn DirichletDatum,
    crack: &CrackSet,
    hdir: &dyn DirichletDatum,
    domain: &DomainSpec,
    mesh: &MeshParams,
    params: &EnergyParams,
) -> Result<f64> {
    let m = Arc::new(build_mesh(domain, crack, mesh)?);
    let u = solve_mixed(&m, g)?;
    Ok(differential_of(&u, hdir, params))
}

/// Differential for an already solved equilibrium.
pub fn differential_of(u: &ScalarField, hdir: &dyn DirichletDatum, params: &EnergyParams) -> f64 {
    let h = ScalarField::interpolate(u.mesh.clone(), hdir);
    params.mu * u.gradient().inner(&h.gradient())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact_sets::{straight_crack, LatticeSpec};
    use crate::geometry::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn strip() -> (DomainSpec, LatticeSpec) {
        let d = DomainSpec::strip();
        let lat = LatticeSpec::covering(d.rect, 0.125).unwrap();
        (d, lat)
    }

    fn x2(p: Point) -> f64 {
        p.y
    }

    #[test]
    fn zero_load_costs_only_the_crack() {
        let (d, lat) = strip();
        let k = straight_crack(lat, Point::new(0.0, 0.0), Point::new(0.5, 0.0)).unwrap();
        let (e, _) = total_energy(
            &|p: Point| 0.0 * p.y,
            &k,
            &d,
            &MeshParams::uniform(0.125),
            &EnergyParams::default(),
        )
        .unwrap();
        assert_eq!(e.bulk, 0.0);
        assert_eq!(e.total, 0.5);
    }

    #[test]
    fn strip_energies() {
        let (d, lat) = strip();
        let mp = MeshParams::uniform(0.125);
        let p = EnergyParams::default();
        let (e, _) = total_energy(&x2, &CrackSet::empty(lat), &d, &mp, &p).unwrap();
        assert!((e.bulk - 2.0).abs() < 1e-9 && e.surface == 0.0 && (e.total - 2.0).abs() < 1e-9);
        let cut = straight_crack(lat, Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let (e, _) = total_energy(&x2, &cut, &d, &mp, &p).unwrap();
        assert!(e.bulk.abs() < 1e-12);
        assert_eq!(e.surface, 1.0);
        assert_eq!(e.total, e.bulk + e.surface);
    }

    #[test]
    fn differential_of_x2_along_x2() {
        let (d, lat) = strip();
        let de = energy_differential(
            &x2,
            &CrackSet::empty(lat),
            &x2,
            &d,
            &MeshParams::uniform(0.125),
            &EnergyParams::default(),
        )
        .unwrap();
        assert!((de - 4.0).abs() < 1e-9);
    }

    #[test]
    fn differential_vanishes_for_constant_sides() {
        let (d, lat) = strip();
        let cut = straight_crack(lat, Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        let h = |p: Point| p.x * p.x + p.y;
        let de = energy_differential(
            &x2,
            &cut,
            &h,
            &d,
            &MeshParams::uniform(0.125),
            &EnergyParams::default(),
        )
        .unwrap();
        assert!(de.abs() < 1e-9);
    }

    #[test]
    fn central_differences_and_linearity() {
        let (d, lat) = strip();
        let mp = MeshParams::uniform(0.125);
        let p = EnergyParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x0 = rng.gen_range(0..6) as f64 * 0.125;
            let len = rng.gen_range(1..=(8 - (x0 * 8.0) as usize)) as f64 * 0.125;
            let k = straight_crack(lat, Point::new(x0, 0.0), Point::new(x0 + len, 0.0)).unwrap();
            let c: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let g = move |q: Point| c[0] * q.y + c[1] * q.x * q.y + c[2] * q.x;
            let h1 = move |q: Point| c[3] * q.y + c[4] * q.x * q.x;
            let h2 = move |q: Point| c[5] * q.x * q.y - q.y;

            let eps = 1e-4;
            let plus = move |q: Point| g(q) + eps * h1(q);
            let minus = move |q: Point| g(q) - eps * h1(q);
            let ep = total_energy(&plus, &k, &d, &mp, &p).unwrap().0.total;
            let em = total_energy(&minus, &k, &d, &mp, &p).unwrap().0.total;
            let fd = (ep - em) / (2.0 * eps);
            let de1 = energy_differential(&g, &k, &h1, &d, &mp, &p).unwrap();
            assert!(
                (fd - de1).abs() <= 1e-4 * de1.abs().max(1e-8),
                "fd {fd} vs {de1}"
            );

            let de2 = energy_differential(&g, &k, &h2, &d, &mp, &p).unwrap();
            let combo = move |q: Point| 2.0 * h1(q) - 3.0 * h2(q);
            let de12 = energy_differential(&g, &k, &combo, &d, &mp, &p).unwrap();
            assert!((de12 - (2.0 * de1 - 3.0 * de2)).abs() <= 1e-10 * (1.0 + de12.abs()));
        }
    }

    #[test]
    fn cracks_never_raise_the_bulk_energy() {
        let (d, lat) = strip();
        let mp = MeshParams::uniform(0.125);
        let p = EnergyParams::default();
        let g = |q: Point| q.y + 0.5 * q.x * q.y;
        let uncracked = total_energy(&g, &CrackSet::empty(lat), &d, &mp, &p)
            .unwrap()
            .0;
        for end in [0.25, 0.5, 0.75, 1.0] {
            let k = straight_crack(lat, Point::new(0.0, 0.0), Point::new(end, 0.0)).unwrap();
            let e = total_energy(&g, &k, &d, &mp, &p).unwrap().0;
            assert!(e.bulk <= uncracked.bulk + 1e-12);
            assert!(uncracked.total >= e.total - e.surface);
        }
    }
}
