//! The worked examples on the strip `(0,1) x (-1,1)`.

use crate::compact_sets::{
    golab_report, growing_segment, oscillating_crack, packed_crack, straight_crack, CrackSet,
    GolabReport, LatticeSpec,
};
use crate::error::{FractureError, Result};
use crate::evolution::Profile;
use crate::geometry::{Point, Rect};
use crate::laplace::{
    dirichlet_energy, harmonic_conjugate, solve_mixed, DirichletDatum, PointLocator, ScalarField,
};
use crate::slit_mesh::{build_mesh, BoundaryTag, DomainSpec, MeshParams, TipRefinement};
use serde::Serialize;
use std::sync::Arc;

fn strip_lattice(spacing: f64) -> Result<LatticeSpec> {
    LatticeSpec::covering(DomainSpec::strip().rect, spacing)
}

/// `∫|∇u|² − ∫|∇Π_h g|²`, nonpositive up to solver tolerance.
fn estimate_slack(u: &ScalarField, g: &dyn DirichletDatum) -> f64 {
    dirichlet_energy(u) - dirichlet_energy(&ScalarField::interpolate(u.mesh.clone(), g))
}

/// Base mesh `4h` with a band `|y| ≤ 4h·2` refined to `h` around the midline.
pub fn midline_mesh(h: f64) -> MeshParams {
    let base = 4.0 * h;
    MeshParams::uniform(base).with_box(Rect::new(0.0, 1.0, -2.0 * base, 2.0 * base), 4)
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillatingRow {
    pub n: u32,
    pub components: usize,
    pub crack_length: f64,
    pub triangles: usize,
    /// `‖u_n − x₂‖_{L²(Ω)}`
    pub l2_distance: f64,
    /// RMS of `∂u_n/∂ν` over the crack faces; the limit `x₂` has flux 1 there.
    pub crack_face_flux_rms: f64,
    /// Mean `∇u_n` over triangles in `[0.2, 0.8] × ±[0.4, 0.8]`.
    pub interior_gradient: [f64; 2],
    /// `∫|∇u|² − ∫|∇Π_h g|²`
    pub estimate_slack: f64,
}

/// `g = ±1` on top and bottom, `K_n` the oscillating crack with `n` pieces.
pub fn example_oscillating(ns: &[u32], mesh: &MeshParams) -> Result<Vec<OscillatingRow>> {
    let domain = DomainSpec::strip();
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(FractureError::InvalidInput("n must be at least 1".into()));
            }
            let lattice = strip_lattice(0.5 / n as f64)?;
            let k = oscillating_crack(n, lattice, 1e-9)?;
            let m = Arc::new(build_mesh(&domain, &k, mesh)?);
            let u = solve_mixed(&m, &Profile::Split)?;
            let grads = u.gradient();
            let mut face = (0.0, 0.0);
            for e in &m.boundary_edges {
                if let BoundaryTag::CrackFace(_) = e.tag {
                    let (p, q) = (m.nodes[e.nodes[0]], m.nodes[e.nodes[1]]);
                    let d = q - p;
                    let normal = Point::new(d.y, -d.x) * (1.0 / d.norm());
                    face.0 += d.norm() * grads.grads[e.triangle].dot(normal).powi(2);
                    face.1 += d.norm();
                }
            }
            let (mut g, mut area) = (Point::new(0.0, 0.0), 0.0);
            for (t, tri) in m.triangles.iter().enumerate() {
                let c = (m.nodes[tri[0]] + m.nodes[tri[1]] + m.nodes[tri[2]]) * (1.0 / 3.0);
                if (0.2..=0.8).contains(&c.x) && (0.4..=0.8).contains(&c.y.abs()) {
                    g = g + grads.grads[t] * m.area(t);
                    area += m.area(t);
                }
            }
            Ok(OscillatingRow {
                n,
                components: k.component_count(),
                crack_length: k.length(),
                triangles: m.triangle_count(),
                l2_distance: u.l2_error(&|p| p.y),
                crack_face_flux_rms: (face.0 / face.1).sqrt(),
                interior_gradient: [g.x / area, g.y / area],
                estimate_slack: estimate_slack(&u, &Profile::Split),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TransmissionRow {
    pub n: u32,
    pub lattice_spacing: f64,
    /// Gap after snapping to the lattice.
    pub gap: f64,
    pub snap_error: f64,
    pub triangles: usize,
    /// Far-field fits `u ≈ α + βy` on each half.
    pub alpha_plus: f64,
    pub beta_plus: f64,
    pub alpha_minus: f64,
    pub beta_minus: f64,
    /// From `∂u⁺/∂ν⁺ = −β⁺ = c (α⁻ − α⁺)`.
    pub c_plus: f64,
    /// From `∂u⁻/∂ν⁻ = β⁻ = −c (α⁻ − α⁺)`.
    pub c_minus: f64,
    pub c: f64,
    /// `|c − π/2| / (π/2)`
    pub relative_error: f64,
    /// `α⁻ − α⁺ < 0` and both fluxes carry the sign of `±(α⁻ − α⁺)`.
    pub signs_consistent: bool,
    /// Largest fit residual relative to the data range.
    pub fit_residual: f64,
    /// `∫|∇u|² − ∫|∇Π_h g|²`
    pub estimate_slack: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransmissionParams {
    /// Mesh size at the midline; the base mesh is four times coarser.
    pub h: f64,
    /// Lattice nodes per gap, at least.
    pub nodes_per_gap: f64,
    pub tip_refinement: bool,
    pub max_level: u32,
}

impl Default for TransmissionParams {
    fn default() -> Self {
        Self {
            h: 1.0 / 128.0,
            nodes_per_gap: 24.0,
            tip_refinement: true,
            max_level: 24,
        }
    }
}

fn linear_fit(samples: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let (sy, su) = samples
        .iter()
        .fold((0.0, 0.0), |a, &(y, u)| (a.0 + y, a.1 + u));
    let (my, mu) = (sy / n, su / n);
    let (mut syy, mut syu) = (0.0, 0.0);
    for &(y, u) in samples {
        syy += (y - my) * (y - my);
        syu += (y - my) * (u - mu);
    }
    let beta = syu / syy;
    let alpha = mu - beta * my;
    let range = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max)
        - samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let residual = samples
        .iter()
        .map(|&(y, u)| (u - alpha - beta * y).abs())
        .fold(0.0, f64::max)
        / range.max(1e-300);
    (alpha, beta, residual)
}

/// `g = x₂`, `K_n` the packed crack with gaps `e^{-n}`. The effective
/// interface law is read off the far field: `u` is sampled on vertical lines
/// through the middle of every crack piece, for `0.3 ≤ |y| ≤ 0.9`.
pub fn example_transmission(
    ns: &[u32],
    params: &TransmissionParams,
) -> Result<Vec<TransmissionRow>> {
    let domain = DomainSpec::strip();
    let mut rows = Vec::new();
    for &n in ns {
        if n == 0 {
            return Err(FractureError::InvalidInput("n must be at least 1".into()));
        }
        let gap = (-(n as f64)).exp();
        // dyadic spacing so that crack nodes are reachable by bisection
        let spacing = (2.0f64).powf((gap / params.nodes_per_gap).log2().floor());
        let depth = 2.0 * (4.0 * params.h / spacing).log2().max(0.0);
        if depth > params.max_level as f64 {
            return Err(FractureError::MeshFailure(format!(
                "gap e^-{n} = {gap:.3e} needs lattice spacing {spacing:.3e}, beyond {} bisection levels",
                params.max_level
            )));
        }
        let lattice = strip_lattice(spacing)?;
        let k = packed_crack(n, lattice, 0.5 * spacing * (1.0 + 1e-9))?;
        let mut mesh = midline_mesh(params.h);
        mesh.max_level = params.max_level;
        if params.tip_refinement {
            mesh = mesh.with_tip_refinement(TipRefinement::default());
        }
        let m = Arc::new(build_mesh(&domain, &k, &mesh)?);
        let u = solve_mixed(&m, &Profile::X2)?;
        let locator = PointLocator::new(&m);

        let lines: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let ys: Vec<f64> = (0..=12).map(|j| 0.3 + 0.05 * j as f64).collect();
        let sample = |sign: f64| -> Result<Vec<(f64, f64)>> {
            let mut out = Vec::new();
            for &x in &lines {
                for &y in &ys {
                    let p = Point::new(x, sign * y);
                    let v = locator.value_at(&u, p).ok_or_else(|| {
                        FractureError::InvalidInput(format!(
                            "sample point ({x}, {}) outside the mesh",
                            sign * y
                        ))
                    })?;
                    out.push((p.y, v));
                }
            }
            Ok(out)
        };
        let (ap, bp, rp) = linear_fit(&sample(1.0)?);
        let (am, bm, rm) = linear_fit(&sample(-1.0)?);
        let jump = am - ap;
        let c_plus = -bp / jump;
        let c_minus = -bm / jump;
        let c = 0.5 * (c_plus + c_minus);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let actual_gap = gap_after_snapping(&k, n);
        rows.push(TransmissionRow {
            n,
            lattice_spacing: spacing,
            gap: actual_gap,
            snap_error: k.snap_error(),
            triangles: m.triangle_count(),
            alpha_plus: ap,
            beta_plus: bp,
            alpha_minus: am,
            beta_minus: bm,
            c_plus,
            c_minus,
            c,
            relative_error: (c - half_pi).abs() / half_pi,
            signs_consistent: jump < 0.0 && -bp < 0.0 && bm > 0.0,
            fit_residual: rp.max(rm),
            estimate_slack: estimate_slack(&u, &Profile::X2),
        });
    }
    Ok(rows)
}

/// Smallest uncovered midline interval between consecutive crack pieces.
fn gap_after_snapping(k: &CrackSet, n: u32) -> f64 {
    if n < 2 {
        return 1.0 - k.length();
    }
    let mut xs: Vec<(f64, f64)> = k
        .segments()
        .iter()
        .map(|s| (s.a.x.min(s.b.x), s.a.x.max(s.b.x)))
        .collect();
    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
    xs.windows(2)
        .map(|w| w[1].0 - w[0].1)
        .filter(|&g| g > 1e-12)
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Serialize)]
pub struct GolabDemo {
    /// `[0, 1 − 1/n] × {0}`, connected, against `[0,1] × {0}`.
    pub connected: GolabReport,
    /// Oscillating cracks with `n` pieces against `[0,1] × {0}`.
    pub oscillating: GolabReport,
}

/// `ns` is taken as the tail of both sequences. The slack is the largest
/// Hausdorff distance of the connected tail to the limit: a length deficit
/// no larger than the remaining distance is read as convergence.
pub fn golab_demo(ns: &[u32]) -> Result<GolabDemo> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(FractureError::InvalidInput(
            "need a nonempty list of positive n".into(),
        ));
    }
    let top = ns.iter().copied().max().unwrap();
    let lattice = strip_lattice(0.5 / top as f64)?;
    let limit = straight_crack(lattice, Point::new(0.0, 0.0), Point::new(1.0, 0.0))?;
    let growing = ns
        .iter()
        .map(|&n| growing_segment(n, lattice, 1e-9))
        .collect::<Result<Vec<_>>>()?;
    let oscillating = ns
        .iter()
        .map(|&n| oscillating_crack(n, lattice, 1e-9))
        .collect::<Result<Vec<_>>>()?;
    let tol = growing
        .iter()
        .map(|k| k.hausdorff(&limit))
        .fold(0.0, f64::max)
        + 1e-12;
    Ok(GolabDemo {
        connected: golab_report(&growing, &limit, None, tol),
        oscillating: golab_report(&oscillating, &limit, None, tol),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateRow {
    pub h: f64,
    pub graded: bool,
    pub triangles: usize,
    pub crack_nodes: usize,
    /// Standard deviation of `v` over the crack nodes.
    pub spread: f64,
    pub relative_misfit: f64,
    /// `∫|∇u|² − ∫|∇Π_h g|²`
    pub estimate_slack: f64,
}

/// Uniform mesh `h` graded towards crack tips: the innermost tip boxes are
/// refined by about `1/(4h)`, so tip elements shrink like `4h²`.
pub fn graded_tip_mesh(h: f64) -> MeshParams {
    let factor = ((0.25 / h).round() as u32).max(2).next_power_of_two();
    MeshParams::uniform(h).with_tip_refinement(TipRefinement {
        factor,
        levels: 2,
        radius: 4.0,
    })
}

/// Interior slit `[0.25, 0.75] × {0}`, `g = x₂`: the conjugate of the
/// equilibrium is constant on the crack in the continuum.
pub fn conjugate_on_slit(hs: &[f64], graded: bool) -> Result<Vec<ConjugateRow>> {
    let domain = DomainSpec::strip();
    hs.iter()
        .map(|&h| {
            let lattice = strip_lattice(0.25)?;
            let k = straight_crack(lattice, Point::new(0.25, 0.0), Point::new(0.75, 0.0))?;
            let params = if graded {
                graded_tip_mesh(h)
            } else {
                MeshParams::uniform(h)
            };
            let m = Arc::new(build_mesh(&domain, &k, &params)?);
            let u = solve_mixed(&m, &Profile::X2)?;
            let c = harmonic_conjugate(&u)?;
            let vals: Vec<f64> = m.slit_nodes.iter().map(|s| c.v.values[s.geo]).collect();
            Ok(ConjugateRow {
                h,
                graded,
                triangles: m.triangle_count(),
                crack_nodes: vals.len(),
                spread: std_dev(&vals),
                relative_misfit: c.relative_misfit,
                estimate_slack: estimate_slack(&u, &Profile::X2),
            })
        })
        .collect()
}

fn std_dev(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}
