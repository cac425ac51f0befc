//! Midline crack families on the strip `(0,1) x (-1,1)`.

use super::{CrackSet, LatticeSpec};
use crate::error::{FractureError, Result};
use crate::geometry::Point;

/// Straight run between two lattice points (no snapping allowed).
pub fn straight_crack(lattice: LatticeSpec, p: Point, q: Point) -> Result<CrackSet> {
    CrackSet::from_runs(lattice, &[(p, q)], 1e-9 * lattice.spacing)
}

/// `n` disjoint segments `[i/n, i/n + 1/(2n)] x {0}`, total length 1/2.
pub fn oscillating_crack(n: u32, lattice: LatticeSpec, snap_tol: f64) -> Result<CrackSet> {
    let nf = n as f64;
    midline_family(n, lattice, snap_tol, |i| (i / nf, i / nf + 0.5 / nf))
}

/// `n` segments `[i/n, (i+1)/n - e^{-n}] x {0}` separated by exponentially small gaps.
pub fn packed_crack(n: u32, lattice: LatticeSpec, snap_tol: f64) -> Result<CrackSet> {
    let nf = n as f64;
    let gap = (-nf).exp();
    midline_family(n, lattice, snap_tol, |i| (i / nf, (i + 1.0) / nf - gap))
}

/// Connected segment `[0, 1 - 1/n] x {0}`.
pub fn growing_segment(n: u32, lattice: LatticeSpec, snap_tol: f64) -> Result<CrackSet> {
    if n == 0 {
        return Err(FractureError::InvalidInput("n must be at least 1".into()));
    }
    let end = 1.0 - 1.0 / n as f64;
    CrackSet::from_runs(
        lattice,
        &[(Point::new(0.0, 0.0), Point::new(end, 0.0))],
        snap_tol,
    )
}

fn midline_family(
    n: u32,
    lattice: LatticeSpec,
    snap_tol: f64,
    interval: impl Fn(f64) -> (f64, f64),
) -> Result<CrackSet> {
    if n == 0 {
        return Err(FractureError::InvalidInput("n must be at least 1".into()));
    }
    let runs: Vec<(Point, Point)> = (0..n)
        .map(|i| {
            let (a, b) = interval(i as f64);
            (Point::new(a, 0.0), Point::new(b, 0.0))
        })
        .collect();
    let k = CrackSet::from_runs(lattice, &runs, snap_tol)?;
    // snapping must neither collapse a segment nor close a gap
    let per_run: Result<Vec<usize>> = runs
        .iter()
        .map(|&(a, b)| Ok(CrackSet::from_runs(lattice, &[(a, b)], snap_tol)?.len()))
        .collect();
    if per_run?.contains(&0) || k.component_count() != n as usize {
        return Err(FractureError::SnapTolerance {
            what: format!(
                "family with n={n} is not resolvable at lattice spacing {}",
                lattice.spacing
            ),
            error: k.snap_error(),
            tolerance: snap_tol,
        });
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn lat(spacing: f64) -> LatticeSpec {
        LatticeSpec::covering(Rect::new(0.0, 1.0, -1.0, 1.0), spacing).unwrap()
    }

    #[test]
    fn oscillating_one_is_half_segment() {
        let k = oscillating_crack(1, lat(1.0 / 64.0), 1e-12).unwrap();
        let segs = k.segments();
        let xmin = segs
            .iter()
            .map(|s| s.a.x.min(s.b.x))
            .fold(f64::INFINITY, f64::min);
        let xmax = segs.iter().map(|s| s.a.x.max(s.b.x)).fold(0.0, f64::max);
        assert_eq!((xmin, xmax), (0.0, 0.5));
        assert!(segs.iter().all(|s| s.a.y == 0.0 && s.b.y == 0.0));
    }

    #[test]
    fn oscillating_length_is_half() {
        for n in [1, 2, 4, 8, 16, 32] {
            let k = oscillating_crack(n, lat(1.0 / 64.0), 1e-12).unwrap();
            assert!((k.length() - 0.5).abs() < 1e-13, "n={n}");
            assert_eq!(k.snap_error(), 0.0);
        }
    }

    #[test]
    fn packed_two_snaps_with_recorded_error() {
        let spacing = 1.0 / 1024.0;
        let k = packed_crack(2, lat(spacing), spacing).unwrap();
        assert_eq!(k.component_count(), 2);
        let gap = (-2f64).exp();
        let expected_len = 1.0 - 2.0 * gap;
        assert!((k.length() - expected_len).abs() <= 2.0 * k.snap_error() + 1e-12);
        assert!(k.snap_error() > 0.0 && k.snap_error() <= 0.5 * spacing + 1e-15);
    }

    #[test]
    fn unresolvable_gap_is_rejected() {
        // e^{-5} is about 6.7e-3, far below a 1/16 lattice
        let r = packed_crack(5, lat(1.0 / 16.0), 1.0);
        assert!(matches!(r, Err(FractureError::SnapTolerance { .. })));
    }

    #[test]
    fn growing_segments() {
        let k = growing_segment(4, lat(1.0 / 64.0), 1e-12).unwrap();
        assert!((k.length() - 0.75).abs() < 1e-14);
        assert_eq!(k.component_count(), 1);
    }
}
