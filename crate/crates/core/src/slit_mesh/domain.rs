use crate::error::{FractureError, Result};
use crate::geometry::{Point, Rect};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

/// Relatively open interval on one side of the rectangle, parametrized by
/// the coordinate that varies along that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInterval {
    pub side: Side,
    pub from: f64,
    pub to: f64,
}

impl BoundaryInterval {
    pub fn whole(side: Side, rect: &Rect) -> Self {
        let (from, to) = side_range(side, rect);
        Self { side, from, to }
    }
}

fn side_range(side: Side, rect: &Rect) -> (f64, f64) {
    match side {
        Side::Bottom | Side::Top => (rect.x0, rect.x1),
        Side::Left | Side::Right => (rect.y0, rect.y1),
    }
}

/// Rectangular domain with its Dirichlet part; the Neumann part is the
/// rest of the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub rect: Rect,
    pub dirichlet: Vec<BoundaryInterval>,
}

impl DomainSpec {
    pub fn new(rect: Rect, dirichlet: Vec<BoundaryInterval>) -> Result<Self> {
        let d = Self { rect, dirichlet };
        d.validate()?;
        Ok(d)
    }

    /// `(0,1) x (-1,1)` clamped on the top and bottom sides.
    pub fn strip() -> Self {
        let rect = Rect::new(0.0, 1.0, -1.0, 1.0);
        Self {
            dirichlet: vec![
                BoundaryInterval::whole(Side::Bottom, &rect),
                BoundaryInterval::whole(Side::Top, &rect),
            ],
            rect,
        }
    }

    /// Dirichlet condition on the whole boundary.
    pub fn clamped(rect: Rect) -> Self {
        Self {
            dirichlet: [Side::Bottom, Side::Right, Side::Top, Side::Left]
                .iter()
                .map(|&s| BoundaryInterval::whole(s, &rect))
                .collect(),
            rect,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rect.width() > 0.0 && self.rect.height() > 0.0) {
            return Err(FractureError::config(
                "domain",
                "rectangle must have positive extent",
            ));
        }
        for (k, iv) in self.dirichlet.iter().enumerate() {
            let (lo, hi) = side_range(iv.side, &self.rect);
            if !(iv.from < iv.to) || iv.from < lo || iv.to > hi {
                return Err(FractureError::config(
                    format!("dirichlet[{k}]"),
                    format!(
                        "interval {:?} [{}, {}] must satisfy {lo} <= from < to <= {hi}",
                        iv.side, iv.from, iv.to
                    ),
                ));
            }
            for (l, other) in self.dirichlet.iter().enumerate().take(k) {
                if other.side == iv.side && iv.from < other.to && other.from < iv.to {
                    return Err(FractureError::config(
                        format!("dirichlet[{k}]"),
                        format!(
                            "interval {:?} [{}, {}] overlaps dirichlet[{l}] [{}, {}]",
                            iv.side, iv.from, iv.to, other.from, other.to
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Side the boundary point lies on (corners resolve to bottom/top).
    pub fn side_of(&self, p: Point, tol: f64) -> Option<Side> {
        let r = &self.rect;
        if (p.y - r.y0).abs() <= tol {
            Some(Side::Bottom)
        } else if (p.y - r.y1).abs() <= tol {
            Some(Side::Top)
        } else if (p.x - r.x0).abs() <= tol {
            Some(Side::Left)
        } else if (p.x - r.x1).abs() <= tol {
            Some(Side::Right)
        } else {
            None
        }
    }

    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        self.side_of(p, tol).is_some()
    }

    /// Whether a boundary point lies in the (open) Dirichlet part.
    pub fn is_dirichlet(&self, p: Point, tol: f64) -> bool {
        let Some(side) = self.side_of(p, tol) else {
            return false;
        };
        let s = match side {
            Side::Bottom | Side::Top => p.x,
            Side::Left | Side::Right => p.y,
        };
        self.dirichlet
            .iter()
            .any(|iv| iv.side == side && s > iv.from + tol && s < iv.to - tol)
    }

    /// Outward unit normal at a boundary point.
    pub fn outward_normal(&self, side: Side) -> Point {
        match side {
            Side::Bottom => Point::new(0.0, -1.0),
            Side::Top => Point::new(0.0, 1.0),
            Side::Left => Point::new(-1.0, 0.0),
            Side::Right => Point::new(1.0, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_intervals_are_named() {
        let rect = Rect::new(0.0, 1.0, -1.0, 1.0);
        let bad = DomainSpec::new(
            rect,
            vec![
                BoundaryInterval {
                    side: Side::Top,
                    from: 0.0,
                    to: 0.6,
                },
                BoundaryInterval {
                    side: Side::Top,
                    from: 0.5,
                    to: 1.0,
                },
            ],
        );
        match bad {
            Err(FractureError::Config { field, message }) => {
                assert_eq!(field, "dirichlet[1]");
                assert!(message.contains("overlaps dirichlet[0]"));
            }
            other => panic!("expected config error, got {other:?}"),
        }
        // touching intervals are fine
        assert!(DomainSpec::new(
            rect,
            vec![
                BoundaryInterval {
                    side: Side::Top,
                    from: 0.0,
                    to: 0.5
                },
                BoundaryInterval {
                    side: Side::Top,
                    from: 0.5,
                    to: 1.0
                },
            ],
        )
        .is_ok());
    }

    #[test]
    fn dirichlet_membership_is_open() {
        let d = DomainSpec::strip();
        assert!(d.is_dirichlet(Point::new(0.5, 1.0), 1e-12));
        assert!(!d.is_dirichlet(Point::new(0.0, 0.5), 1e-12));
        assert!(!d.is_dirichlet(Point::new(0.0, 1.0), 1e-12));
    }
}
