//! Newest-vertex bisection on a union-jack square grid.
//!
//! Each triangle stores its newest vertex first; the opposite edge is its
//! refinement edge. In the initial grid every refinement edge is a cell
//! diagonal shared by the two triangles of that cell, so the mesh is
//! compatibly divisible and the closure loop below terminates. All
//! descendants are similar to the initial right isosceles triangles.

use crate::geometry::{orient2d, Point};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tri {
    /// `v[0]` is the newest vertex, `(v[1], v[2])` the refinement edge.
    pub v: [usize; 3],
    /// Base grid cell containing the triangle.
    pub cell: usize,
    pub level: u32,
}

pub(crate) struct Refiner {
    pub pts: Vec<Point>,
    pub tris: Vec<Tri>,
    pub alive: Vec<bool>,
    mids: HashMap<(usize, usize), usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Refiner {
    /// `nx x ny` cells of side `h`; `anti_diagonal(i, j)` selects the
    /// `\` diagonal for cell `(i, j)`.
    pub fn union_jack(
        origin: Point,
        h: f64,
        nx: usize,
        ny: usize,
        anti_diagonal: impl Fn(usize, usize) -> bool,
    ) -> Self {
        let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                pts.push(Point::new(origin.x + i as f64 * h, origin.y + j as f64 * h));
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut tris = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                let cell = j * nx + i;
                if anti_diagonal(i, j) {
                    // diagonal b-d, right angles at a and c
                    tris.push(Tri {
                        v: [a, b, d],
                        cell,
                        level: 0,
                    });
                    tris.push(Tri {
                        v: [c, d, b],
                        cell,
                        level: 0,
                    });
                } else {
                    // diagonal a-c, right angles at b and d
                    tris.push(Tri {
                        v: [b, c, a],
                        cell,
                        level: 0,
                    });
                    tris.push(Tri {
                        v: [d, a, c],
                        cell,
                        level: 0,
                    });
                }
            }
        }
        let n = tris.len();
        let r = Self {
            pts,
            tris,
            alive: vec![true; n],
            mids: HashMap::new(),
        };
        debug_assert!(r.tris.iter().all(|t| r.signed_area(t) > 0.0));
        r
    }

    pub fn signed_area(&self, t: &Tri) -> f64 {
        0.5 * orient2d(self.pts[t.v[0]], self.pts[t.v[1]], self.pts[t.v[2]])
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let v = self.tris[t].v;
        [self.pts[v[0]], self.pts[v[1]], self.pts[v[2]]]
    }

    pub fn alive_indices(&self) -> Vec<usize> {
        (0..self.tris.len()).filter(|&t| self.alive[t]).collect()
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let k = key(a, b);
        if let Some(&m) = self.mids.get(&k) {
            return m;
        }
        let m = self.pts.len();
        self.pts.push(self.pts[a].midpoint(self.pts[b]));
        self.mids.insert(k, m);
        m
    }

    fn bisect(&mut self, t: usize) {
        debug_assert!(self.alive[t]);
        let Tri {
            v: [p, q, r],
            cell,
            level,
        } = self.tris[t];
        let m = self.midpoint(q, r);
        self.alive[t] = false;
        // both children keep counter-clockwise order
        self.tris.push(Tri {
            v: [m, p, q],
            cell,
            level: level + 1,
        });
        self.tris.push(Tri {
            v: [m, r, p],
            cell,
            level: level + 1,
        });
        self.alive.push(true);
        self.alive.push(true);
    }

    fn has_hanging_edge(&self, t: usize) -> bool {
        let [a, b, c] = self.tris[t].v;
        [(a, b), (b, c), (c, a)]
            .iter()
            .any(|&(x, y)| self.mids.contains_key(&key(x, y)))
    }

    /// Bisect every marked triangle once, then restore conformity.
    pub fn refine(&mut self, marked: &[usize]) {
        for &t in marked {
            if self.alive[t] {
                self.bisect(t);
            }
        }
        self.close();
    }

    fn close(&mut self) {
        loop {
            let mut changed = false;
            let mut t = 0;
            while t < self.tris.len() {
                if self.alive[t] && self.has_hanging_edge(t) {
                    self.bisect(t);
                    changed = true;
                }
                t += 1;
            }
            if !changed {
                break;
            }
        }
    }

    #[cfg(test)]
    pub fn max_level(&self) -> u32 {
        self.alive_indices()
            .iter()
            .map(|&t| self.tris[t].level)
            .max()
            .unwrap_or(0)
    }
}
