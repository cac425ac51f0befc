use crate::error::{FractureError, Result};
use crate::geometry::Point;
use crate::laplace::DirichletDatum;
use serde::{Deserialize, Serialize};

/// Spatial profiles `G_k` from a fixed library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    X1,
    X2,
    /// `+1` above `y = 1`, `−1` below `y = −1`, linear in between.
    Split,
    Constant {
        value: f64,
    },
    /// `Σ c · x^i · y^j` over `[c, i, j]` terms.
    Poly {
        terms: Vec<[f64; 3]>,
    },
}

impl DirichletDatum for Profile {
    fn value(&self, p: Point) -> f64 {
        match self {
            Profile::X1 => p.x,
            Profile::X2 => p.y,
            Profile::Split => p.y.clamp(-1.0, 1.0),
            Profile::Constant { value } => *value,
            Profile::Poly { terms } => terms
                .iter()
                .map(|&[c, i, j]| c * p.x.powi(i as i32) * p.y.powi(j as i32))
                .sum(),
        }
    }
}

/// Piecewise-linear weight through `(t, a)` knots, constant past the last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeWeight {
    pub knots: Vec<[f64; 2]>,
}

impl TimeWeight {
    /// `a(t) = slope · t`.
    pub fn ramp(slope: f64, t_end: f64) -> Self {
        Self {
            knots: vec![[0.0, 0.0], [t_end, slope * t_end]],
        }
    }

    pub fn zero() -> Self {
        Self {
            knots: vec![[0.0, 0.0]],
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0][0] {
            return k[0][1];
        }
        for w in k.windows(2) {
            let ([t0, a0], [t1, a1]) = (w[0], w[1]);
            if t <= t1 {
                return a0 + (a1 - a0) * (t - t0) / (t1 - t0);
            }
        }
        k[k.len() - 1][1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramTerm {
    pub profile: Profile,
    pub weight: TimeWeight,
}

/// `g(t) = Σ a_k(t) G_k` on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProgram {
    pub terms: Vec<ProgramTerm>,
    pub t_end: f64,
}

impl BoundaryProgram {
    /// `g(t) = slope · t · G`.
    pub fn ramp(profile: Profile, slope: f64, t_end: f64) -> Self {
        Self {
            terms: vec![ProgramTerm {
                profile,
                weight: TimeWeight::ramp(slope, t_end),
            }],
            t_end,
        }
    }

    pub fn zero(t_end: f64) -> Self {
        Self {
            terms: vec![ProgramTerm {
                profile: Profile::X2,
                weight: TimeWeight::zero(),
            }],
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(FractureError::config("program.t_end", "must be positive"));
        }
        if self.terms.is_empty() {
            return Err(FractureError::config(
                "program.terms",
                "at least one term is required",
            ));
        }
        for (k, term) in self.terms.iter().enumerate() {
            let knots = &term.weight.knots;
            let field = format!("program.terms[{k}].weight");
            if knots.is_empty() || knots[0][0] != 0.0 {
                return Err(FractureError::config(field, "first knot must be at t = 0"));
            }
            if knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                return Err(FractureError::config(
                    field,
                    "knot times must increase strictly",
                ));
            }
            if knots.iter().flatten().any(|v| !v.is_finite()) {
                return Err(FractureError::config(field, "knots must be finite"));
            }
            if knots[0][1] != 0.0 {
                return Err(FractureError::config(
                    field,
                    "g(0) = 0 requires a zero weight at t = 0",
                ));
            }
            if let Profile::Poly { terms } = &term.profile {
                if terms.iter().any(|&[c, i, j]| {
                    !c.is_finite() || i < 0.0 || j < 0.0 || i.fract() != 0.0 || j.fract() != 0.0
                }) {
                    return Err(FractureError::config(
                        format!("program.terms[{k}].profile"),
                        "polynomial exponents must be non-negative integers",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn coefficients(&self, t: f64) -> Vec<f64> {
        self.terms.iter().map(|term| term.weight.value(t)).collect()
    }

    pub fn profiles(&self) -> Vec<Profile> {
        self.terms.iter().map(|t| t.profile.clone()).collect()
    }

    /// Knot times inside `[0, T]`; `g` is linear in `t` between them.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|term| term.weight.knots.iter().map(|k| k[0]))
            .filter(|&t| t <= self.t_end)
            .chain([0.0, self.t_end])
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    pub fn at(&self, t: f64) -> ProgramDatum<'_> {
        ProgramDatum {
            program: self,
            coeffs: self.coefficients(t),
        }
    }
}

/// `g(t)` as a datum.
pub struct ProgramDatum<'a> {
    program: &'a BoundaryProgram,
    coeffs: Vec<f64>,
}

impl DirichletDatum for ProgramDatum<'_> {
    fn value(&self, p: Point) -> f64 {
        self.program
            .terms
            .iter()
            .zip(&self.coeffs)
            .map(|(term, a)| a * term.profile.value(p))
            .sum()
    }
}

/// Uniform time nodes `t_i = iδ`; the last step is shortened to end at `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub delta: f64,
    pub times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(delta: f64, t_end: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(FractureError::InvalidInput(format!(
                "time step must be positive, got {delta}"
            )));
        }
        let steps = (t_end / delta - 1e-9).ceil().max(1.0) as usize;
        let times = (0..=steps).map(|i| (i as f64 * delta).min(t_end)).collect();
        Ok(Self { delta, times })
    }

    /// Index of the step whose interval `[t_i, t_{i+1})` contains `t`.
    pub fn step_at(&self, t: f64) -> usize {
        let i = (t / self.delta + 1e-9).floor().max(0.0) as usize;
        i.min(self.times.len() - 1)
    }
}
