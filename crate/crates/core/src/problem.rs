//! Coefficient primitives and Cauchy problems.
//!
//! The equation `y' + p'(x) y = q'(x)`, `y(a) = y0` is described entirely by
//! the continuous primitives `p` and `q`. Derivatives are optional: the
//! surrogate solver never touches them, only the reference quadrature, the
//! Runge-Kutta baseline and [`ProblemSpec::validate`] do.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Shared real function of one variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Direction of a monotone piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
}

impl Monotonicity {
    fn reversed(self) -> Self {
        match self {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            Monotonicity::Constant => Monotonicity::Constant,
        }
    }
}

/// How an outer function acts on the ordering of values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// Breakpoints between which a function is monotone.
///
/// `breakpoints` strictly increase and `directions[i]` describes the piece
/// `[breakpoints[i], breakpoints[i + 1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonePieces {
    breakpoints: Vec<f64>,
    directions: Vec<Monotonicity>,
}

impl MonotonePieces {
    pub fn new(breakpoints: Vec<f64>, directions: Vec<Monotonicity>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidMonotonePieces(
                "at least two breakpoints are required".into(),
            ));
        }
        if directions.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidMonotonePieces(format!(
                "{} breakpoints need {} directions, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                directions.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidMonotonePieces(
                "breakpoints must be finite".into(),
            ));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMonotonePieces(format!(
                "breakpoints must strictly increase ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            breakpoints,
            directions,
        })
    }

    /// A single monotone piece spanning `[lo, hi]`.
    pub fn single(lo: f64, hi: f64, direction: Monotonicity) -> Result<Self> {
        Self::new(vec![lo, hi], vec![direction])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn directions(&self) -> &[Monotonicity] {
        &self.directions
    }

    fn reversed(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            directions: self.directions.iter().map(|d| d.reversed()).collect(),
        }
    }
}

/// A continuous primitive together with optional derivative and metadata.
///
/// The primitive must be finite everywhere on its interval, including at the
/// declared singular points where the derivative fails to exist.
#[derive(Clone)]
pub struct CoefficientFn {
    primitive: RealFn,
    derivative: Option<RealFn>,
    singular_points: Vec<f64>,
    monotone: Option<MonotonePieces>,
}

impl CoefficientFn {
    pub fn new<F>(primitive: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            primitive: Arc::new(primitive),
            derivative: None,
            singular_points: Vec::new(),
            monotone: None,
        }
    }

    /// The constant primitive `c`, with derivative 0.
    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c).with_derivative(|_| 0.0)
    }

    /// The affine primitive `slope * x + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::new(move |x| slope * x + intercept).with_derivative(move |_| slope)
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Declares the points where the derivative is undefined or unbounded.
    pub fn with_singular_points(mut self, points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidSingularPoints(
                "singular points must be finite".into(),
            ));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSingularPoints(format!(
                "singular points must strictly increase ({} >= {})",
                w[0], w[1]
            )));
        }
        self.singular_points = points;
        Ok(self)
    }

    pub fn with_monotone_pieces(mut self, pieces: MonotonePieces) -> Self {
        self.monotone = Some(pieces);
        self
    }

    /// Evaluates the primitive.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.primitive)(x)
    }

    /// Evaluates the derivative, if one was supplied.
    #[inline]
    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn monotone_pieces(&self) -> Option<&MonotonePieces> {
        self.monotone.as_ref()
    }

    /// Builds `x -> outer(f(x))`.
    ///
    /// Singular points carry over. Monotone pieces carry over when `outer` is
    /// monotone, with directions flipped for a reversing `outer`. The
    /// derivative is dropped.
    pub fn compose<G>(&self, outer: G, orientation: Orientation) -> CoefficientFn
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = Arc::clone(&self.primitive);
        CoefficientFn {
            primitive: Arc::new(move |x| outer(inner(x))),
            derivative: None,
            singular_points: self.singular_points.clone(),
            monotone: self.monotone.as_ref().map(|m| match orientation {
                Orientation::Preserving => m.clone(),
                Orientation::Reversing => m.reversed(),
            }),
        }
    }

    /// Pulls the function on `[a, b]` back to `[0, 1]` via `x = a + (b - a) u`.
    fn pulled_back(&self, a: f64, b: f64) -> CoefficientFn {
        let width = b - a;
        let to_unit = |x: f64| {
            if x == a {
                0.0
            } else if x == b {
                1.0
            } else {
                (x - a) / width
            }
        };
        let from_unit = move |u: f64| {
            if u == 1.0 {
                b
            } else {
                a + width * u
            }
        };
        let primitive = Arc::clone(&self.primitive);
        let derivative = self.derivative.as_ref().map(|d| {
            let d = Arc::clone(d);
            Arc::new(move |u: f64| width * d(from_unit(u))) as RealFn
        });
        CoefficientFn {
            primitive: Arc::new(move |u| primitive(from_unit(u))),
            derivative,
            singular_points: self.singular_points.iter().map(|&s| to_unit(s)).collect(),
            monotone: self.monotone.as_ref().map(|m| MonotonePieces {
                breakpoints: m.breakpoints.iter().map(|&x| to_unit(x)).collect(),
                directions: m.directions.clone(),
            }),
        }
    }
}

impl fmt::Debug for CoefficientFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientFn")
            .field("has_derivative", &self.derivative.is_some())
            .field("singular_points", &self.singular_points)
            .field("monotone", &self.monotone)
            .finish_non_exhaustive()
    }
}

/// Which coefficient a diagnostic refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    P,
    Q,
}

impl Coefficient {
    pub fn name(self) -> &'static str {
        match self {
            Coefficient::P => "p",
            Coefficient::Q => "q",
        }
    }
}

/// A declared derivative that disagrees with finite differences of the
/// primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub coefficient: Coefficient,
    /// Number of grid points where the check failed.
    pub mismatches: usize,
    /// Location of the largest discrepancy.
    pub worst_x: f64,
    pub finite_difference: f64,
    pub declared: f64,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "derivative of {} disagrees with the primitive at {} grid points; worst at x = {}: \
             finite difference {}, declared {}",
            self.coefficient.name(),
            self.mismatches,
            self.worst_x,
            self.finite_difference,
            self.declared
        )
    }
}

/// Cauchy problem `y' + p'(x) y = q'(x)`, `y(a) = y0` on `[a, b]`.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub p: CoefficientFn,
    pub q: CoefficientFn,
    pub y0: f64,
    interval: (f64, f64),
}

const VALIDATE_CELLS: usize = 1024;
const VALIDATE_EXCLUSION: f64 = 1.0 / 1024.0;
const VALIDATE_STEP: f64 = 1.0 / 1_048_576.0;
const VALIDATE_RTOL: f64 = 1e-5;

impl ProblemSpec {
    pub fn new(p: CoefficientFn, q: CoefficientFn, y0: f64, interval: (f64, f64)) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        if !y0.is_finite() {
            return Err(Error::NonFiniteInitialValue(y0));
        }
        for (name, f) in [("p", &p), ("q", &q)] {
            if let Some(s) = f.singular_points.iter().find(|s| !(a..=b).contains(*s)) {
                return Err(Error::InvalidSingularPoints(format!(
                    "singular point {s} of {name} lies outside [{a}, {b}]"
                )));
            }
            if let Some(m) = &f.monotone {
                let bp = &m.breakpoints;
                if bp[0] != a || bp[bp.len() - 1] != b {
                    return Err(Error::InvalidMonotonePieces(format!(
                        "pieces of {name} span [{}, {}] but the interval is [{a}, {b}]",
                        bp[0],
                        bp[bp.len() - 1]
                    )));
                }
            }
        }
        Ok(Self { p, q, y0, interval })
    }

    /// A problem posed on `[0, 1]`.
    pub fn on_unit_interval(p: CoefficientFn, q: CoefficientFn, y0: f64) -> Result<Self> {
        Self::new(p, q, y0, (0.0, 1.0))
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn is_unit(&self) -> bool {
        self.interval == (0.0, 1.0)
    }

    pub(crate) fn require_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            let (a, b) = self.interval;
            Err(Error::NotNormalized { a, b })
        }
    }

    /// Merged, sorted singular points of `p` and `q`.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .p
            .singular_points
            .iter()
            .chain(&self.q.singular_points)
            .copied()
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Maps the problem onto `[0, 1]` via `x = a + (b - a) u`.
    ///
    /// Solutions correspond pointwise: `y(a + (b - a) u) = y_unit(u)`. A
    /// problem already on `[0, 1]` is returned unchanged.
    pub fn normalize(&self) -> Result<ProblemSpec> {
        if self.is_unit() {
            return Ok(self.clone());
        }
        let (a, b) = self.interval;
        ProblemSpec::new(
            self.p.pulled_back(a, b),
            self.q.pulled_back(a, b),
            self.y0,
            (0.0, 1.0),
        )
    }

    /// Checks the primitives for finiteness and the declared derivatives for
    /// consistency with central differences.
    ///
    /// A non-finite primitive is a hard error. Derivative mismatches are
    /// reported as diagnostics, one per coefficient, since the surrogate
    /// method never reads the derivative.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<Vec<Diagnostic>> {
        let (a, b) = self.interval;
        let width = b - a;
        let singular = self.singular_points();

        let mut probes: Vec<f64> = (0..=VALIDATE_CELLS)
            .map(|j| a + width * j as f64 / VALIDATE_CELLS as f64)
            .collect();
        probes[VALIDATE_CELLS] = b;
        let nudge = width * VALIDATE_STEP;
        for &s in &singular {
            probes.extend([s, (s - nudge).max(a), (s + nudge).min(b)]);
        }
        for (coefficient, f) in [(Coefficient::P, &self.p), (Coefficient::Q, &self.q)] {
            if let Some(&x) = probes.iter().find(|&&x| !f.value(x).is_finite()) {
                return Err(Error::NonFinitePrimitive {
                    coefficient: coefficient.name(),
                    x,
                    value: f.value(x),
                });
            }
        }

        let exclusion = width * VALIDATE_EXCLUSION;
        let h = width * VALIDATE_STEP;
        let mut diagnostics = Vec::new();
        for (coefficient, f) in [(Coefficient::P, &self.p), (Coefficient::Q, &self.q)] {
            if !f.has_derivative() {
                continue;
            }
            let mut mismatches = 0;
            let mut worst: Option<(f64, f64, f64, f64)> = None;
            for j in 0..VALIDATE_CELLS {
                let x = a + width * (j as f64 + 0.5) / VALIDATE_CELLS as f64;
                if singular.iter().any(|s| (x - s).abs() < exclusion) {
                    continue;
                }
                let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                let declared = f.derivative(x).unwrap_or(f64::NAN);
                let gap = (fd - declared).abs();
                if !(gap <= VALIDATE_RTOL * declared.abs().max(1.0)) {
                    mismatches += 1;
                    if worst.is_none_or(|w| !(gap <= w.0)) {
                        worst = Some((gap, x, fd, declared));
                    }
                }
            }
            if let Some((_, worst_x, finite_difference, declared)) = worst {
                diagnostics.push(Diagnostic {
                    coefficient,
                    mismatches,
                    worst_x,
                    finite_difference,
                    declared,
                });
            }
        }
        Ok(diagnostics)
    }
}
