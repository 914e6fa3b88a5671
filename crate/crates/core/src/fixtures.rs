//! Canonical test problems with singular coefficients.
//!
//! * `example1`: a sawtooth primitive `q` whose derivative is conditionally
//!   but not absolutely integrable near 0 (`p = 0`).
//! * `example2`: the same `q` with `e^p` piecewise linear through
//!   `(2^-n, beta_n)`, so that `q' e^p` is again only conditionally
//!   integrable.
//! * `example3`: `y' + y / (2 sqrt x) = 1 + 1 / sqrt x`, `y(0) = 0`, solved by
//!   `y = 2 sqrt x`.
//! * `example4`: three-branch coefficients with singular derivatives at 0,
//!   1/3 and 2/3; the solution is continuous but not differentiable there.
//!
//! The sawtooth constructions are infinite toward 0. They are truncated at a
//! caller-chosen depth `m` and set to zero on `[0, 2^-(m+1)]`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{CoefficientFn, MonotonePieces, Monotonicity, ProblemSpec, RealFn};
use crate::reference::SegmentIntegral;

/// Deepest supported sawtooth truncation; `2^-(m+1)` stays a normal float.
pub const MAX_DEPTH: usize = 1000;

/// Default truncation depth used by the command line.
pub const DEFAULT_DEPTH: usize = 40;

const THIRD: f64 = 1.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

/// Problem identifiers accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixtureId {
    Example1,
    Example2,
    Example3,
    Example4,
}

impl FixtureId {
    pub const ALL: [FixtureId; 4] = [
        FixtureId::Example1,
        FixtureId::Example2,
        FixtureId::Example3,
        FixtureId::Example4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureId::Example1 => "example1",
            FixtureId::Example2 => "example2",
            FixtureId::Example3 => "example3",
            FixtureId::Example4 => "example4",
        }
    }

    /// Builds the fixture; `depth` only affects the sawtooth examples.
    pub fn build(self, depth: usize) -> Result<Fixture> {
        match self {
            FixtureId::Example1 => example1_sawtooth(depth),
            FixtureId::Example2 => example2_pair(&BetaSchedule::default(), depth),
            FixtureId::Example3 => Ok(example3()),
            FixtureId::Example4 => Ok(example4()),
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown problem `{s}`")))
    }
}

/// A problem with optional closed-form solution and dyadic segment integrals.
#[derive(Clone)]
pub struct Fixture {
    pub id: FixtureId,
    pub spec: ProblemSpec,
    pub closed_form: Option<RealFn>,
    /// Closed-form integrals of `q' e^p` over `[2^-(n+1), 2^-n]`, `n = 1..=m`.
    pub segments: Option<Vec<SegmentIntegral>>,
    pub notes: String,
}

impl Fixture {
    pub fn closed_form(&self, x: f64) -> Option<f64> {
        self.closed_form.as_ref().map(|y| y(x))
    }

    /// `|y'(x) + p'(x) y(x) - q'(x)|` for the closed form, with `y'` from a
    /// central difference of step `h`.
    pub fn ode_residual(&self, x: f64, h: f64) -> Option<f64> {
        let y = self.closed_form.as_ref()?;
        let dy = (y(x + h) - y(x - h)) / (2.0 * h);
        let dp = self.spec.p.derivative(x)?;
        let dq = self.spec.q.derivative(x)?;
        Some((dy + dp * y(x) - dq).abs())
    }
}

impl fmt::Debug for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fixture")
            .field("id", &self.id)
            .field("spec", &self.spec)
            .field("has_closed_form", &self.closed_form.is_some())
            .field("segments", &self.segments.as_ref().map(Vec::len))
            .field("notes", &self.notes)
            .finish()
    }
}

/// `y' + y / (2 sqrt x) = 1 + 1 / sqrt x` on `[0, 1]`, `y(0) = 0`.
pub fn example3() -> Fixture {
    let increasing = || MonotonePieces::single(0.0, 1.0, Monotonicity::Increasing).expect("valid");
    let p = CoefficientFn::new(f64::sqrt)
        .with_derivative(|x| 0.5 / x.sqrt())
        .with_singular_points(vec![0.0])
        .expect("sorted")
        .with_monotone_pieces(increasing());
    let q = CoefficientFn::new(|x| x + 2.0 * x.sqrt())
        .with_derivative(|x| 1.0 + 1.0 / x.sqrt())
        .with_singular_points(vec![0.0])
        .expect("sorted")
        .with_monotone_pieces(increasing());
    Fixture {
        id: FixtureId::Example3,
        spec: ProblemSpec::on_unit_interval(p, q, 0.0).expect("valid problem"),
        closed_form: Some(Arc::new(|x| 2.0 * x.sqrt())),
        segments: None,
        notes: "p = sqrt(x), q = x + 2 sqrt(x), y0 = 0; exact solution 2 sqrt(x), \
                not differentiable at 0"
            .into(),
    }
}

fn branch(x: f64) -> u8 {
    if x <= THIRD {
        0
    } else if x <= TWO_THIRDS {
        1
    } else {
        2
    }
}

/// Three-branch problem with singular derivatives at 0, 1/3 and 2/3.
pub fn example4() -> Fixture {
    let sqrt3 = 3f64.sqrt();
    let pieces = |dirs: [Monotonicity; 3]| {
        MonotonePieces::new(vec![0.0, THIRD, TWO_THIRDS, 1.0], dirs.to_vec()).expect("valid")
    };
    let up_down_up = [
        Monotonicity::Increasing,
        Monotonicity::Decreasing,
        Monotonicity::Increasing,
    ];
    let singular = vec![0.0, THIRD, TWO_THIRDS];

    let p = CoefficientFn::new(move |x| match branch(x) {
        0 => x.sqrt(),
        1 => (TWO_THIRDS - x) * sqrt3,
        _ => (x - TWO_THIRDS).max(0.0).sqrt(),
    })
    .with_derivative(move |x| match branch(x) {
        0 => 0.5 / x.sqrt(),
        1 => -sqrt3,
        _ => 0.5 / (x - TWO_THIRDS).sqrt(),
    })
    .with_singular_points(singular.clone())
    .expect("sorted")
    .with_monotone_pieces(pieces(up_down_up));

    let q = CoefficientFn::new(move |x| match branch(x) {
        0 => 0.5 * x + x.sqrt() - TWO_THIRDS,
        1 => -x * (2.0 + sqrt3) + 1.5 * x * x + 2.0 / sqrt3,
        _ => 0.5 * x + (x - TWO_THIRDS).max(0.0).sqrt() - 1.0,
    })
    .with_derivative(move |x| match branch(x) {
        0 => 0.5 * (1.0 + 1.0 / x.sqrt()),
        1 => -2.0 - sqrt3 + 3.0 * x,
        _ => 0.5 * (1.0 + 1.0 / (x - TWO_THIRDS).sqrt()),
    })
    .with_singular_points(singular)
    .expect("sorted")
    .with_monotone_pieces(pieces(up_down_up));

    Fixture {
        id: FixtureId::Example4,
        spec: ProblemSpec::on_unit_interval(p, q, 0.0).expect("valid problem"),
        closed_form: Some(Arc::new(move |x| match branch(x) {
            0 => x.sqrt(),
            1 => sqrt3 * (TWO_THIRDS - x),
            _ => (x - TWO_THIRDS).max(0.0).sqrt(),
        })),
        segments: None,
        notes: "piecewise p, q on [0,1/3], [1/3,2/3], [2/3,1], y0 = 0; exact solution \
                continuous with corners at 0, 1/3, 2/3"
            .into(),
    }
}

/// Values `beta_n = e^{p(2^-n)}`, `n >= 1`, for [`example2_pair`].
#[derive(Clone, Debug, PartialEq, Default)]
pub enum BetaSchedule {
    /// `beta_n = 1 + 2^-n`. Distinct from 1 in `f64` only for `n <= 52`, so
    /// [`example2_pair`] accepts depths up to 51 with this schedule.
    #[default]
    Geometric,
    /// `beta_n = 1 + 1/n`.
    Harmonic,
    /// Explicit values `beta_1, beta_2, ...`.
    Custom(Vec<f64>),
}

impl BetaSchedule {
    /// `beta_n` for `n >= 1`, if defined.
    pub fn beta(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        match self {
            BetaSchedule::Geometric => Some(1.0 + (-(n as f64)).exp2()),
            BetaSchedule::Harmonic => Some(1.0 + 1.0 / n as f64),
            BetaSchedule::Custom(values) => values.get(n - 1).copied(),
        }
    }

    /// Checks `beta_1 >= beta_2 >= ... >= beta_count > 1`.
    fn check(&self, count: usize) -> Result<Vec<f64>> {
        let values: Vec<f64> = (1..=count)
            .map(|n| {
                self.beta(n).ok_or_else(|| {
                    Error::InvalidArgument(format!("beta schedule has no entry for n = {n}"))
                })
            })
            .collect::<Result<_>>()?;
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 1.0 && v.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "beta_{} = {v} must be finite and greater than 1",
                i + 1
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!(
                "beta schedule must not increase (beta_{} = {} < beta_{} = {})",
                i + 1,
                values[i],
                i + 2,
                values[i + 1]
            )));
        }
        Ok(values)
    }
}

/// Dyadic segment `[2^-(n+1), 2^-n]` containing `x`, for `0 < x < 1`.
fn segment_of(x: f64) -> usize {
    let mut n = (-x.log2()).floor().max(0.0) as usize;
    while n > 0 && (-(n as f64)).exp2() < x {
        n -= 1;
    }
    while (-(n as f64 + 1.0)).exp2() > x {
        n += 1;
    }
    n
}

struct Segment {
    left: f64,
    mid: f64,
    right: f64,
}

fn segment(n: usize) -> Segment {
    let right = (-(n as f64)).exp2();
    let left = 0.5 * right;
    Segment {
        left,
        mid: 1.5 * left,
        right,
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if (1..=MAX_DEPTH).contains(&depth) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "depth must lie in 1..={MAX_DEPTH}, got {depth}"
        )))
    }
}

/// Sawtooth with zeros at `2^-n` and peak `1/n` at the midpoint of
/// `[2^-(n+1), 2^-n]`, for `n = 1..=depth`.
fn sawtooth(depth: usize) -> CoefficientFn {
    let value = move |x: f64| {
        if !(x > 0.0 && x < 0.5) {
            return 0.0;
        }
        let n = segment_of(x);
        if n == 0 || n > depth {
            return 0.0;
        }
        let s = segment(n);
        let peak = 1.0 / n as f64;
        let half = s.mid - s.left;
        if x <= s.mid {
            peak * (x - s.left) / half
        } else {
            peak * (s.right - x) / half
        }
    };
    let slope = move |x: f64| {
        if !(x > 0.0 && x < 0.5) {
            return 0.0;
        }
        let n = segment_of(x);
        if n == 0 || n > depth {
            return 0.0;
        }
        let s = segment(n);
        let rate = 1.0 / (n as f64 * (s.mid - s.left));
        if x < s.mid {
            rate
        } else {
            -rate
        }
    };

    let mut breakpoints = vec![0.0];
    let mut directions = vec![Monotonicity::Constant];
    for n in (1..=depth).rev() {
        let s = segment(n);
        breakpoints.extend([s.left, s.mid]);
        directions.extend([Monotonicity::Increasing, Monotonicity::Decreasing]);
    }
    breakpoints.extend([0.5, 1.0]);
    directions.push(Monotonicity::Constant);

    let mut singular = breakpoints[..breakpoints.len() - 1].to_vec();
    singular.dedup();

    CoefficientFn::new(value)
        .with_derivative(slope)
        .with_singular_points(singular)
        .expect("sorted")
        .with_monotone_pieces(MonotonePieces::new(breakpoints, directions).expect("valid"))
}

/// Sawtooth source term with `p = 0`: `q'` is integrable but `|q'|` is not.
pub fn example1_sawtooth(depth: usize) -> Result<Fixture> {
    check_depth(depth)?;
    let segments = (1..=depth)
        .map(|n| {
            let s = segment(n);
            SegmentIntegral {
                index: n,
                left: s.left,
                right: s.right,
                signed: 0.0,
                absolute: 2.0 / n as f64,
            }
        })
        .collect();
    Ok(Fixture {
        id: FixtureId::Example1,
        spec: ProblemSpec::on_unit_interval(CoefficientFn::constant(0.0), sawtooth(depth), 0.0)?,
        closed_form: None,
        segments: Some(segments),
        notes: format!("sawtooth q with peaks 1/n on [2^-(n+1), 2^-n], n = 1..={depth}; p = 0"),
    })
}

/// Sawtooth `q` paired with `e^p` linear on each dyadic segment through
/// `(2^-n, beta_n)`.
pub fn example2_pair(schedule: &BetaSchedule, depth: usize) -> Result<Fixture> {
    check_depth(depth)?;
    let betas = Arc::new(schedule.check(depth + 1)?);

    // e^p and its slope; linear from 1 at 0 up to beta_{m+1}, constant beta_1 on [1/2, 1].
    let shape = {
        let betas = Arc::clone(&betas);
        move |x: f64| -> (f64, f64) {
            if x >= 0.5 {
                return (betas[0], 0.0);
            }
            let floor = segment(depth + 1).right;
            if x <= floor {
                let slope = (betas[depth] - 1.0) / floor;
                return (1.0 + slope * x, slope);
            }
            let n = segment_of(x);
            let s = segment(n);
            let (lo, hi) = (betas[n], betas[n - 1]);
            let slope = (hi - lo) / (s.right - s.left);
            (lo + slope * (x - s.left), slope)
        }
    };
    let value_shape = shape.clone();
    let p = CoefficientFn::new(move |x| value_shape(x).0.ln())
        .with_derivative(move |x| {
            let (e, de) = shape(x);
            de / e
        })
        .with_singular_points(
            std::iter::once(0.0)
                .chain((1..=depth + 1).rev().map(|n| segment(n).right))
                .collect(),
        )?
        .with_monotone_pieces(MonotonePieces::new(
            vec![0.0, 0.5, 1.0],
            vec![Monotonicity::Increasing, Monotonicity::Constant],
        )?);

    let segments = (1..=depth)
        .map(|n| {
            let s = segment(n);
            let (right, left) = (betas[n - 1], betas[n]);
            SegmentIntegral {
                index: n,
                left: s.left,
                right: s.right,
                signed: (left - right) / (2.0 * n as f64),
                absolute: (left + right) / n as f64,
            }
        })
        .collect();

    Ok(Fixture {
        id: FixtureId::Example2,
        spec: ProblemSpec::on_unit_interval(p, sawtooth(depth), 0.0)?,
        closed_form: None,
        segments: Some(segments),
        notes: format!(
            "sawtooth q with e^p piecewise linear through (2^-n, beta_n), depth {depth}, {schedule:?} schedule"
        ),
    })
}
