//! Classical fixed-step RK4 on `y' = q'(t) - p'(t) y`.
//!
//! Used as a baseline to show how a pointwise method behaves when the
//! coefficients blow up. Non-finite stage values are reported, not
//! propagated.

use crate::error::{Error, Result};
use crate::interp::check_unit;
use crate::problem::ProblemSpec;

/// Where a non-finite value first appeared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonFiniteStage {
    /// Zero-based step index.
    pub step: usize,
    /// Stage number, 1 through 4.
    pub stage: u8,
    /// Abscissa at which the stage was evaluated.
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rk4Outcome {
    Finite(f64),
    NonFinite(NonFiniteStage),
}

impl Rk4Outcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            Rk4Outcome::Finite(v) => Some(*v),
            Rk4Outcome::NonFinite(_) => None,
        }
    }
}

/// RK4 from `0` with `y(0) = y0` to `x` with step `h` (last step shortened).
pub fn rk4_baseline(spec: &ProblemSpec, h: f64, x: f64) -> Result<Rk4Outcome> {
    rk4_from(spec, 0.0, spec.y0, h, x)
}

/// RK4 starting from an arbitrary point `t0` with value `y_start`.
pub fn rk4_from(spec: &ProblemSpec, t0: f64, y_start: f64, h: f64, x: f64) -> Result<Rk4Outcome> {
    spec.require_unit()?;
    check_unit(t0)?;
    check_unit(x)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    if x < t0 {
        return Err(Error::InvalidArgument(format!(
            "end point {x} precedes start {t0}"
        )));
    }
    if !spec.p.has_derivative() {
        return Err(Error::MissingDerivative("p"));
    }
    if !spec.q.has_derivative() {
        return Err(Error::MissingDerivative("q"));
    }
    let rhs = |t: f64, y: f64| {
        spec.q.derivative(t).unwrap_or(f64::NAN) - spec.p.derivative(t).unwrap_or(f64::NAN) * y
    };

    let steps = ((x - t0) / h - 1e-9).ceil().max(0.0) as usize;
    let mut y = y_start;
    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let dt = if step + 1 == steps { x - t } else { h };
        let report = |stage: u8, t: f64| Rk4Outcome::NonFinite(NonFiniteStage { step, stage, t });

        let k1 = rhs(t, y);
        if !k1.is_finite() {
            return Ok(report(1, t));
        }
        let k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
        if !k2.is_finite() {
            return Ok(report(2, t + 0.5 * dt));
        }
        let k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
        if !k3.is_finite() {
            return Ok(report(3, t + 0.5 * dt));
        }
        let k4 = rhs(t + dt, y + dt * k3);
        if !k4.is_finite() {
            return Ok(report(4, t + dt));
        }
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !y.is_finite() {
            return Ok(report(4, t + dt));
        }
    }
    Ok(Rk4Outcome::Finite(y))
}
