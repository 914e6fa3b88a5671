//! Verification paths: the exact solution formula evaluated by quadrature,
//! a fixed-step RK4 baseline, and partial sums of improper integrals over
//! dyadic segments.
//!
//! These need the derivative fields of the coefficients; the surrogate solver
//! does not.

mod hake;
mod quadrature;
mod rk4;

pub use hake::{cauchy_gap, hake_sequence, hake_series, HakePartialSums, SegmentIntegral};
pub use quadrature::{
    gauss_kronrod_15, integrate_adaptive, integrate_with_singularities, QuadResult,
};
pub use rk4::{rk4_baseline, rk4_from, NonFiniteStage, Rk4Outcome};

use crate::error::{Error, Result};
use crate::interp::check_unit;
use crate::problem::ProblemSpec;

/// Settings for the singularity-aware quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Error target per integration segment.
    pub abs_tol: f64,
    /// Maximum bisection depth of the adaptive rule.
    pub max_depth: u32,
    /// Width below which geometric refinement toward a singular point stops.
    pub singularity_halo: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 50,
            singularity_halo: (-40f64).exp2(),
        }
    }
}

impl QuadratureConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidArgument(
                "max_depth must be at least 1".into(),
            ));
        }
        if !(self.singularity_halo > 0.0 && self.singularity_halo < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "singularity_halo must lie in (0, 1), got {}",
                self.singularity_halo
            )));
        }
        Ok(())
    }
}

/// Evaluates `y(x) = y0 e^{p(0) - p(x)} + e^{-p(x)} int_0^x q'(t) e^{p(t)} dt`.
///
/// The integral is the improper limit over subintervals between declared
/// singular points, so it exists for integrands that are Henstock but not
/// Lebesgue integrable as long as those limits do.
pub fn exact_via_formula(spec: &ProblemSpec, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    spec.require_unit()?;
    check_unit(x)?;
    if !spec.q.has_derivative() {
        return Err(Error::MissingDerivative("q"));
    }
    let p0 = spec.p.value(0.0);
    let px = spec.p.value(x);
    if x == 0.0 {
        return Ok(spec.y0);
    }
    let integrand = |t: f64| spec.q.derivative(t).unwrap_or(f64::NAN) * spec.p.value(t).exp();
    let integral = integrate_with_singularities(&integrand, 0.0, x, &spec.singular_points(), cfg)?;
    let value = spec.y0 * (p0 - px).exp() + (-px).exp() * integral.value;
    if !value.is_finite() {
        return Err(Error::Overflow(format!("exact solution at x = {x}")));
    }
    Ok(value)
}
