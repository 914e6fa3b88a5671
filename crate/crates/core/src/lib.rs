//! Solver for first-order linear ODEs `y' + p'(x) y = q'(x)`, `y(0) = y0`,
//! whose coefficients are given only through continuous primitives `p` and
//! `q`.
//!
//! The derivatives `p'` and `q'` may be unbounded or even fail to be Lebesgue
//! integrable; the equation is read in the Henstock (generalized Riemann)
//! sense. The solver replaces `p` and `q` by their piecewise-linear
//! interpolants on the dyadic grid `k / 2^n` and solves the resulting problem
//! exactly, which only needs the primitives at grid nodes.
//!
//! ```
//! use henstock_ode::{fixtures, SurrogateSolution};
//!
//! let fixture = fixtures::example3();
//! let sol = SurrogateSolution::from_problem(&fixture.spec, 7).unwrap();
//! let y = sol.eval(0.5).unwrap();
//! assert!((y - 2.0 * 0.5f64.sqrt()).abs() < 1e-3);
//! ```
//!
//! Besides the solver the crate provides:
//!
//! * [`reference`]: the exact solution formula evaluated by singularity-aware
//!   quadrature, a fixed-step RK4 baseline, and dyadic partial sums of
//!   improper integrals;
//! * [`error_analysis`]: the a-priori error bound in terms of moduli of
//!   continuity and total variations, plus measured grid errors;
//! * [`fixtures`]: canonical problems with known behaviour.
//!
//! The initial value enters the solution formula as
//! `y(x) = y0 e^{p(0) - p(x)} + e^{-p(x)} int_0^x q' e^p`.

pub mod error;
pub mod error_analysis;
pub mod fixtures;
pub mod interp;
pub mod problem;
pub mod reference;
pub mod sum;
pub mod surrogate;

pub use error::{Error, Result};
pub use error_analysis::{
    measured_error, modulus_of_continuity, theorem_bound, total_variation, ErrorBudget, Variation,
};
pub use fixtures::{BetaSchedule, Fixture, FixtureId};
pub use interp::{DyadicInterpolant, MAX_LEVEL};
pub use problem::{
    Coefficient, CoefficientFn, Diagnostic, MonotonePieces, Monotonicity, Orientation, ProblemSpec,
    RealFn,
};
pub use reference::{exact_via_formula, QuadratureConfig};
pub use surrogate::{cell_integral, SurrogateSolution};
