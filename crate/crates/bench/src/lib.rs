//! Workloads shared by the criterion benches.

use henstock_ode::{exact_via_formula, fixtures, QuadratureConfig, SurrogateSolution};

/// Solves example 4 at `level` and evaluates on `points` equispaced abscissae.
pub fn solve_and_sample(level: u32, points: usize) -> f64 {
    let spec = fixtures::example4().spec;
    let sol = SurrogateSolution::from_problem(&spec, level).expect("solvable");
    (0..points)
        .map(|j| sol.eval(j as f64 / (points - 1) as f64).expect("in range"))
        .sum()
}

/// Reference values of example 4 on `points` equispaced abscissae.
pub fn reference_sweep(points: usize) -> f64 {
    let spec = fixtures::example4().spec;
    let cfg = QuadratureConfig::default();
    (0..points)
        .map(|j| exact_via_formula(&spec, j as f64 / (points - 1) as f64, &cfg).expect("converges"))
        .sum()
}
