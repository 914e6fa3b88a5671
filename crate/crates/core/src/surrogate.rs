//! Closed-form solution of the surrogate problem with piecewise-linear
//! coefficients.
//!
//! On a cell where `p~` is affine and `q~'` is constant the integrand
//! `q~' e^{p~}` is an exponential of an affine function, so every cell
//! integral is available exactly. The solution is
//!
//! ```text
//! y~(x) = y0 e^{p~(0) - p~(x)} + e^{-p~(x)} * int_0^x q~'(t) e^{p~(t)} dt
//! ```
//!
//! with the integral split into a prefix sum over whole cells plus a partial
//! cell.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::{node_x, DyadicInterpolant};
use crate::problem::ProblemSpec;
use crate::sum::NeumaierSum;

const SERIES_THRESHOLD: f64 = 1e-8;
const PARALLEL_CELLS: usize = 1 << 12;

/// `(e^{b delta} - 1) / b`, equal to `delta` at `b = 0`.
fn expm1_kernel(b: f64, delta: f64) -> f64 {
    if b == 0.0 {
        return delta;
    }
    let z = b * delta;
    if z.abs() < SERIES_THRESHOLD {
        delta * (1.0 + 0.5 * z)
    } else {
        z.exp_m1() / b
    }
}

/// Exact value of `int_0^delta s e^{v + b t} dt`.
pub fn cell_integral(v: f64, b: f64, s: f64, delta: f64) -> Result<f64> {
    if !(v.is_finite() && b.is_finite() && s.is_finite() && delta.is_finite()) || delta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cell integral needs finite inputs and delta >= 0 (v = {v}, b = {b}, s = {s}, delta = {delta})"
        )));
    }
    let scale = v.exp();
    if !scale.is_finite() {
        return Err(Error::Overflow(format!("e^v with v = {v}")));
    }
    let kernel = expm1_kernel(b, delta);
    if !kernel.is_finite() {
        return Err(Error::Overflow(format!(
            "e^(b delta) with b delta = {}",
            b * delta
        )));
    }
    let value = s * scale * kernel;
    if !value.is_finite() {
        return Err(Error::Overflow(format!(
            "cell integral s e^v (e^(b delta) - 1)/b with s = {s}, v = {v}, b delta = {}",
            b * delta
        )));
    }
    Ok(value)
}

fn in_cell(k: usize, err: Error) -> Error {
    match err {
        Error::Overflow(what) => Error::Overflow(format!("cell {k}: {what}")),
        other => other,
    }
}

/// Exact solution of the surrogate Cauchy problem.
#[derive(Clone, Debug)]
pub struct SurrogateSolution {
    p_tilde: DyadicInterpolant,
    q_tilde: DyadicInterpolant,
    y0: f64,
    prefix_integrals: Vec<f64>,
}

impl SurrogateSolution {
    /// Sums the closed-form cell integrals into prefix integrals.
    ///
    /// Cell integrals may be evaluated in parallel; the prefix sum always runs
    /// left to right with compensated accumulation, so the result does not
    /// depend on the thread schedule.
    pub fn solve(p_tilde: DyadicInterpolant, q_tilde: DyadicInterpolant, y0: f64) -> Result<Self> {
        if p_tilde.level() != q_tilde.level() {
            return Err(Error::LevelMismatch {
                p: p_tilde.level(),
                q: q_tilde.level(),
            });
        }
        if !y0.is_finite() {
            return Err(Error::NonFiniteInitialValue(y0));
        }
        let cells = p_tilde.cells();
        let step = p_tilde.step();
        let cell = |k: usize| {
            cell_integral(
                p_tilde.nodes()[k],
                p_tilde.slopes()[k],
                q_tilde.slopes()[k],
                step,
            )
            .map_err(|e| in_cell(k, e))
        };
        let pieces: Vec<f64> = if cells >= PARALLEL_CELLS {
            (0..cells)
                .into_par_iter()
                .map(cell)
                .collect::<Result<_>>()?
        } else {
            (0..cells).map(cell).collect::<Result<_>>()?
        };

        let mut prefix_integrals = Vec::with_capacity(cells + 1);
        prefix_integrals.push(0.0);
        let mut acc = NeumaierSum::new();
        for piece in pieces {
            acc.add(piece);
            prefix_integrals.push(acc.value());
        }
        if let Some(k) = prefix_integrals.iter().position(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!("prefix integral up to node {k}")));
        }
        Ok(Self {
            p_tilde,
            q_tilde,
            y0,
            prefix_integrals,
        })
    }

    /// Builds both interpolants at `level` from a problem and solves.
    ///
    /// Problems on another interval are normalized to `[0, 1]` first, so the
    /// solution is indexed by the unit variable `u` with `x = a + (b - a) u`.
    pub fn from_problem(spec: &ProblemSpec, level: u32) -> Result<Self> {
        let spec = spec.normalize()?;
        let p_tilde = DyadicInterpolant::build(&spec.p, level)?;
        let q_tilde = DyadicInterpolant::build(&spec.q, level)?;
        Self::solve(p_tilde, q_tilde, spec.y0)
    }

    pub fn level(&self) -> u32 {
        self.p_tilde.level()
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn p_tilde(&self) -> &DyadicInterpolant {
        &self.p_tilde
    }

    pub fn q_tilde(&self) -> &DyadicInterpolant {
        &self.q_tilde
    }

    /// `prefix_integrals()[k]` is `int_0^{k/2^n} q~' e^{p~}`.
    pub fn prefix_integrals(&self) -> &[f64] {
        &self.prefix_integrals
    }

    /// Evaluates the surrogate solution `y~(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let k = self.p_tilde.cell_of(x)?;
        let p_x = self.p_tilde.eval(x)?;
        let offset = x - node_x(k, self.level());
        let partial = cell_integral(
            self.p_tilde.nodes()[k],
            self.p_tilde.slopes()[k],
            self.q_tilde.slopes()[k],
            offset,
        )
        .map_err(|e| in_cell(k, e))?;
        let decay = (-p_x).exp();
        let carried = (self.p_tilde.nodes()[0] - p_x).exp();
        if !decay.is_finite() || !carried.is_finite() {
            return Err(Error::Overflow(format!("e^(-p~(x)) at x = {x}")));
        }
        let value = self.y0 * carried + decay * (self.prefix_integrals[k] + partial);
        if !value.is_finite() {
            return Err(Error::Overflow(format!("surrogate solution at x = {x}")));
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::CoefficientFn;
    use proptest::prelude::*;

    #[test]
    fn unit_exponential_cell() {
        let v = cell_integral(0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((v - 1.7182818285).abs() < 1e-10);
    }

    #[test]
    fn constant_integrand_cell() {
        assert_eq!(cell_integral(0.0, 0.0, 2.0, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn decaying_cell_matches_midpoint_rule() {
        let (v, b, s, delta) = (1.0f64, -3.0f64, 0.5f64, 0.25f64);
        let closed = 0.5 * std::f64::consts::E * (1.0 - (-0.75f64).exp()) / 3.0;
        // 10^6-point midpoint Riemann sum as an independent check.
        let n = 1_000_000;
        let h = delta / n as f64;
        let riemann: NeumaierSum = (0..n)
            .map(|i| s * (v + b * (i as f64 + 0.5) * h).exp() * h)
            .collect();
        let got = cell_integral(v, b, s, delta).unwrap();
        assert!(((got - closed) / closed).abs() < 1e-14);
        assert!(((got - riemann.value()) / closed).abs() < 1e-10);
    }

    #[test]
    fn tiny_exponent_uses_series() {
        let got = cell_integral(0.0, 1e-12, 1.0, 0.5).unwrap();
        assert!((got - 0.5 * (1.0 + 0.25e-12)).abs() < 1e-16);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            cell_integral(800.0, 0.0, 1.0, 1.0),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(
            cell_integral(0.0, 2000.0, 1.0, 1.0),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(
            cell_integral(0.0, 1.0, 1.0, -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn overflow_names_the_cell() {
        let p = CoefficientFn::new(|x| if x > 0.7 { 900.0 } else { 0.0 });
        let spec = ProblemSpec::on_unit_interval(p, CoefficientFn::new(|x| x), 0.0).unwrap();
        match SurrogateSolution::from_problem(&spec, 2) {
            Err(Error::Overflow(msg)) => assert!(msg.starts_with("cell 2"), "{msg}"),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let f = CoefficientFn::new(|x| x);
        let a = DyadicInterpolant::build(&f, 2).unwrap();
        let b = DyadicInterpolant::build(&f, 3).unwrap();
        assert!(matches!(
            SurrogateSolution::solve(a, b, 0.0),
            Err(Error::LevelMismatch { p: 2, q: 3 })
        ));
    }

    #[test]
    fn pure_source_term_gives_identity() {
        let spec = ProblemSpec::on_unit_interval(
            CoefficientFn::constant(0.0),
            CoefficientFn::new(|x| x),
            0.0,
        )
        .unwrap();
        for level in [0, 3, 6] {
            let sol = SurrogateSolution::from_problem(&spec, level).unwrap();
            let n = 1usize << level;
            for k in 0..=n {
                assert!((sol.prefix_integrals()[k] - k as f64 / n as f64).abs() < 1e-15);
            }
            for x in [0.0, 0.1, 0.37, 0.5, 1.0] {
                assert!((sol.eval(x).unwrap() - x).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn affine_p_reproduces_decay() {
        let spec = ProblemSpec::on_unit_interval(
            CoefficientFn::new(|x| x),
            CoefficientFn::constant(0.0),
            1.0,
        )
        .unwrap();
        for level in 0..=10 {
            let sol = SurrogateSolution::from_problem(&spec, level).unwrap();
            let n = 1usize << level;
            for k in 0..=n {
                let x = k as f64 / n as f64;
                let exact = (-x).exp();
                assert!(((sol.eval(x).unwrap() - exact) / exact).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn initial_condition_is_exact() {
        let spec = ProblemSpec::on_unit_interval(
            CoefficientFn::new(|x| (3.0 * x).sin()),
            CoefficientFn::new(|x| x.sqrt()),
            -1.75,
        )
        .unwrap();
        let sol = SurrogateSolution::from_problem(&spec, 5).unwrap();
        assert_eq!(sol.eval(0.0).unwrap(), -1.75);
    }

    #[test]
    fn parallel_and_serial_paths_agree() {
        let spec = ProblemSpec::on_unit_interval(
            CoefficientFn::new(|x| (3.0 * x).sin()),
            CoefficientFn::new(|x| x.sqrt()),
            0.5,
        )
        .unwrap();
        let level = 13;
        let sol = SurrogateSolution::from_problem(&spec, level).unwrap();
        let serial: Vec<f64> = (0..sol.p_tilde().cells())
            .map(|k| {
                cell_integral(
                    sol.p_tilde().nodes()[k],
                    sol.p_tilde().slopes()[k],
                    sol.q_tilde().slopes()[k],
                    sol.p_tilde().step(),
                )
                .unwrap()
            })
            .collect();
        let mut acc = NeumaierSum::new();
        for (k, v) in serial.iter().enumerate() {
            acc.add(*v);
            assert_eq!(
                acc.value().to_bits(),
                sol.prefix_integrals()[k + 1].to_bits()
            );
        }
    }

    proptest! {
        #[test]
        fn prefix_integrals_match_fresh_summation(
            level in 1u32..9,
            amp in -2.0f64..2.0,
            freq in 0.5f64..8.0,
        ) {
            let spec = ProblemSpec::on_unit_interval(
                CoefficientFn::new(move |x| amp * (freq * x).sin()),
                CoefficientFn::new(move |x| x.sqrt() + (freq * x).cos()),
                0.3,
            ).unwrap();
            let sol = SurrogateSolution::from_problem(&spec, level).unwrap();
            let n = sol.p_tilde().cells();
            prop_assert_eq!(sol.prefix_integrals()[0], 0.0);
            for k in 0..=n {
                let fresh: f64 = (0..k).map(|j| cell_integral(
                    sol.p_tilde().nodes()[j],
                    sol.p_tilde().slopes()[j],
                    sol.q_tilde().slopes()[j],
                    sol.p_tilde().step(),
                ).unwrap()).sum();
                let x = k as f64 / n as f64;
                let p_x = sol.p_tilde().nodes()[k];
                let direct = 0.3 * (sol.p_tilde().nodes()[0] - p_x).exp() + (-p_x).exp() * fresh;
                let via_prefix = sol.eval(x).unwrap();
                let scale = direct.abs().max(1.0);
                prop_assert!((via_prefix - direct).abs() <= 1e-13 * scale);
            }
            for k in 0..n {
                let single = cell_integral(
                    sol.p_tilde().nodes()[k],
                    sol.p_tilde().slopes()[k],
                    sol.q_tilde().slopes()[k],
                    sol.p_tilde().step(),
                ).unwrap();
                let diff = sol.prefix_integrals()[k + 1] - sol.prefix_integrals()[k];
                prop_assert!((diff - single).abs() <= 1e-14 * sol.prefix_integrals()[k + 1].abs().max(1.0));
            }
        }

        #[test]
        fn nonnegative_data_gives_nonnegative_solution(
            level in 0u32..8,
            y0 in 0.0f64..5.0,
            incs in proptest::collection::vec(0.0f64..1.0, 257),
            p_nodes in proptest::collection::vec(-3.0f64..3.0, 257),
            x in 0.0f64..=1.0,
        ) {
            let n = 1usize << level;
            let mut q = vec![0.0; n + 1];
            for k in 0..n {
                q[k + 1] = q[k] + incs[k];
            }
            let p = DyadicInterpolant::from_nodes(level, p_nodes[..=n].to_vec()).unwrap();
            let q = DyadicInterpolant::from_nodes(level, q).unwrap();
            let sol = SurrogateSolution::solve(p, q, y0).unwrap();
            prop_assert!(sol.eval(x).unwrap() >= 0.0);
        }
    }
}
