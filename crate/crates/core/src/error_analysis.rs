//! A-priori error bound for the surrogate solution and measured errors.
//!
//! The bound has the form
//!
//! ```text
//! |y(x) - y~(x)| <= C_{-1} w(e^{-p}) + C_1 w(e^p) + C_0 w(q) + C_2 w(q) w(p)
//! ```
//!
//! where `w` is the modulus of continuity at `delta = 2^-n` and
//!
//! ```text
//! C_{-1} = |y0| e^{p(0)} + |e^p|_C V(q)      C_1 = 2 |e^p|_C V(q)
//! C_0    = |e^p|_C + |e^p|_C V(e^p)          C_2 = |e^p|_C^2
//! ```
//!
//! with `V` the total variation on `[0, 1]`. It is certified when `p'` and
//! `q'` are absolutely integrable.
//!
//! Moduli and variations are estimated from samples and are therefore lower
//! estimates of the true quantities. When a function carries monotone-piece
//! metadata the per-window oscillation and the variation are computed exactly
//! from breakpoint values instead.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::problem::{CoefficientFn, Orientation, ProblemSpec};
use crate::surrogate::SurrogateSolution;

/// Extra levels of sampling above the grid level.
pub const MODULUS_OVERSAMPLING: u32 = 6;

/// Sampled points of `[0, 1]`: a uniform grid plus the given extra points.
fn sample_points(resolution: usize, extra: &[&[f64]]) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=resolution)
        .map(|i| i as f64 / resolution as f64)
        .collect();
    for pts in extra {
        xs.extend(pts.iter().copied().filter(|x| (0.0..=1.0).contains(x)));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Estimate of `sup { |f(x) - f(y)| : x, y in [0, 1], |x - y| <= delta }`.
///
/// Without metadata the supremum runs over pairs drawn from a uniform grid of
/// `resolution + 1` points plus the singular points of `f`. With monotone
/// pieces, windows `[s, s + delta]` are started at every grid point and at
/// every breakpoint `b` and `b - delta`, and each window's oscillation is
/// read off exactly from its endpoints and interior breakpoints. Either way
/// the result never exceeds the true modulus.
pub fn modulus_of_continuity(f: &CoefficientFn, delta: f64, resolution: usize) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    if (resolution as f64) < 2.0 / delta {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} is below 2 / delta = {}",
            2.0 / delta
        )));
    }
    match f.monotone_pieces() {
        Some(pieces) => Ok(modulus_piecewise_monotone(
            f,
            pieces.breakpoints(),
            delta,
            resolution,
        )),
        None => Ok(modulus_sampled(f, delta, resolution)),
    }
}

fn modulus_sampled(f: &CoefficientFn, delta: f64, resolution: usize) -> f64 {
    let xs = sample_points(resolution, &[f.singular_points()]);
    let vs: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();

    // Sliding window over sorted abscissae with monotone deques for max and min.
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    let mut left = 0;
    for right in 0..xs.len() {
        while maxq.back().is_some_and(|&i| vs[i] <= vs[right]) {
            maxq.pop_back();
        }
        maxq.push_back(right);
        while minq.back().is_some_and(|&i| vs[i] >= vs[right]) {
            minq.pop_back();
        }
        minq.push_back(right);
        while xs[right] - xs[left] > delta {
            left += 1;
            if maxq.front() == Some(&(left - 1)) {
                maxq.pop_front();
            }
            if minq.front() == Some(&(left - 1)) {
                minq.pop_front();
            }
        }
        let spread = vs[maxq[0]] - vs[minq[0]];
        best = best.max(spread);
    }
    best
}

fn modulus_piecewise_monotone(
    f: &CoefficientFn,
    breakpoints: &[f64],
    delta: f64,
    resolution: usize,
) -> f64 {
    let last_start = 1.0 - delta;
    let mut starts: Vec<f64> = (0..=resolution)
        .map(|i| i as f64 / resolution as f64)
        .collect();
    for &b in breakpoints.iter().chain(f.singular_points()) {
        starts.extend([b, b - delta]);
    }
    for s in starts.iter_mut() {
        *s = s.clamp(0.0, last_start);
    }
    starts.sort_by(f64::total_cmp);
    starts.dedup();

    let mut best: f64 = 0.0;
    for &s in &starts {
        let e = if s == last_start { 1.0 } else { s + delta };
        let lo = breakpoints.partition_point(|&b| b <= s);
        let hi = breakpoints.partition_point(|&b| b < e);
        let mut vmax = f.value(s).max(f.value(e));
        let mut vmin = f.value(s).min(f.value(e));
        for &b in &breakpoints[lo..hi] {
            let v = f.value(b);
            vmax = vmax.max(v);
            vmin = vmin.min(v);
        }
        best = best.max(vmax - vmin);
    }
    best
}

/// Total variation on `[0, 1]` and whether it was computed exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Variation {
    pub value: f64,
    /// `false` means a sampled lower bound.
    pub exact: bool,
}

/// Total variation of `f` over `[0, 1]`.
///
/// Exact from monotone pieces when available, otherwise the sum of absolute
/// increments over `fallback_resolution + 1` grid points and the singular
/// points of `f`.
pub fn total_variation(f: &CoefficientFn, fallback_resolution: usize) -> Variation {
    match f.monotone_pieces() {
        Some(pieces) => Variation {
            value: increments(f, pieces.breakpoints()),
            exact: true,
        },
        None => {
            let xs = sample_points(fallback_resolution.max(1), &[f.singular_points()]);
            Variation {
                value: increments(f, &xs),
                exact: false,
            }
        }
    }
}

fn increments(f: &CoefficientFn, xs: &[f64]) -> f64 {
    let values: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Every ingredient of the error bound at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBudget {
    pub n: u32,
    pub delta: f64,
    pub omega_q: f64,
    pub omega_p: f64,
    /// Modulus of `e^p`.
    pub omega_ep: f64,
    /// Modulus of `e^{-p}`.
    pub omega_emp: f64,
    pub var_q: f64,
    pub var_ep: f64,
    /// `max e^p` over `[0, 1]`.
    pub sup_ep: f64,
    pub y0_abs: f64,
    /// `e^{p(0)}`.
    pub ep0: f64,
    pub c_minus1: f64,
    pub c_1: f64,
    pub c_0: f64,
    pub c_2: f64,
    pub bound: f64,
    /// Whether every modulus and variation came from monotone metadata.
    pub exact_metadata: bool,
}

impl ErrorBudget {
    /// The four constants recomputed from the stored ingredients.
    pub fn constants(&self) -> [f64; 4] {
        constants(self.y0_abs, self.ep0, self.sup_ep, self.var_q, self.var_ep)
    }

    /// The bound recomputed from the stored constants and moduli.
    pub fn recompute_bound(&self) -> f64 {
        combine(
            [self.c_minus1, self.c_1, self.c_0, self.c_2],
            self.omega_emp,
            self.omega_ep,
            self.omega_q,
            self.omega_p,
        )
    }

    /// `(label, value)` pairs in a stable order.
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("n", self.n as f64),
            ("delta", self.delta),
            ("omega_q", self.omega_q),
            ("omega_p", self.omega_p),
            ("omega_ep", self.omega_ep),
            ("omega_emp", self.omega_emp),
            ("var_q", self.var_q),
            ("var_ep", self.var_ep),
            ("sup_ep", self.sup_ep),
            ("c_minus1", self.c_minus1),
            ("c_1", self.c_1),
            ("c_0", self.c_0),
            ("c_2", self.c_2),
            ("bound", self.bound),
        ]
    }
}

fn constants(y0_abs: f64, ep0: f64, sup_ep: f64, var_q: f64, var_ep: f64) -> [f64; 4] {
    [
        y0_abs * ep0 + sup_ep * var_q,
        2.0 * sup_ep * var_q,
        sup_ep + sup_ep * var_ep,
        sup_ep * sup_ep,
    ]
}

fn combine(c: [f64; 4], omega_emp: f64, omega_ep: f64, omega_q: f64, omega_p: f64) -> f64 {
    c[0] * omega_emp + c[1] * omega_ep + c[2] * omega_q + c[3] * omega_q * omega_p
}

/// Assembles the bound for `spec` at level `n`.
///
/// Moduli use `2^(n + 6)` samples; `sup e^p` is `e` raised to the largest
/// sampled value of `p` (grid, singular points and monotone breakpoints).
pub fn theorem_bound(spec: &ProblemSpec, n: u32) -> Result<ErrorBudget> {
    spec.require_unit()?;
    crate::interp::check_level(n)?;
    let delta = (-(n as f64)).exp2();
    let resolution = 1usize << (n + MODULUS_OVERSAMPLING);

    let p = &spec.p;
    let q = &spec.q;
    let ep = p.compose(f64::exp, Orientation::Preserving);
    let emp = p.compose(|v| (-v).exp(), Orientation::Reversing);

    let omega_q = modulus_of_continuity(q, delta, resolution)?;
    let omega_p = modulus_of_continuity(p, delta, resolution)?;
    let omega_ep = modulus_of_continuity(&ep, delta, resolution)?;
    let omega_emp = modulus_of_continuity(&emp, delta, resolution)?;
    let var_q = total_variation(q, resolution);
    let var_ep = total_variation(&ep, resolution);

    let breakpoints = p.monotone_pieces().map(|m| m.breakpoints()).unwrap_or(&[]);
    let p_max = sample_points(resolution, &[p.singular_points(), breakpoints])
        .into_iter()
        .map(|x| p.value(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let sup_ep = p_max.exp();
    let y0_abs = spec.y0.abs();
    let ep0 = p.value(0.0).exp();

    let [c_minus1, c_1, c_0, c_2] = constants(y0_abs, ep0, sup_ep, var_q.value, var_ep.value);
    let bound = combine(
        [c_minus1, c_1, c_0, c_2],
        omega_emp,
        omega_ep,
        omega_q,
        omega_p,
    );
    if !bound.is_finite() {
        return Err(Error::Overflow(format!("error bound at level {n}")));
    }
    Ok(ErrorBudget {
        n,
        delta,
        omega_q,
        omega_p,
        omega_ep,
        omega_emp,
        var_q: var_q.value,
        var_ep: var_ep.value,
        sup_ep,
        y0_abs,
        ep0,
        c_minus1,
        c_1,
        c_0,
        c_2,
        bound,
        exact_metadata: p.monotone_pieces().is_some()
            && q.monotone_pieces().is_some()
            && var_q.exact
            && var_ep.exact,
    })
}

/// `max_j |y~(j / 2^m) - y(j / 2^m)|` for `j = 0..=2^m`.
pub fn measured_error<F>(surrogate: &SurrogateSolution, mut exact: F, m: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if m < surrogate.level() {
        return Err(Error::InvalidArgument(format!(
            "grid level {m} is coarser than the surrogate level {}",
            surrogate.level()
        )));
    }
    crate::interp::check_level(m)?;
    let points = 1usize << m;
    let mut worst: f64 = 0.0;
    for j in 0..=points {
        let x = j as f64 / points as f64;
        let err = (surrogate.eval(x)? - exact(x)?).abs();
        worst = worst.max(err);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{MonotonePieces, Monotonicity};
    use proptest::prelude::*;

    fn sqrt_plain() -> CoefficientFn {
        CoefficientFn::new(f64::sqrt)
    }

    #[test]
    fn sqrt_modulus_quarter() {
        let w = modulus_of_continuity(&sqrt_plain(), 0.25, 64).unwrap();
        assert_eq!(w, 0.5);
        let meta = sqrt_plain().with_monotone_pieces(
            MonotonePieces::single(0.0, 1.0, Monotonicity::Increasing).unwrap(),
        );
        assert_eq!(modulus_of_continuity(&meta, 0.25, 64).unwrap(), 0.5);
    }

    #[test]
    fn constant_has_zero_modulus_and_variation() {
        let c = CoefficientFn::constant(4.0);
        assert_eq!(modulus_of_continuity(&c, 0.1, 100).unwrap(), 0.0);
        assert_eq!(total_variation(&c, 100).value, 0.0);
    }

    #[test]
    fn modulus_arguments_checked() {
        assert!(modulus_of_continuity(&sqrt_plain(), 0.0, 100).is_err());
        assert!(modulus_of_continuity(&sqrt_plain(), 1.5, 100).is_err());
        assert!(modulus_of_continuity(&sqrt_plain(), 0.25, 7).is_err());
    }

    #[test]
    fn brute_force_modulus_agrees() {
        // All pairs on a 2^10 grid, an oracle independent of the sliding window.
        let f = CoefficientFn::new(|x| (9.0 * x).sin() + x.sqrt());
        let n = 1 << 10;
        let delta = 1.0 / 16.0;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let mut brute: f64 = 0.0;
        for i in 0..xs.len() {
            for j in i..xs.len() {
                if xs[j] - xs[i] > delta {
                    break;
                }
                brute = brute.max((f.value(xs[j]) - f.value(xs[i])).abs());
            }
        }
        assert_eq!(modulus_of_continuity(&f, delta, n).unwrap(), brute);
    }

    #[test]
    fn numeric_variation_is_lower_bound() {
        let f = CoefficientFn::new(|x| (6.0 * x).sin());
        let v = total_variation(&f, 1 << 12);
        assert!(!v.exact);
        // sin(6x) on [0,1]: up to 1 at pi/12, down to -1 at pi/4, up to sin 6.
        let exact = 1.0 + 2.0 + (6f64.sin() + 1.0);
        assert!(v.value <= exact + 1e-12);
        assert!(exact - v.value < 1e-5);
    }

    #[test]
    fn trivial_problem_has_zero_bound() {
        let spec = ProblemSpec::on_unit_interval(
            CoefficientFn::constant(0.0),
            CoefficientFn::constant(0.0),
            0.0,
        )
        .unwrap();
        let b = theorem_bound(&spec, 4).unwrap();
        assert_eq!(b.omega_q, 0.0);
        assert_eq!(b.omega_p, 0.0);
        assert_eq!(b.omega_ep, 0.0);
        assert_eq!(b.omega_emp, 0.0);
        assert_eq!(b.var_q, 0.0);
        assert_eq!(b.var_ep, 0.0);
        assert_eq!(b.sup_ep, 1.0);
        assert_eq!(b.bound, 0.0);
    }

    #[test]
    fn measured_error_rejects_coarse_grid() {
        let spec = ProblemSpec::on_unit_interval(
            CoefficientFn::constant(0.0),
            CoefficientFn::new(|x| x),
            0.0,
        )
        .unwrap();
        let sol = SurrogateSolution::from_problem(&spec, 5).unwrap();
        assert!(measured_error(&sol, Ok, 4).is_err());
        assert!(measured_error(&sol, Ok, 5).unwrap() < 1e-15);
    }

    proptest! {
        #[test]
        fn modulus_grows_with_delta(k1 in 1u32..6, extra in 0u32..3, freq in 0.5f64..20.0) {
            let f = CoefficientFn::new(move |x| (freq * x).sin() + x.sqrt());
            let d_small = (-((k1 + extra) as f64)).exp2();
            let d_large = (-(k1 as f64)).exp2();
            let res = 1 << 10;
            let small = modulus_of_continuity(&f, d_small, res).unwrap();
            let large = modulus_of_continuity(&f, d_large, res).unwrap();
            prop_assert!(small <= large);

            let meta = CoefficientFn::new(move |x| x.sqrt() * (1.0 + x))
                .with_monotone_pieces(MonotonePieces::single(0.0, 1.0, Monotonicity::Increasing).unwrap());
            prop_assert!(
                modulus_of_continuity(&meta, d_small, res).unwrap()
                    <= modulus_of_continuity(&meta, d_large, res).unwrap()
            );
        }

        #[test]
        fn modulus_grows_with_resolution(level in 6u32..12, freq in 0.5f64..40.0) {
            let f = CoefficientFn::new(move |x| (freq * x).sin() * x.sqrt());
            let delta = 1.0 / 16.0;
            let coarse = modulus_of_continuity(&f, delta, 1 << level).unwrap();
            let fine = modulus_of_continuity(&f, delta, 1 << (level + 1)).unwrap();
            prop_assert!(coarse <= fine);
        }
    }

    #[test]
    fn sqrt_modulus_converges_under_refinement() {
        let f = sqrt_plain();
        let a = modulus_of_continuity(&f, 1.0 / 16.0, 1 << 10).unwrap();
        let b = modulus_of_continuity(&f, 1.0 / 16.0, 1 << 11).unwrap();
        assert!((a - b).abs() < 1e-4);
    }
}
