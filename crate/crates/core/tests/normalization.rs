use henstock_ode::{CoefficientFn, ProblemSpec, SurrogateSolution};

fn skewed() -> ProblemSpec {
    let p = CoefficientFn::new(f64::sin).with_derivative(f64::cos);
    let q = CoefficientFn::new(|x: f64| x.powi(3) / 3.0).with_derivative(|x| x * x);
    ProblemSpec::new(p, q, 0.7, (0.5, 2.5)).unwrap()
}

/// Solves the interpolated problem on the grid `a + k (b - a) / 2^n` in the
/// original variable and evaluates at `a + (b - a) (k + theta) / 2^n`.
fn direct(spec: &ProblemSpec, n: u32, k: usize, theta: f64) -> f64 {
    let (a, b) = spec.interval();
    let cells = 1usize << n;
    let x = |j: usize| a + (b - a) * j as f64 / cells as f64;
    let p: Vec<f64> = (0..=cells).map(|j| spec.p.value(x(j))).collect();
    let q: Vec<f64> = (0..=cells).map(|j| spec.q.value(x(j))).collect();
    let piece = |j: usize, t: f64| {
        let dp = (p[j + 1] - p[j]) * t;
        let dq = (q[j + 1] - q[j]) * t;
        let factor = if dp == 0.0 { 1.0 } else { dp.exp_m1() / dp };
        p[j].exp() * dq * factor
    };
    let mut integral = 0.0;
    for j in 0..k {
        integral += piece(j, 1.0);
    }
    let pk = if theta > 0.0 {
        integral += piece(k, theta);
        p[k] + (p[k + 1] - p[k]) * theta
    } else {
        p[k]
    };
    spec.y0 * (p[0] - pk).exp() + (-pk).exp() * integral
}

#[test]
fn normalize_then_solve_matches_original_grid() {
    let spec = skewed();
    let unit = spec.normalize().unwrap();
    for n in [0, 1, 3, 6, 9] {
        let sol = SurrogateSolution::from_problem(&spec, n).unwrap();
        let unit_sol = SurrogateSolution::from_problem(&unit, n).unwrap();
        let cells = 1usize << n;
        for k in 0..=cells {
            let u = k as f64 / cells as f64;
            let expected = direct(&spec, n, k, 0.0);
            let got = sol.eval(u).unwrap();
            assert!(
                (got - expected).abs() <= 1e-12 * expected.abs(),
                "n={n} node {k}"
            );
            assert_eq!(got.to_bits(), unit_sol.eval(u).unwrap().to_bits());
            if k < cells {
                let u = (k as f64 + 0.375) / cells as f64;
                let expected = direct(&spec, n, k, 0.375);
                let got = sol.eval(u).unwrap();
                assert!(
                    (got - expected).abs() <= 1e-12 * expected.abs(),
                    "n={n} cell {k}"
                );
            }
        }
    }
}

#[test]
fn normalize_is_idempotent() {
    let once = skewed().normalize().unwrap();
    let twice = once.normalize().unwrap();
    assert!(twice.is_unit());
    for j in 0..=1000 {
        let u = j as f64 / 1000.0;
        assert_eq!(once.p.value(u).to_bits(), twice.p.value(u).to_bits());
        assert_eq!(once.q.value(u).to_bits(), twice.q.value(u).to_bits());
    }
}

#[test]
fn affine_substitution() {
    let p = CoefficientFn::affine(1.0, 0.0)
        .with_singular_points(vec![1.0])
        .unwrap();
    let spec = ProblemSpec::new(p, CoefficientFn::constant(0.0), 1.0, (0.0, 2.0)).unwrap();
    let unit = spec.normalize().unwrap();
    assert_eq!(unit.singular_points(), vec![0.5]);
    for u in [0.0, 0.25, 0.5, 1.0] {
        assert_eq!(unit.p.value(u), 2.0 * u);
        assert_eq!(unit.p.derivative(u), Some(2.0));
    }
}

#[test]
fn unnormalized_problems_are_rejected_where_unit_is_required() {
    let spec = skewed();
    assert!(henstock_ode::theorem_bound(&spec, 3).is_err());
    assert!(henstock_ode::exact_via_formula(&spec, 0.5, &Default::default()).is_err());
}
