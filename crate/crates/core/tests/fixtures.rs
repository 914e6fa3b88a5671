use henstock_ode::fixtures::{self, FixtureId, DEFAULT_DEPTH};
use henstock_ode::reference::integrate_adaptive;
use henstock_ode::{BetaSchedule, DyadicInterpolant, Fixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_fixtures() -> Vec<Fixture> {
    FixtureId::ALL
        .into_iter()
        .map(|id| id.build(DEFAULT_DEPTH).unwrap())
        .collect()
}

fn near_singular(f: &Fixture, x: f64) -> bool {
    f.spec
        .singular_points()
        .iter()
        .any(|s| (x - s).abs() < (-10f64).exp2())
}

#[test]
fn every_fixture_validates() {
    for f in all_fixtures() {
        let diagnostics = f.spec.validate().unwrap();
        assert!(diagnostics.is_empty(), "{}: {diagnostics:?}", f.id);
    }
}

#[test]
fn closed_forms_satisfy_the_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in [fixtures::example3(), fixtures::example4()] {
        let mut checked = 0;
        while checked < 1024 {
            let x: f64 = rng.gen_range(0.0..1.0);
            if near_singular(&f, x) || x > 1.0 - 1e-3 {
                continue;
            }
            let r = f.ode_residual(x, 1e-6).unwrap();
            assert!(r <= 1e-4, "{} residual {r} at {x}", f.id);
            checked += 1;
        }
    }
}

#[test]
fn constructors_are_deterministic() {
    let xs: Vec<f64> = (0..=4096).map(|j| j as f64 / 4096.0).collect();
    for id in FixtureId::ALL {
        let a = id.build(24).unwrap();
        let b = id.build(24).unwrap();
        assert_eq!(a.spec.singular_points(), b.spec.singular_points());
        assert_eq!(a.segments, b.segments);
        assert_eq!(a.notes, b.notes);
        for &x in &xs {
            assert_eq!(a.spec.p.value(x).to_bits(), b.spec.p.value(x).to_bits());
            assert_eq!(a.spec.q.value(x).to_bits(), b.spec.q.value(x).to_bits());
            assert_eq!(
                a.closed_form(x).map(f64::to_bits),
                b.closed_form(x).map(f64::to_bits)
            );
        }
    }
}

#[test]
fn example4_p_node_at_one_half() {
    let f = fixtures::example4();
    let nodes = DyadicInterpolant::build(&f.spec.p, 2).unwrap();
    let expected = (2.0 / 3.0 - 0.5) * 3f64.sqrt();
    assert!((nodes.nodes()[2] - expected).abs() < 1e-15);
    assert!((nodes.nodes()[2] - 0.2886751).abs() < 1e-7);
}

#[test]
fn example1_normalizes_to_itself() {
    let f = fixtures::example1_sawtooth(30).unwrap();
    let unit = f.spec.normalize().unwrap();
    assert_eq!(unit.singular_points(), f.spec.singular_points());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let x: f64 = rng.gen();
        assert_eq!(unit.q.value(x), f.spec.q.value(x));
        assert_eq!(unit.p.value(x), f.spec.p.value(x));
    }
}

#[test]
fn segment_integrals_match_quadrature() {
    let harmonic = fixtures::example2_pair(&BetaSchedule::Harmonic, 12).unwrap();
    let geometric = fixtures::example2_pair(&BetaSchedule::Geometric, 12).unwrap();
    let sawtooth = fixtures::example1_sawtooth(12).unwrap();
    for f in [harmonic, geometric, sawtooth] {
        let spec = &f.spec;
        let signed = |t: f64| spec.q.derivative(t).unwrap() * spec.p.value(t).exp();
        let absolute = |t: f64| signed(t).abs();
        for seg in f.segments.as_ref().unwrap() {
            let mid = 0.75 * seg.right;
            let mut s = 0.0;
            let mut a = 0.0;
            for (lo, hi) in [(seg.left, mid), (mid, seg.right)] {
                s += integrate_adaptive(&signed, lo, hi, 1e-14, 30)
                    .unwrap()
                    .value;
                a += integrate_adaptive(&absolute, lo, hi, 1e-14, 30)
                    .unwrap()
                    .value;
            }
            let scale = seg.absolute.max(1.0);
            assert!(
                (s - seg.signed).abs() < 1e-12 * scale,
                "{} segment {}",
                f.id,
                seg.index
            );
            assert!(
                (a - seg.absolute).abs() < 1e-12 * scale,
                "{} segment {}",
                f.id,
                seg.index
            );
        }
    }
}
