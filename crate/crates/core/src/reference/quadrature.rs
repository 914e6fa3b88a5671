//! Adaptive Gauss-Kronrod quadrature with geometric refinement toward
//! endpoint singularities.
//!
//! Integrands are only ever sampled at interior Kronrod nodes, so a declared
//! singular endpoint is never evaluated. Toward such an endpoint `s` the
//! interval is cut into panels `[s + w/2^(j+1), s + w/2^j]`; the integral is
//! the limit of the partial sums of these proper integrals, and the part left
//! below the finest panel is estimated from the geometric decay of the last
//! panels.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

use super::QuadratureConfig;

// 15-point Kronrod nodes on [-1, 1] (non-negative half, descending) and the
// embedded 7-point Gauss weights for the odd-indexed nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4096;
const MIN_PANELS: usize = 4;
const NEGLIGIBLE_PANEL: f64 = 1e-3;
const RATIO_AGREEMENT: f64 = 1e-2;

/// Integral estimate with its error estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl QuadResult {
    fn absorb(&mut self, other: QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
    }
}

/// One G7-K15 application on `[a, b]`; the error estimate is `|K15 - G7|`.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<QuadResult> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let sample = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { t })
        }
    };
    let fc = sample(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = sample(center - dx)? + sample(center + dx)?;
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok(QuadResult {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        evaluations: 15,
    })
}

struct Piece {
    a: f64,
    b: f64,
    depth: u32,
    est: QuadResult,
}

/// Globally adaptive bisection on `[a, b]` until the summed error estimate
/// drops below `tol` (or below round-off level of the result).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult::default());
    }
    let mut pieces = vec![Piece {
        a,
        b,
        depth: 0,
        est: gauss_kronrod_15(f, a, b)?,
    }];
    let mut evaluations = 15;
    loop {
        let error: f64 = pieces.iter().map(|p| p.est.error).sum();
        let magnitude: f64 = pieces.iter().map(|p| p.est.value.abs()).sum();
        if error <= tol.max(50.0 * f64::EPSILON * magnitude) {
            let value: NeumaierSum = pieces.iter().map(|p| p.est.value).collect();
            return Ok(QuadResult {
                value: value.value(),
                error,
                evaluations,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.est.error.total_cmp(&y.1.est.error))
            .map(|(i, _)| i)
            .expect("at least one piece");
        let piece = pieces.swap_remove(worst);
        let mid = 0.5 * (piece.a + piece.b);
        if piece.depth >= max_depth
            || pieces.len() >= MAX_INTERVALS
            || mid <= piece.a
            || mid >= piece.b
        {
            return Err(Error::NonConvergence {
                a,
                b,
                residual: error,
            });
        }
        for (lo, hi) in [(piece.a, mid), (mid, piece.b)] {
            pieces.push(Piece {
                a: lo,
                b: hi,
                depth: piece.depth + 1,
                est: gauss_kronrod_15(f, lo, hi)?,
            });
            evaluations += 15;
        }
    }
}

/// Integral over the `width`-long interval with a singular endpoint at
/// `singular`, on the side given by `direction` (+1 right of the point, -1
/// left of it).
fn integrate_toward<F: Fn(f64) -> f64>(
    f: &F,
    singular: f64,
    width: f64,
    direction: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let mut total = QuadResult::default();
    let mut acc = NeumaierSum::new();
    let mut panels: Vec<f64> = Vec::new();
    let mut outer = width;
    loop {
        let inner = 0.5 * outer;
        let (lo, hi) = ordered(singular + direction * inner, singular + direction * outer);
        let panel = integrate_adaptive(f, lo, hi, cfg.abs_tol, cfg.max_depth)?;
        acc.add(panel.value);
        panels.push(panel.value);
        total.error += panel.error;
        total.evaluations += panel.evaluations;
        outer = inner;

        let settled =
            panels.len() >= MIN_PANELS && panel.value.abs() <= NEGLIGIBLE_PANEL * cfg.abs_tol;
        let below_halo = panels.len() >= 3 && outer < cfg.singularity_halo;
        // Panels narrower than the spacing of floats around the point are meaningless.
        let unresolvable = outer <= 4.0 * singular.abs() * f64::EPSILON;
        if settled || below_halo || unresolvable {
            break;
        }
    }

    match geometric_tail(&panels) {
        Some(tail) => acc.add(tail),
        None => {
            let (lo, hi) = ordered(singular, singular + direction * outer);
            if hi > lo {
                let rest = gauss_kronrod_15(f, lo, hi)?;
                acc.add(rest.value);
                total.error += rest.error;
                total.evaluations += rest.evaluations;
            }
        }
    }
    total.value = acc.value();
    Ok(total)
}

/// Sum of the remaining panels when the last ones decay with a stable ratio.
fn geometric_tail(panels: &[f64]) -> Option<f64> {
    let n = panels.len();
    if n < 3 {
        return None;
    }
    let (a, b, c) = (panels[n - 3], panels[n - 2], panels[n - 1]);
    if a == 0.0 || b == 0.0 {
        return None;
    }
    if c == 0.0 {
        return Some(0.0);
    }
    let r_prev = b / a;
    let r = c / b;
    if !(r > 0.0 && r < 0.9) || (r - r_prev).abs() > RATIO_AGREEMENT {
        return None;
    }
    Some(c * r / (1.0 - r))
}

fn ordered(x: f64, y: f64) -> (f64, f64) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Integral over `[a, b]` of an integrand whose declared singular points must
/// never be sampled.
///
/// The interval is split at every singular point; pieces with a singular
/// endpoint are refined geometrically toward it.
pub fn integrate_with_singularities<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    singular: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    cfg.check()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    let mut cuts = vec![a];
    cuts.extend(singular.iter().copied().filter(|&s| s > a && s < b));
    cuts.push(b);
    let is_singular = |x: f64| singular.contains(&x);

    let mut total = QuadResult::default();
    let mut acc = NeumaierSum::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let part = match (is_singular(lo), is_singular(hi)) {
            (false, false) => integrate_adaptive(f, lo, hi, cfg.abs_tol, cfg.max_depth)?,
            (true, false) => integrate_toward(f, lo, hi - lo, 1.0, cfg)?,
            (false, true) => integrate_toward(f, hi, hi - lo, -1.0, cfg)?,
            (true, true) => {
                let half = 0.5 * (hi - lo);
                let mut left = integrate_toward(f, lo, half, 1.0, cfg)?;
                left.absorb(integrate_toward(f, hi, hi - lo - half, -1.0, cfg)?);
                left
            }
        };
        acc.add(part.value);
        total.error += part.error;
        total.evaluations += part.evaluations;
    }
    total.value = acc.value();
    Ok(total)
}
