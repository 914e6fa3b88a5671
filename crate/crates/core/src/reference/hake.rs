//! Partial sums of an improper integral over dyadic segments.
//!
//! For an integrand that is integrable on every `[c, 1]` with `c > 0`, the
//! integral over `[0, 1]` exists exactly when the proper integrals converge
//! as `c -> 0`. With closed-form integrals over the segments
//! `[2^-(n+1), 2^-n]`, that limit is the sum of a series, and comparing it
//! with the series of absolute integrals separates conditional from absolute
//! integrability.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Closed-form integrals over one segment `[left, right]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentIntegral {
    /// Segment number `n >= 1`.
    pub index: usize,
    pub left: f64,
    pub right: f64,
    /// Integral of the integrand.
    pub signed: f64,
    /// Integral of its absolute value.
    pub absolute: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HakePartialSums {
    pub depth: usize,
    pub signed: f64,
    pub absolute: f64,
}

/// Sums the first `depth` segment integrals.
pub fn hake_series(segments: &[SegmentIntegral], depth: usize) -> Result<HakePartialSums> {
    check_depth(segments, depth)?;
    let signed: NeumaierSum = segments[..depth].iter().map(|s| s.signed).collect();
    let absolute: NeumaierSum = segments[..depth].iter().map(|s| s.absolute).collect();
    Ok(HakePartialSums {
        depth,
        signed: signed.value(),
        absolute: absolute.value(),
    })
}

/// Partial sums for every depth `1..=segments.len()`.
pub fn hake_sequence(segments: &[SegmentIntegral]) -> Vec<HakePartialSums> {
    let mut signed = NeumaierSum::new();
    let mut absolute = NeumaierSum::new();
    segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            signed.add(s.signed);
            absolute.add(s.absolute);
            HakePartialSums {
                depth: i + 1,
                signed: signed.value(),
                absolute: absolute.value(),
            }
        })
        .collect()
}

/// `max_{depth < k <= len} |S_k - S_depth|` for the signed partial sums.
///
/// Zero when no deeper segments are available.
pub fn cauchy_gap(segments: &[SegmentIntegral], depth: usize) -> Result<f64> {
    check_depth(segments, depth)?;
    let mut tail = NeumaierSum::new();
    let mut gap: f64 = 0.0;
    for s in &segments[depth..] {
        tail.add(s.signed);
        gap = gap.max(tail.value().abs());
    }
    Ok(gap)
}

fn check_depth(segments: &[SegmentIntegral], depth: usize) -> Result<()> {
    if depth == 0 || depth > segments.len() {
        return Err(Error::InvalidArgument(format!(
            "depth must lie in 1..={}, got {depth}",
            segments.len()
        )));
    }
    Ok(())
}
