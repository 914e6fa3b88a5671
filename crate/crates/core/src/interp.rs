//! Piecewise-linear interpolation on the dyadic grid `k / 2^n`.

use crate::error::{Error, Result};
use crate::problem::CoefficientFn;

/// Largest supported grid level.
pub const MAX_LEVEL: u32 = 30;

/// Level-`n` piecewise-linear interpolant of a primitive on `[0, 1]`.
///
/// Nodes are sampled once at construction; the source function is never
/// queried again.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicInterpolant {
    level: u32,
    nodes: Vec<f64>,
    slopes: Vec<f64>,
}

impl DyadicInterpolant {
    /// Samples `f` at `k / 2^level` for `k = 0..=2^level`.
    pub fn build(f: &CoefficientFn, level: u32) -> Result<Self> {
        check_level(level)?;
        let cells = 1usize << level;
        let nodes = (0..=cells).map(|k| f.value(node_x(k, level))).collect();
        Self::from_nodes(level, nodes)
    }

    pub fn from_nodes(level: u32, nodes: Vec<f64>) -> Result<Self> {
        check_level(level)?;
        let cells = 1usize << level;
        if nodes.len() != cells + 1 {
            return Err(Error::InvalidArgument(format!(
                "level {level} needs {} nodes, got {}",
                cells + 1,
                nodes.len()
            )));
        }
        if let Some((index, &value)) = nodes.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteNode {
                index,
                x: node_x(index, level),
                value,
            });
        }
        let scale = cells as f64;
        let slopes = nodes.windows(2).map(|w| scale * (w[1] - w[0])).collect();
        Ok(Self {
            level,
            nodes,
            slopes,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of cells, `2^level`.
    pub fn cells(&self) -> usize {
        1usize << self.level
    }

    /// Cell width `2^-level`.
    pub fn step(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Cell containing `x`; `x = 1` belongs to the last cell.
    pub fn cell_of(&self, x: f64) -> Result<usize> {
        check_unit(x)?;
        let k = (x * self.cells() as f64).floor() as usize;
        Ok(k.min(self.cells() - 1))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let k = self.cell_of(x)?;
        if x == 1.0 {
            return Ok(self.nodes[self.cells()]);
        }
        // x * 2^n is exact, so t = 0 at nodes and node values come back bit-exactly.
        let t = x * self.cells() as f64 - k as f64;
        Ok(self.nodes[k] + t * (self.nodes[k + 1] - self.nodes[k]))
    }

    /// Slope `2^n (f((k+1)/2^n) - f(k/2^n))` of cell `k`.
    pub fn cell_slope(&self, k: usize) -> Result<f64> {
        self.slopes.get(k).copied().ok_or(Error::CellOutOfRange {
            index: k,
            cells: self.cells(),
        })
    }
}

pub(crate) fn node_x(k: usize, level: u32) -> f64 {
    k as f64 / (1u64 << level) as f64
}

pub(crate) fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        Err(Error::LevelTooLarge(level))
    } else {
        Ok(())
    }
}

pub(crate) fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            x,
            lo: 0.0,
            hi: 1.0,
        })
    }
}
