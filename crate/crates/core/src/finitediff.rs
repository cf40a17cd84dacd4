//! Explicit finite-difference baseline.
//!
//! Both paths are refined by the factor `γ` and the integral form of the
//! PDE is stepped node by node on the refined grid, approximating the double
//! integral over each cell by a first- or second-order quadrature.

use crate::error::{Error, Result};
use crate::paths::{check_dims, Increments, PiecewiseLinearPath};
use crate::wavefront::{sweep, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FdConfig {
    pub order: FdOrder,
    pub refinement: usize,
    pub schedule: Schedule,
}

impl FdConfig {
    pub fn new(order: FdOrder, refinement: usize) -> Self {
        Self {
            order,
            refinement,
            schedule: Schedule::Serial,
        }
    }
}

impl Default for FdConfig {
    fn default() -> Self {
        Self::new(FdOrder::Second, 1)
    }
}

/// Value at the top-right node of a cell from its other three nodes
/// (`k_sv` bottom-right, `k_ut` top-left, `k_uv` bottom-left) and the
/// increment product `inc = ⟨Δx, Δy⟩` of the cell.
#[inline]
pub fn fd_step(k_sv: f64, k_ut: f64, k_uv: f64, inc: f64, order: FdOrder) -> f64 {
    let first = k_sv + k_ut - k_uv + 0.5 * inc * (k_sv + k_ut);
    match order {
        FdOrder::First => first,
        FdOrder::Second => first + inc * inc / 12.0 * (k_sv + k_ut + k_uv),
    }
}

/// Kernel value at the far corner of the refined node grid.
pub fn solve(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, cfg: &FdConfig) -> Result<f64> {
    check_dims(x, y)?;
    if cfg.refinement == 0 {
        return Err(Error::arg("refinement factor must be at least 1"));
    }
    let ix = Increments::of(&x.refine(cfg.refinement)?);
    let iy = Increments::of(&y.refine(cfg.refinement)?);
    // Edge state: node values at the two ends of a cell's bottom (row) or
    // left (col) edge, ordered (start, end).
    let mut row = vec![[1.0, 1.0]; ix.len()];
    let mut col = vec![[1.0, 1.0]; iy.len()];
    sweep(&mut row, &mut col, cfg.schedule, |i, j, bottom, left| {
        let [k_uv, k_sv] = *bottom;
        let k_ut = left[1];
        let k_st = fd_step(k_sv, k_ut, k_uv, ix.inner(i, &iy, j), cfg.order);
        *bottom = [k_ut, k_st];
        *left = [k_sv, k_st];
        Ok(())
    })?;
    Ok(row[ix.len() - 1][1])
}
