//! Polynomial approximation scheme.
//!
//! On every rectangle the bottom and left edges of the solution are
//! represented by degree-`N` polynomials in the local offsets `s - s_i` and
//! `t - t_j`. The exact solution for power-series boundary data maps the
//! edge coefficients `(p, q)` linearly to the coefficients of the top and
//! right edges; truncating that map at order `N` gives the one-step update
//! [`lambda_step`], which is swept across the whole grid.

use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::paths::{check_dims, Increments, PiecewiseLinearPath, RectangleCoefficient};
use crate::specfun::{CoeffTables, MAX_ORDER};
use crate::wavefront::{sweep, Schedule};

pub const DEFAULT_ORDER: usize = 8;

/// Bottom-edge (`p`) and left-edge (`q`) polynomial coefficients of one rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCoefficients {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl EdgeCoefficients {
    /// Constant unit boundary data `(1, 0, …, 0)` on both edges.
    pub fn unit(order: usize) -> Self {
        let mut p = vec![0.0; order + 1];
        p[0] = 1.0;
        Self { q: p.clone(), p }
    }

    pub fn order(&self) -> usize {
        self.p.len() - 1
    }

    fn validate(&self, order: usize) -> Result<()> {
        if self.p.len() != order + 1 || self.q.len() != order + 1 {
            return Err(Error::arg(format!(
                "edge coefficients of lengths ({}, {}) do not match order {order}",
                self.p.len(),
                self.q.len()
            )));
        }
        if self.p.iter().chain(&self.q).any(|v| !v.is_finite()) {
            return Err(Error::arg("non-finite edge coefficient"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    pub order: usize,
    /// Also report the solution at every grid corner.
    pub return_grid: bool,
    pub schedule: Schedule,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            return_grid: false,
            schedule: Schedule::Serial,
        }
    }
}

impl ApproxConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }
}

/// Kernel values at the `(ℓ_x + 1) × (ℓ_y + 1)` grid corners, row-major in `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerGrid {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl CornerGrid {
    fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![1.0; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.cols + j] = v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub value: f64,
    pub corners: Option<CornerGrid>,
}

/// Horner evaluation of `Σ coeffs[n] u^n`.
pub fn eval_poly(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// Truncated one-rectangle propagation into caller-provided buffers.
fn propagate(
    p: &[f64],
    q: &[f64],
    r: &RectangleCoefficient,
    tables: &CoeffTables,
    p_out: &mut [f64],
    q_out: &mut [f64],
) {
    let n_max = tables.order();
    let mut cdt = [0.0; MAX_ORDER + 1];
    let mut cds = [0.0; MAX_ORDER + 1];
    let mut dt = [0.0; MAX_ORDER + 1];
    let mut ds = [0.0; MAX_ORDER + 1];
    let (c_dt, c_ds) = (r.c * r.dt, r.c * r.ds);
    cdt[0] = 1.0;
    cds[0] = 1.0;
    dt[0] = 1.0;
    ds[0] = 1.0;
    for m in 1..=n_max {
        cdt[m] = cdt[m - 1] * c_dt;
        cds[m] = cds[m - 1] * c_ds;
        dt[m] = dt[m - 1] * r.dt;
        ds[m] = ds[m - 1] * r.ds;
    }
    for n in 0..=n_max {
        let a = tables.a_row(n);
        let b = tables.b_row(n);
        let mut own_p = 0.0;
        let mut own_q = 0.0;
        for k in 0..=n {
            own_p += p[k] * a[k] * cdt[n - k];
            own_q += q[k] * a[k] * cds[n - k];
        }
        let mut cross_p = 0.0;
        let mut cross_q = 0.0;
        for k in 1..=n_max {
            cross_p += q[k] * b[k] * dt[k];
            cross_q += p[k] * b[k] * ds[k];
        }
        p_out[n] = own_p + cross_p * cdt[n];
        q_out[n] = own_q + cross_q * cds[n];
    }
}

/// Maps the bottom/left edge coefficients of a rectangle to the coefficients
/// of its top/right edges, truncated at the order of `tables`.
pub fn lambda_step(
    e: &EdgeCoefficients,
    r: &RectangleCoefficient,
    tables: &CoeffTables,
) -> Result<EdgeCoefficients> {
    let order = tables.order();
    e.validate(order)?;
    let mut out = EdgeCoefficients {
        p: vec![0.0; order + 1],
        q: vec![0.0; order + 1],
    };
    propagate(&e.p, &e.q, r, tables, &mut out.p, &mut out.q);
    Ok(out)
}

/// Runs the scheme over the grid, calling `observe(i, j, p_top, q_right)`
/// after every cell.
fn run<O>(
    x: &PiecewiseLinearPath,
    y: &PiecewiseLinearPath,
    order: usize,
    schedule: Schedule,
    observe: O,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)>
where
    O: Fn(usize, usize, &[f64], &[f64]) + Sync,
{
    check_dims(x, y)?;
    let tables = CoeffTables::new(order)?;
    let (ix, iy) = (Increments::of(x), Increments::of(y));
    let unit = EdgeCoefficients::unit(order);
    let mut row = vec![unit.p; ix.len()];
    let mut col = vec![unit.q; iy.len()];
    sweep(&mut row, &mut col, schedule, |i, j, p, q| {
        let r = ix.coefficient(i, &iy, j);
        let mut p_out = [0.0; MAX_ORDER + 1];
        let mut q_out = [0.0; MAX_ORDER + 1];
        propagate(p, q, &r, &tables, &mut p_out, &mut q_out);
        p.copy_from_slice(&p_out[..=order]);
        q.copy_from_slice(&q_out[..=order]);
        observe(i, j, p, q);
        Ok(())
    })?;
    Ok((row, col))
}

fn endpoint(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, row: &[Vec<f64>], col: &[Vec<f64>]) -> f64 {
    let ds = x.width(x.segments() - 1);
    let dt = y.width(y.segments() - 1);
    0.5 * (eval_poly(row.last().unwrap(), ds) + eval_poly(col.last().unwrap(), dt))
}

/// Solves the kernel PDE for `x` and `y` with the order-`N` scheme.
pub fn solve(
    x: &PiecewiseLinearPath,
    y: &PiecewiseLinearPath,
    cfg: &ApproxConfig,
) -> Result<Solution> {
    let (lx, ly) = (x.segments(), y.segments());
    if !cfg.return_grid {
        let (row, col) = run(x, y, cfg.order, cfg.schedule, |_, _, _, _| {})?;
        return Ok(Solution {
            value: endpoint(x, y, &row, &col),
            corners: None,
        });
    }
    // Corner (i, j+1) comes from the top edge of cell (i, j), corner (ℓ_x, j)
    // from the right edge of the last cell in row j.
    let grid = Mutex::new(CornerGrid::ones(lx + 1, ly + 1));
    let (row, col) = run(x, y, cfg.order, cfg.schedule, |i, j, p, q| {
        let mut g = grid.lock().unwrap();
        g.set(i, j + 1, p[0]);
        if i + 1 == lx {
            g.set(lx, j, q[0]);
        }
    })?;
    let value = endpoint(x, y, &row, &col);
    let mut grid = grid.into_inner().unwrap();
    grid.set(lx, ly, value);
    Ok(Solution {
        value,
        corners: Some(grid),
    })
}

/// Kernel value only.
pub fn kernel(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, order: usize) -> Result<f64> {
    solve(x, y, &ApproxConfig::with_order(order)).map(|s| s.value)
}

/// Output coefficients `(p^{i,j+1}, q^{i+1,j})` of every cell, indexed
/// `i * ℓ_y + j`.
pub fn edge_history(
    x: &PiecewiseLinearPath,
    y: &PiecewiseLinearPath,
    order: usize,
) -> Result<Vec<EdgeCoefficients>> {
    let ly = y.segments();
    let slots = Mutex::new(vec![None; x.segments() * ly]);
    run(x, y, order, Schedule::Serial, |i, j, p, q| {
        slots.lock().unwrap()[i * ly + j] = Some(EdgeCoefficients {
            p: p.to_vec(),
            q: q.to_vec(),
        });
    })?;
    Ok(slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|e| e.expect("every cell is visited"))
        .collect())
}
