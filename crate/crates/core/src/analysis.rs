//! Error-bound calculators for the polynomial approximation scheme and the
//! MAPE metric used by the benchmarks.

use crate::error::{Error, Result};
use crate::paths::{check_dims, Increments, PiecewiseLinearPath};
use crate::specfun::{bessel_i0, ln_factorial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Sup of `|⟨ẋ, ẏ⟩|` over the grid.
    pub k_max: f64,
    /// Largest rectangle side.
    pub delta: f64,
    pub order: usize,
    pub lx: usize,
    pub ly: usize,
}

impl BoundParams {
    /// Reads `K` and `Δ` off a pair of paths.
    pub fn from_paths(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, order: usize) -> Result<Self> {
        check_dims(x, y)?;
        let (ix, iy) = (Increments::of(x), Increments::of(y));
        let mut k_max = 0.0f64;
        let mut delta = 0.0f64;
        for i in 0..ix.len() {
            delta = delta.max(x.width(i));
            for j in 0..iy.len() {
                k_max = k_max.max(ix.coefficient(i, &iy, j).c.abs());
            }
        }
        for j in 0..iy.len() {
            delta = delta.max(y.width(j));
        }
        Ok(Self {
            k_max,
            delta,
            order,
            lx: ix.len(),
            ly: iy.len(),
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.k_max.is_finite() && self.k_max >= 0.0) {
            return Err(Error::arg("k_max must be finite and non-negative"));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::arg("delta must be finite and positive"));
        }
        if self.lx == 0 || self.ly == 0 {
            return Err(Error::arg("grid must have at least one cell per side"));
        }
        if self.order < 2 {
            return Err(Error::arg("order must be at least 2"));
        }
        Ok(())
    }
}

/// `max_n |(n!)² c_n / (γKΔ)^n|` over the coefficients of both edges.
pub fn gamma_norm(p: &[f64], q: &[f64], gamma: usize, k_max: f64, delta: f64) -> Result<f64> {
    if gamma == 0 {
        return Err(Error::arg("gamma must be at least 1"));
    }
    let scale = gamma as f64 * k_max * delta;
    if !scale.is_finite() || scale < 0.0 {
        return Err(Error::arg("k_max and delta must be finite and non-negative"));
    }
    let mut best = 0.0f64;
    for coeffs in [p, q] {
        if let Some(c0) = coeffs.first() {
            best = best.max(c0.abs());
        }
        if scale == 0.0 {
            if coeffs.iter().skip(1).any(|&c| c != 0.0) {
                return Err(Error::arg("norm undefined: k_max * delta = 0 with non-constant edge"));
            }
            continue;
        }
        let mut weight = 1.0;
        for (n, c) in coeffs.iter().enumerate().skip(1) {
            let nf = n as f64;
            weight *= nf * nf / scale;
            if *c != 0.0 {
                best = best.max((c * weight).abs());
            }
        }
    }
    Ok(best)
}

/// `Π_{m=0}^{k} I₀(2√(mK)Δ)`.
pub fn f_factor(k: usize, k_max: f64, delta: f64) -> Result<f64> {
    Ok(ln_f_factor(k, k_max, delta)?.exp())
}

fn ln_f_factor(k: usize, k_max: f64, delta: f64) -> Result<f64> {
    (1..=k)
        .map(|m| Ok(bessel_i0(2.0 * (m as f64 * k_max).sqrt() * delta)?.ln()))
        .sum()
}

/// Global truncation error bound of the order-`N` approximation scheme.
pub fn gte_bound(bp: &BoundParams) -> Result<f64> {
    bp.validate()?;
    if bp.k_max == 0.0 {
        return Ok(0.0);
    }
    let n1 = bp.order as f64 + 1.0;
    let l = (bp.lx + bp.ly - 1) as f64;
    let ln = ln_f_factor(bp.lx + bp.ly - 1, bp.k_max, bp.delta)?
        + n1 * (bp.k_max * bp.delta * bp.delta).ln()
        - 2.0 * ln_factorial(bp.order as u32 + 1)
        + n1 * l.ln()
        + (l / (n1 + 1.0) + 1.0).ln();
    Ok(ln.exp())
}

/// Local truncation error bound for one rectangle whose input edges have
/// `‖(p, q)‖_γ = norm_pq`.
pub fn lte_bound(norm_pq: f64, gamma: usize, c_abs: f64, delta: f64, order: usize) -> Result<f64> {
    if order < 2 {
        return Err(Error::arg("order must be at least 2"));
    }
    if gamma == 0 {
        return Err(Error::arg("gamma must be at least 1"));
    }
    if c_abs == 0.0 || norm_pq == 0.0 {
        return Ok(0.0);
    }
    let g = gamma as f64;
    let n1 = order as f64 + 1.0;
    let ln = 2f64.ln()
        + norm_pq.ln()
        + bessel_i0(2.0 * (g * c_abs).sqrt() * delta)?.ln()
        + bessel_i0(2.0 * ((g + 1.0) * c_abs).sqrt() * delta)?.ln()
        + n1 * ((g + 1.0) * c_abs * delta * delta).ln()
        - 2.0 * ln_factorial(order as u32 + 1);
    Ok(ln.exp())
}

/// Mean of `|est - ref| / |ref|`, as a fraction.
pub fn mape(estimates: &[f64], reference: &[f64]) -> Result<f64> {
    if estimates.len() != reference.len() {
        return Err(Error::arg(format!(
            "length mismatch: {} estimates vs {} reference values",
            estimates.len(),
            reference.len()
        )));
    }
    if reference.is_empty() {
        return Err(Error::arg("mape of an empty vector"));
    }
    if reference.contains(&0.0) {
        return Err(Error::arg("reference contains a zero entry"));
    }
    let total: f64 = estimates
        .iter()
        .zip(reference)
        .map(|(e, r)| ((e - r) / r).abs())
        .sum();
    Ok(total / reference.len() as f64)
}
