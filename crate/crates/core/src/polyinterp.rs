//! Polynomial interpolation scheme.
//!
//! Edges are carried as samples at the `N + 1` Chebyshev extrema of their
//! interval. On each rectangle both incoming edges are interpolated by
//! degree-`N` polynomials, and the outgoing edges are sampled from the exact
//! solution for polynomial boundary data,
//!
//! ```text
//! k(s, t) = g₀ ₀F₁(1; C u v) + Σ_{n=1}^{N} (g_n u^n + h_n v^n) ₀F₁(n+1; C u v),
//! ```
//!
//! with `u = s - s_i`, `v = t - t_j`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{Error, Result};
use crate::paths::{check_dims, Increments, PiecewiseLinearPath, RectangleCoefficient};
use crate::specfun::hyp0f1;
use crate::wavefront::{sweep, Schedule};

pub const DEFAULT_ORDER: usize = 8;

/// Relative interpolation residual tolerated at the nodes.
const FIT_RESIDUAL_TOL: f64 = 1e-12;

/// Relative disagreement tolerated between the two corner values.
const CORNER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpConfig {
    pub order: usize,
    pub schedule: Schedule,
}

impl InterpConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            schedule: Schedule::Serial,
        }
    }

    /// Interpolation nodes per edge.
    pub fn node_count(&self) -> usize {
        self.order + 1
    }
}

impl Default for InterpConfig {
    fn default() -> Self {
        Self::with_order(DEFAULT_ORDER)
    }
}

/// Polynomial in the local variable `u = s - lo`, monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    pub coeffs: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl EdgePolynomial {
    /// Value at the local offset `u`.
    pub fn eval_local(&self, u: f64) -> f64 {
        crate::polyapprox::eval_poly(&self.coeffs, u)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.eval_local(s - self.lo)
    }
}

/// Chebyshev extrema `(hi-lo)/2 cos(πm/(count-1)) + (hi+lo)/2`, `m = 0..count`,
/// so the first node is `hi` and the last is `lo`.
pub fn chebyshev_nodes(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::arg(format!("degenerate interval [{lo}, {hi}]")));
    }
    if count < 2 {
        return Err(Error::arg("need at least 2 Chebyshev nodes"));
    }
    let (half, mid) = (0.5 * (hi - lo), 0.5 * (hi + lo));
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|m| {
            // pin the endpoints so they are hit exactly
            if m == 0 {
                hi
            } else if m + 1 == count {
                lo
            } else {
                half * (PI * m as f64 / last).cos() + mid
            }
        })
        .collect())
}

/// Factored Vandermonde system on nodes rescaled to `[0, 1]`.
struct Vandermonde {
    unit_nodes: Vec<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

impl Vandermonde {
    fn new(unit_nodes: Vec<f64>) -> Result<Self> {
        let n = unit_nodes.len();
        let v = DMatrix::from_fn(n, n, |r, c| unit_nodes[r].powi(c as i32));
        let lu = v.lu();
        if !lu.is_invertible() {
            return Err(Error::arg("duplicate interpolation nodes"));
        }
        Ok(Self { unit_nodes, lu })
    }

    /// Coefficients in the unit variable, with the residual check at the nodes.
    fn fit_unit(&self, samples: &[f64]) -> Result<Vec<f64>> {
        let rhs = DVector::from_column_slice(samples);
        let coeffs = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::arg("singular Vandermonde system"))?;
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let residual = self
            .unit_nodes
            .iter()
            .zip(samples)
            .map(|(u, s)| (crate::polyapprox::eval_poly(coeffs.as_slice(), *u) - s).abs())
            .fold(0.0f64, f64::max);
        let tolerance = FIT_RESIDUAL_TOL * scale;
        if residual > tolerance {
            return Err(Error::IllConditioned {
                residual,
                tolerance,
            });
        }
        Ok(coeffs.as_slice().to_vec())
    }

    /// Coefficients in `u = s - lo` for an interval of the given width.
    fn fit(&self, samples: &[f64], width: f64) -> Result<Vec<f64>> {
        let mut coeffs = self.fit_unit(samples)?;
        let mut scale = 1.0;
        for c in coeffs.iter_mut().skip(1) {
            scale /= width;
            *c *= scale;
        }
        Ok(coeffs)
    }
}

/// Interpolating polynomial through `(nodes[m], samples[m])` in the local
/// variable `u = s - lo`.
pub fn fit_polynomial(nodes: &[f64], samples: &[f64], lo: f64) -> Result<EdgePolynomial> {
    if nodes.len() != samples.len() || nodes.len() < 2 {
        return Err(Error::arg(format!(
            "need matching node and sample counts of at least 2, got {} and {}",
            nodes.len(),
            samples.len()
        )));
    }
    let hi = nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::arg("duplicate interpolation nodes"));
    }
    if !(width > 0.0) {
        return Err(Error::arg("interpolation nodes must lie above lo"));
    }
    let vm = Vandermonde::new(nodes.iter().map(|s| (s - lo) / width).collect())?;
    Ok(EdgePolynomial {
        coeffs: vm.fit(samples, width)?,
        lo,
        hi,
    })
}

/// `Σ_n (g_n u^n + h_n v^n) ₀F₁(n+1; C u v)` with the `n = 0` term
/// `corner · ₀F₁(1; C u v)`.
fn phi_sum(corner: f64, g: &[f64], h: &[f64], c: f64, u: f64, v: f64) -> Result<f64> {
    let z = c * u * v;
    let mut sum = corner * hyp0f1(1, z)?;
    let (mut un, mut vn) = (1.0, 1.0);
    for n in 1..g.len().max(h.len()) {
        un *= u;
        vn *= v;
        let gn = g.get(n).copied().unwrap_or(0.0);
        let hn = h.get(n).copied().unwrap_or(0.0);
        if gn == 0.0 && hn == 0.0 {
            continue;
        }
        sum += (gn * un + hn * vn) * hyp0f1(n as u32 + 1, z)?;
    }
    Ok(sum)
}

/// Exact solution at offsets `(s_off, t_off)` of a rectangle whose bottom and
/// left edges are the polynomials `g` and `h`.
pub fn phi_eval(
    g: &EdgePolynomial,
    h: &EdgePolynomial,
    r: &RectangleCoefficient,
    s_off: f64,
    t_off: f64,
) -> Result<f64> {
    let (g0, h0) = (g.coeffs[0], h.coeffs[0]);
    if (g0 - h0).abs() > CORNER_TOL * g0.abs().max(1.0) {
        return Err(Error::CornerMismatch { g0, h0 });
    }
    if !(0.0..=r.ds).contains(&s_off) || !(0.0..=r.dt).contains(&t_off) {
        return Err(Error::arg(format!(
            "offsets ({s_off}, {t_off}) outside the {}x{} rectangle",
            r.ds, r.dt
        )));
    }
    phi_sum(g0, &g.coeffs, &h.coeffs, r.c, s_off, t_off)
}

/// Solves the kernel PDE for `x` and `y` with the order-`N` interpolation scheme.
pub fn solve(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, cfg: &InterpConfig) -> Result<f64> {
    check_dims(x, y)?;
    if cfg.order < 2 {
        return Err(Error::arg(format!("order must be at least 2, got {}", cfg.order)));
    }
    let count = cfg.node_count();
    let unit_nodes = chebyshev_nodes(0.0, 1.0, count)?;
    let vm = Vandermonde::new(unit_nodes.clone())?;
    let (ix, iy) = (Increments::of(x), Increments::of(y));

    // Samples at the nodes, first node at the far end, last at the corner.
    let mut row = vec![vec![1.0; count]; ix.len()];
    let mut col = vec![vec![1.0; count]; iy.len()];
    sweep(&mut row, &mut col, cfg.schedule, |i, j, bottom, left| {
        let r = ix.coefficient(i, &iy, j);
        // Both edges estimate the shared corner; use their mean so the
        // update is symmetric under swapping the two paths.
        let corner = 0.5 * (bottom[count - 1] + left[count - 1]);
        bottom[count - 1] = corner;
        left[count - 1] = corner;
        let g = vm.fit(bottom, r.ds)?;
        let h = vm.fit(left, r.dt)?;
        let corner = 0.5 * (g[0] + h[0]);
        for (m, u) in unit_nodes.iter().enumerate() {
            bottom[m] = phi_sum(corner, &g, &h, r.c, u * r.ds, r.dt)?;
            left[m] = phi_sum(corner, &g, &h, r.c, r.ds, u * r.dt)?;
        }
        Ok(())
    })?;
    Ok(0.5 * (row[ix.len() - 1][0] + col[iy.len() - 1][0]))
}

pub fn kernel(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, order: usize) -> Result<f64> {
    solve(x, y, &InterpConfig::with_order(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{make_path, sample_brownian};

    const I0_2: f64 = 2.2795853023360673;

    #[test]
    fn node_examples() {
        let n = chebyshev_nodes(-1.0, 1.0, 3).unwrap();
        assert_eq!(n[0], 1.0);
        assert!(n[1].abs() < 1e-16);
        assert_eq!(n[2], -1.0);
        let n = chebyshev_nodes(0.0, 1.0, 3).unwrap();
        assert_eq!(n[0], 1.0);
        assert!((n[1] - 0.5).abs() < 1e-16);
        assert_eq!(n[2], 0.0);
        assert_eq!(chebyshev_nodes(0.0, 1.0, 2).unwrap(), vec![1.0, 0.0]);
        assert!(chebyshev_nodes(1.0, 1.0, 3).is_err());
        assert!(chebyshev_nodes(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn fit_reproduces_low_degree() {
        let nodes = [1.0, 0.5, 0.0];
        let p = fit_polynomial(&nodes, &[1.0, 0.25, 0.0], 0.0).unwrap();
        for (c, e) in p.coeffs.iter().zip([0.0, 0.0, 1.0]) {
            assert!((c - e).abs() < 1e-13);
        }
        let nodes = chebyshev_nodes(2.0, 3.5, 7).unwrap();
        let p = fit_polynomial(&nodes, &[4.25; 7], 2.0).unwrap();
        assert!((p.coeffs[0] - 4.25).abs() < 1e-13);
        assert!(p.coeffs[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn fit_exponential() {
        let nodes = chebyshev_nodes(0.0, 1.0, 9).unwrap();
        let samples: Vec<f64> = nodes.iter().map(|s| s.exp()).collect();
        let p = fit_polynomial(&nodes, &samples, 0.0).unwrap();
        for k in 0..100 {
            let s = (k as f64 + 0.5) / 100.0;
            assert!((p.eval(s) - s.exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_rejects_duplicates() {
        assert!(fit_polynomial(&[0.0, 0.5, 0.5], &[1.0, 2.0, 3.0], 0.0).is_err());
        assert!(fit_polynomial(&[0.0, 0.5], &[1.0], 0.0).is_err());
    }

    fn constant_poly(c: f64, order: usize, hi: f64) -> EdgePolynomial {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        EdgePolynomial { coeffs, lo: 0.0, hi }
    }

    #[test]
    fn phi_examples() {
        let g = constant_poly(1.0, 6, 1.0);
        let r = RectangleCoefficient::new(1.0, 1.0, 1.0).unwrap();
        let v = phi_eval(&g, &g, &r, 1.0, 1.0).unwrap();
        assert!((v - I0_2).abs() < 1e-15 * I0_2);

        let g = EdgePolynomial { coeffs: vec![2.0, 0.5, -1.0, 0.25], lo: 0.0, hi: 1.0 };
        let h = EdgePolynomial { coeffs: vec![2.0, -0.3, 0.2, 0.7], lo: 0.0, hi: 2.0 };
        let r0 = RectangleCoefficient::new(0.0, 1.0, 2.0).unwrap();
        let v = phi_eval(&g, &h, &r0, 0.6, 1.3).unwrap();
        let expect = g.eval_local(0.6) + h.eval_local(1.3) - 2.0;
        assert!((v - expect).abs() < 1e-15 * expect.abs());

        let r = RectangleCoefficient::new(-3.0, 1.0, 2.0).unwrap();
        let v = phi_eval(&g, &h, &r, 0.0, 1.3).unwrap();
        assert!((v - h.eval_local(1.3)).abs() < 1e-15 * v.abs());

        let bad = EdgePolynomial { coeffs: vec![2.1, 0.0], lo: 0.0, hi: 1.0 };
        assert!(matches!(phi_eval(&g, &bad, &r, 0.5, 0.5), Err(Error::CornerMismatch { .. })));
        assert!(phi_eval(&g, &h, &r, 1.5, 0.5).is_err());
    }

    #[test]
    fn constant_path_is_one() {
        let x = make_path(None, &[vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let y = sample_brownian(2, 8, 2).unwrap();
        assert_eq!(kernel(&x, &y, 6).unwrap(), 1.0);
    }

    #[test]
    fn single_segment_matches_i0() {
        let x = make_path(None, &[vec![0.0, 0.0], vec![0.6, 0.8]]).unwrap();
        let v = kernel(&x, &x, 8).unwrap();
        assert!((v - I0_2).abs() < 1e-13 * I0_2, "{v}");
    }

    #[test]
    fn wavefront_matches_serial() {
        let x = sample_brownian(11, 7, 2).unwrap();
        let y = sample_brownian(12, 9, 2).unwrap();
        let a = solve(&x, &y, &InterpConfig::with_order(6)).unwrap();
        let b = solve(&x, &y, &InterpConfig { order: 6, schedule: Schedule::Wavefront }).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
