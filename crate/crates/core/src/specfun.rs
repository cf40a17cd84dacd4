//! Series evaluation of `I₀` and `₀F₁`, plus the factorial-ratio tables
//! consumed by the power-series propagation.

use crate::error::{Error, Result};

/// Relative size of the last retained term.
const SERIES_EPS: f64 = 1e-17;

/// Term cap for `₀F₁`. Exceeding it means the argument is far outside the
/// regime the solvers produce.
const HYP0F1_MAX_TERMS: usize = 200;

/// Largest supported truncation order for [`CoeffTables`].
pub const MAX_ORDER: usize = 64;

/// Modified Bessel function of the first kind of order zero,
/// `Σ (z/2)^{2k} / (k!)²`.
pub fn bessel_i0(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::arg("bessel_i0 of NaN"));
    }
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term <= SERIES_EPS * sum {
            return Ok(sum);
        }
    }
}

/// Confluent hypergeometric limit function `₀F₁(; b; z) = Σ z^n / ((b)_n n!)`
/// for a positive integer `b`.
pub fn hyp0f1(b: u32, z: f64) -> Result<f64> {
    if b == 0 {
        return Err(Error::arg("hyp0f1 needs b >= 1"));
    }
    if !z.is_finite() {
        return Err(Error::arg(format!("hyp0f1 of non-finite argument {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let b = f64::from(b);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..HYP0F1_MAX_TERMS {
        let n = n as f64;
        term *= z / ((b + n) * (n + 1.0));
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if term.abs() <= SERIES_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "0F1",
        arg: z,
        terms: HYP0F1_MAX_TERMS,
    })
}

/// `ln n!` by direct summation; exact enough for the bound calculators.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Factorial ratios shared by every rectangle of a sweep:
/// `a[n][k] = k! / ((n-k)! n!)` for `k ≤ n` and `b[n][k] = k! / ((n+k)! n!)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTables {
    order: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CoeffTables {
    pub fn new(order: usize) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(Error::arg(format!(
                "order must lie in 2..={MAX_ORDER}, got {order}"
            )));
        }
        let w = order + 1;
        let mut a = vec![0.0; w * w];
        let mut b = vec![0.0; w * w];
        let mut inv_fact = 1.0;
        for n in 0..w {
            if n > 0 {
                inv_fact /= n as f64;
            }
            // a[n][k] / a[n][k-1] = k (n - k + 1)
            a[n * w] = inv_fact * inv_fact;
            for k in 1..=n {
                a[n * w + k] = a[n * w + k - 1] * (k * (n - k + 1)) as f64;
            }
            // b[n][k] / b[n][k-1] = k / (n + k)
            b[n * w] = inv_fact * inv_fact;
            for k in 1..w {
                b[n * w + k] = b[n * w + k - 1] * k as f64 / (n + k) as f64;
            }
        }
        Ok(Self { order, a, b })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn a(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.a[n * (self.order + 1) + k]
    }

    #[inline]
    pub fn b(&self, n: usize, k: usize) -> f64 {
        self.b[n * (self.order + 1) + k]
    }

    pub(crate) fn a_row(&self, n: usize) -> &[f64] {
        let w = self.order + 1;
        &self.a[n * w..n * w + n + 1]
    }

    pub(crate) fn b_row(&self, n: usize) -> &[f64] {
        let w = self.order + 1;
        &self.b[n * w..(n + 1) * w]
    }
}

pub fn coeff_tables(order: usize) -> Result<CoeffTables> {
    CoeffTables::new(order)
}
