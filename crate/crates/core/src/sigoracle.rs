//! Truncated signatures and the truncated signature kernel.
//!
//! Level `k` of a signature is a dense `d^k` tensor stored flat, first
//! factor most significant. The signature of a linear segment is the tensor
//! exponential of its increment and concatenation is Chen's product, so a
//! piecewise-linear path is handled exactly up to the truncation level.

use crate::error::{Error, Result};
use crate::paths::{check_dims, PiecewiseLinearPath};

/// Default truncation level for 2-d reference computations.
pub const DEFAULT_LEVEL: usize = 18;

/// Default memory cap for a single signature, 1 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub level: usize,
    pub memory_cap: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            level: DEFAULT_LEVEL,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

impl OracleConfig {
    pub fn with_level(level: usize) -> Self {
        Self {
            level,
            ..Self::default()
        }
    }
}

/// Bytes needed for one truncated tensor of the given dimension and level.
pub fn tensor_bytes(dim: usize, level: usize) -> u128 {
    let mut total: u128 = 0;
    let mut block: u128 = 1;
    for _ in 0..=level {
        total = total.saturating_add(block);
        block = block.saturating_mul(dim as u128);
    }
    total.saturating_mul(8)
}

fn check_cap(dim: usize, level: usize, cap: u64) -> Result<()> {
    let required = tensor_bytes(dim, level);
    if required > u128::from(cap) {
        return Err(Error::MemoryCap { required, cap });
    }
    Ok(())
}

/// Element of the truncated tensor algebra `⊕_{k≤M} (R^d)^{⊗k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTensor {
    dim: usize,
    blocks: Vec<Vec<f64>>,
}

impl TruncatedTensor {
    /// The unit `(1, 0, 0, …)`.
    pub fn identity(dim: usize, level: usize) -> Self {
        let blocks = (0..=level)
            .map(|k| {
                let mut b = vec![0.0; dim.pow(k as u32)];
                if k == 0 {
                    b[0] = 1.0;
                }
                b
            })
            .collect();
        Self { dim, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, k: usize) -> &[f64] {
        &self.blocks[k]
    }

    /// Flat inner product summed over all levels.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(a, b)| a * b).sum::<f64>())
            .sum())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.level() != other.level() {
            return Err(Error::arg(format!(
                "truncation levels differ: {} vs {}",
                self.level(),
                other.level()
            )));
        }
        Ok(())
    }

    /// In-place right multiplication by `exp(delta)`, evaluated level by
    /// level with a Horner recursion from the top level down.
    fn mul_exp(&mut self, delta: &[f64]) {
        let d = self.dim;
        let mut acc = Vec::new();
        let mut next = Vec::new();
        for n in (1..self.blocks.len()).rev() {
            // acc = (…((S_0 δ/n + S_1) δ/(n-1) + S_2) …) δ/1, then + S_n
            acc.clear();
            acc.push(self.blocks[0][0]);
            for k in 1..=n {
                let w = 1.0 / (n - k + 1) as f64;
                next.clear();
                next.reserve(acc.len() * d);
                for a in &acc {
                    let aw = a * w;
                    next.extend(delta.iter().map(|v| aw * v));
                }
                if k < n {
                    for (x, s) in next.iter_mut().zip(&self.blocks[k]) {
                        *x += s;
                    }
                }
                std::mem::swap(&mut acc, &mut next);
            }
            for (s, a) in self.blocks[n].iter_mut().zip(&acc) {
                *s += a;
            }
        }
    }
}

/// Signature of the linear segment with increment `delta`:
/// level `k` is `delta^{⊗k} / k!`.
pub fn segment_signature(delta: &[f64], level: usize, memory_cap: u64) -> Result<TruncatedTensor> {
    if delta.is_empty() {
        return Err(Error::arg("increment must have at least one coordinate"));
    }
    check_cap(delta.len(), level, memory_cap)?;
    let mut blocks = Vec::with_capacity(level + 1);
    blocks.push(vec![1.0]);
    for k in 1..=level {
        let prev: &Vec<f64> = &blocks[k - 1];
        let w = 1.0 / k as f64;
        let next: Vec<f64> = prev
            .iter()
            .flat_map(|a| delta.iter().map(move |v| a * w * v))
            .collect();
        blocks.push(next);
    }
    Ok(TruncatedTensor {
        dim: delta.len(),
        blocks,
    })
}

/// Chen product: level `n` is `Σ_k a_k ⊗ b_{n-k}`.
pub fn chen_concat(a: &TruncatedTensor, b: &TruncatedTensor) -> Result<TruncatedTensor> {
    a.check_shape(b)?;
    let blocks = (0..=a.level())
        .map(|n| {
            let mut out = vec![0.0; a.dim.pow(n as u32)];
            for k in 0..=n {
                let (left, right) = (&a.blocks[k], &b.blocks[n - k]);
                for (i, l) in left.iter().enumerate() {
                    if *l == 0.0 {
                        continue;
                    }
                    let dst = &mut out[i * right.len()..(i + 1) * right.len()];
                    for (o, r) in dst.iter_mut().zip(right) {
                        *o += l * r;
                    }
                }
            }
            out
        })
        .collect();
    Ok(TruncatedTensor { dim: a.dim, blocks })
}

/// Truncated signature of a piecewise-linear path, folding segments left to right.
pub fn signature(path: &PiecewiseLinearPath, cfg: &OracleConfig) -> Result<TruncatedTensor> {
    check_cap(path.dim(), cfg.level, cfg.memory_cap)?;
    let mut sig = TruncatedTensor::identity(path.dim(), cfg.level);
    for i in 0..path.segments() {
        sig.mul_exp(&path.increment(i));
    }
    Ok(sig)
}

/// `Σ_{k≤M} ⟨S_k(x), S_k(y)⟩`.
pub fn truncated_kernel(
    x: &PiecewiseLinearPath,
    y: &PiecewiseLinearPath,
    cfg: &OracleConfig,
) -> Result<f64> {
    check_dims(x, y)?;
    signature(x, cfg)?.dot(&signature(y, cfg)?)
}
