//! Gram matrices over path batches, MMD estimators and a permutation
//! two-sample test.

use std::fmt;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::finitediff::{self, FdConfig, FdOrder};
use crate::paths::PiecewiseLinearPath;
use crate::polyapprox::{self, ApproxConfig};
use crate::polyinterp::{self, InterpConfig};
use crate::sigoracle::{self, OracleConfig};
use crate::wavefront::Schedule;

/// Which solver produces kernel values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    PolyApprox { order: usize },
    PolyInterp { order: usize },
    FiniteDiff { order: FdOrder, refinement: usize },
    Oracle(OracleConfig),
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::PolyApprox { order } => write!(f, "polyapprox(order={order})"),
            Scheme::PolyInterp { order } => write!(f, "polyinterp(order={order})"),
            Scheme::FiniteDiff { order, refinement } => {
                let o = match order {
                    FdOrder::First => 1,
                    FdOrder::Second => 2,
                };
                write!(f, "fd{o}(refine={refinement})")
            }
            Scheme::Oracle(cfg) => write!(f, "oracle(level={})", cfg.level),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    /// Size of the pair-level worker pool used by [`gram`].
    pub workers: usize,
}

impl SolverConfig {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Kernel of a single pair, solved on the calling thread.
    pub fn kernel(&self, x: &PiecewiseLinearPath, y: &PiecewiseLinearPath) -> Result<f64> {
        match self.scheme {
            Scheme::PolyApprox { order } => {
                let cfg = ApproxConfig {
                    schedule: Schedule::Serial,
                    ..ApproxConfig::with_order(order)
                };
                Ok(polyapprox::solve(x, y, &cfg)?.value)
            }
            Scheme::PolyInterp { order } => polyinterp::solve(x, y, &InterpConfig::with_order(order)),
            Scheme::FiniteDiff { order, refinement } => {
                finitediff::solve(x, y, &FdConfig::new(order, refinement))
            }
            Scheme::Oracle(cfg) => sigoracle::truncated_kernel(x, y, &cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    scheme: Scheme,
}

impl GramMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.values)
    }

    fn mean_block(&self, rows: &[usize], cols: &[usize], skip_diagonal: bool) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for &i in rows {
            for &j in cols {
                if skip_diagonal && i == j {
                    continue;
                }
                sum += self.get(i, j);
                count += 1;
            }
        }
        sum / count as f64
    }
}

fn check_batch(batch: &[PiecewiseLinearPath], dim: usize) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    for p in batch {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
        }
    }
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::arg("worker count must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::arg(format!("cannot start worker pool: {e}")))
}

/// `values[i][j] = kernel(xs[i], ys[j])`. When `xs` and `ys` are the same
/// slice only the upper triangle is solved and mirrored.
pub fn gram(
    xs: &[PiecewiseLinearPath],
    ys: &[PiecewiseLinearPath],
    solver: &SolverConfig,
) -> Result<GramMatrix> {
    check_batch(xs, xs.first().map_or(0, |p| p.dim()))?;
    check_batch(ys, xs[0].dim())?;
    let same = std::ptr::eq(xs, ys);
    let (rows, cols) = (xs.len(), ys.len());
    let pairs: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (if same { i } else { 0 }..cols).map(move |j| (i, j)))
        .collect();

    let pool = pool(solver.workers)?;
    let solved: Vec<f64> = pool.install(|| -> Result<Vec<f64>> {
        if let Scheme::Oracle(cfg) = solver.scheme {
            // One signature per path, then plain dot products.
            let sx = xs
                .par_iter()
                .map(|p| sigoracle::signature(p, &cfg))
                .collect::<Result<Vec<_>>>()?;
            let sy = if same {
                sx.clone()
            } else {
                ys.par_iter()
                    .map(|p| sigoracle::signature(p, &cfg))
                    .collect::<Result<Vec<_>>>()?
            };
            pairs.par_iter().map(|&(i, j)| sx[i].dot(&sy[j])).collect()
        } else {
            pairs.par_iter().map(|&(i, j)| solver.kernel(&xs[i], &ys[j])).collect()
        }
    })?;

    let mut values = vec![0.0; rows * cols];
    for (&(i, j), v) in pairs.iter().zip(solved) {
        values[i * cols + j] = v;
        if same {
            values[j * cols + i] = v;
        }
    }
    Ok(GramMatrix { rows, cols, values, scheme: solver.scheme })
}

/// MMD² between index subsets of a pooled self-Gram.
pub fn mmd2_from_gram(k: &GramMatrix, xi: &[usize], yi: &[usize], unbiased: bool) -> Result<f64> {
    if xi.is_empty() || yi.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if unbiased && (xi.len() < 2 || yi.len() < 2) {
        return Err(Error::arg("unbiased MMD needs at least 2 paths per batch"));
    }
    Ok(k.mean_block(xi, xi, unbiased) - 2.0 * k.mean_block(xi, yi, false)
        + k.mean_block(yi, yi, unbiased))
}

fn pooled(xs: &[PiecewiseLinearPath], ys: &[PiecewiseLinearPath], solver: &SolverConfig) -> Result<GramMatrix> {
    let all: Vec<PiecewiseLinearPath> = xs.iter().chain(ys).cloned().collect();
    gram(&all, &all, solver)
}

/// Squared maximum mean discrepancy between two batches.
pub fn mmd2(
    xs: &[PiecewiseLinearPath],
    ys: &[PiecewiseLinearPath],
    solver: &SolverConfig,
    unbiased: bool,
) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if unbiased && (xs.len() < 2 || ys.len() < 2) {
        return Err(Error::arg("unbiased MMD needs at least 2 paths per batch"));
    }
    let k = pooled(xs, ys, solver)?;
    let xi: Vec<usize> = (0..xs.len()).collect();
    let yi: Vec<usize> = (xs.len()..xs.len() + ys.len()).collect();
    mmd2_from_gram(&k, &xi, &yi, unbiased)
}

/// Permutation p-value `(1 + #{perm ≥ observed}) / (1 + n_perm)` for the
/// biased MMD² statistic. Statistics within `1e-12 · max|K|` of the observed
/// value count as ties.
pub fn permutation_test(
    xs: &[PiecewiseLinearPath],
    ys: &[PiecewiseLinearPath],
    solver: &SolverConfig,
    n_perm: usize,
    seed: u64,
) -> Result<f64> {
    if n_perm == 0 {
        return Err(Error::arg("need at least one permutation"));
    }
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let k = pooled(xs, ys, solver)?;
    let m = xs.len();
    let mut idx: Vec<usize> = (0..m + ys.len()).collect();
    let observed = mmd2_from_gram(&k, &idx[..m], &idx[m..], false)?;
    let tol = 1e-12 * k.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n_perm {
        idx.shuffle(&mut rng);
        if mmd2_from_gram(&k, &idx[..m], &idx[m..], false)? >= observed - tol {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + n_perm) as f64)
}
