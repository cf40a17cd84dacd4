//! Accuracy and timing harnesses. Both produce rows of the fixed
//! `scheme,param,mape,seconds` report; MAPE is always a fraction.

use std::io::Write;
use std::time::Instant;

use polysig::analysis::mape;
use polysig::gram::{gram, GramMatrix, Scheme, SolverConfig};
use polysig::paths::{sample_brownian_batch, sample_sincos_batch};
use polysig::sigoracle::OracleConfig;
use polysig::PiecewiseLinearPath;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::SchemeKind;

/// Order of the polynomial-approximation Gram used as the timing reference.
pub const TIME_REFERENCE_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scheme: String,
    pub param: String,
    pub mape: f64,
    pub seconds: f64,
}

pub fn write_report(rows: &[BenchRow], out: &mut dyn Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Generator {
    Brownian,
    Sincos,
}

#[derive(Debug, Clone)]
pub struct MapeBench {
    pub generator: Generator,
    pub points: usize,
    pub batch: usize,
    pub schemes: Vec<SchemeKind>,
    pub orders: Vec<usize>,
    pub seed: u64,
    pub oracle: OracleConfig,
    pub workers: usize,
}

fn timed_gram(
    xs: &[PiecewiseLinearPath],
    ys: &[PiecewiseLinearPath],
    solver: &SolverConfig,
) -> CliResult<(GramMatrix, f64)> {
    let start = Instant::now();
    let g = gram(xs, ys, solver)?;
    Ok((g, start.elapsed().as_secs_f64().max(1e-9)))
}

fn batches(
    generator: Generator,
    seed: u64,
    batch: usize,
    points: usize,
    dim: usize,
) -> CliResult<(Vec<PiecewiseLinearPath>, Vec<PiecewiseLinearPath>)> {
    Ok(match generator {
        Generator::Brownian => (
            sample_brownian_batch(seed, batch, points, dim)?,
            sample_brownian_batch(seed.wrapping_add(1), batch, points, dim)?,
        ),
        Generator::Sincos => {
            if dim != 2 {
                return Err(CliError::input("the sincos generator is 2-dimensional"));
            }
            sample_sincos_batch(seed, batch, points)?
        }
    })
}

pub fn bench_mape(cfg: &MapeBench) -> CliResult<Vec<BenchRow>> {
    if cfg.orders.is_empty() || cfg.schemes.is_empty() {
        return Err(CliError::input("need at least one scheme and one order"));
    }
    let (xs, ys) = batches(cfg.generator, cfg.seed, cfg.batch, cfg.points, 2)?;
    let oracle = SolverConfig::new(Scheme::Oracle(cfg.oracle)).with_workers(cfg.workers);
    let reference = gram(&xs, &ys, &oracle)?;
    let mut rows = Vec::new();
    for &kind in &cfg.schemes {
        for &order in &cfg.orders {
            let solver = SolverConfig::new(kind.scheme(order, order)).with_workers(cfg.workers);
            let (g, seconds) = timed_gram(&xs, &ys, &solver)?;
            rows.push(BenchRow {
                scheme: kind.name().into(),
                param: order.to_string(),
                mape: mape(g.values(), reference.values())?,
                seconds,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct TimeBench {
    pub scheme: Scheme,
    pub lengths: Vec<usize>,
    pub dims: Vec<usize>,
    pub workers: Vec<usize>,
    pub batch: usize,
    pub seed: u64,
    pub repeats: usize,
}

/// Best-of-`repeats` wall time of one Gram per configuration. Repeats run in
/// rounds over all configurations so slow drift in machine load is shared.
/// MAPE is measured against a high-order polynomial-approximation Gram of
/// the same batches, which the worker count does not affect.
pub fn bench_time(cfg: &TimeBench) -> CliResult<Vec<BenchRow>> {
    if cfg.lengths.is_empty() || cfg.dims.is_empty() || cfg.workers.is_empty() {
        return Err(CliError::input("need at least one length, dimension and worker count"));
    }
    let reference_solver = SolverConfig::new(Scheme::PolyApprox { order: TIME_REFERENCE_ORDER });
    let mut rows = Vec::new();
    let mut cases = Vec::new();
    for &len in &cfg.lengths {
        for &dim in &cfg.dims {
            let (xs, ys) = batches(Generator::Brownian, cfg.seed, cfg.batch, len, dim)?;
            let reference = gram(&xs, &ys, &reference_solver)?;
            for &workers in &cfg.workers {
                rows.push(BenchRow {
                    scheme: cfg.scheme.to_string(),
                    param: format!("len={len};dim={dim};workers={workers}"),
                    mape: 0.0,
                    seconds: f64::INFINITY,
                });
                cases.push((workers, xs.clone(), ys.clone(), reference.clone()));
            }
        }
    }
    for round in 0..cfg.repeats.max(1) {
        for (row, (workers, xs, ys, reference)) in rows.iter_mut().zip(&cases) {
            let solver = SolverConfig::new(cfg.scheme).with_workers(*workers);
            let (g, seconds) = timed_gram(xs, ys, &solver)?;
            if round == 0 {
                row.mape = mape(g.values(), reference.values())?;
            }
            row.seconds = row.seconds.min(seconds);
        }
    }
    Ok(rows)
}
