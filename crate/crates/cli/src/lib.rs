pub mod bench;
pub mod error;
pub mod io;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polysig::finitediff::FdOrder;
use polysig::gram::{gram, mmd2, permutation_test, Scheme, SolverConfig};
use polysig::polyapprox::DEFAULT_ORDER;
use polysig::sigoracle::{OracleConfig, DEFAULT_LEVEL, DEFAULT_MEMORY_CAP};

use crate::bench::{bench_mape, bench_time, write_report, BenchRow, Generator, MapeBench, TimeBench};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    Polyapprox,
    Polyinterp,
    Fd1,
    Fd2,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Polyapprox => "polyapprox",
            SchemeKind::Polyinterp => "polyinterp",
            SchemeKind::Fd1 => "fd1",
            SchemeKind::Fd2 => "fd2",
        }
    }

    pub fn scheme(self, order: usize, refine: usize) -> Scheme {
        match self {
            SchemeKind::Polyapprox => Scheme::PolyApprox { order },
            SchemeKind::Polyinterp => Scheme::PolyInterp { order },
            SchemeKind::Fd1 => Scheme::FiniteDiff { order: FdOrder::First, refinement: refine },
            SchemeKind::Fd2 => Scheme::FiniteDiff { order: FdOrder::Second, refinement: refine },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polysig", version, about = "Signature kernels of piecewise-linear paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum, default_value = "polyapprox")]
    pub scheme: SchemeKind,
    /// Polynomial order for polyapprox / polyinterp.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Grid refinement factor for fd1 / fd2.
    #[arg(long, default_value_t = 1)]
    pub refine: usize,
}

impl SchemeArgs {
    fn scheme(&self) -> Scheme {
        self.scheme.scheme(self.order, self.refine)
    }
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Truncation level of the signature oracle.
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    pub oracle_level: usize,
    /// Largest signature tensor the oracle may allocate, in bytes.
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
    pub memory_cap: u64,
}

impl OracleArgs {
    fn config(&self) -> OracleConfig {
        OracleConfig { level: self.oracle_level, memory_cap: self.memory_cap }
    }
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// First path file (.csv single path or JSON batch).
    pub x: PathBuf,
    /// Second path file.
    pub y: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel of two single paths.
    Kernel {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Gram matrix of two batches, written as CSV.
    Gram {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Squared MMD between two batches.
    Mmd {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Use the biased (V-statistic) estimator.
        #[arg(long)]
        biased: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Permutation two-sample test; prints the p-value.
    Permtest {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 1000)]
        permutations: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Gram MAPE of each scheme and order against the signature oracle.
    BenchMape {
        #[arg(long, value_enum, default_value = "brownian")]
        generator: Generator,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 8)]
        batch: usize,
        /// Orders (refinement factors for fd schemes), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
        orders: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "polyapprox,polyinterp,fd2")]
        schemes: Vec<SchemeKind>,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wall time of one Gram per length, dimension and worker count.
    BenchTime {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_delimiter = ',', default_value = "10,20")]
        lengths: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        workers: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        batch: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn sink<'a>(out: Option<&PathBuf>, stdout: &'a mut dyn Write) -> CliResult<Box<dyn Write + 'a>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(stdout),
    })
}

fn report(rows: &[BenchRow], out: Option<&PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    write_report(rows, &mut *sink(out, stdout)?)?;
    if out.is_some() {
        for r in rows {
            writeln!(stdout, "{} {}: mape {:.3e}% in {:.3}s", r.scheme, r.param, 100.0 * r.mape, r.seconds)?;
        }
    }
    Ok(())
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Kernel { inputs, scheme } => {
            let x = io::read_single(&inputs.x)?;
            let y = io::read_single(&inputs.y)?;
            let k = SolverConfig::new(scheme.scheme()).kernel(&x, &y)?;
            writeln!(stdout, "{}", fmt_value(k))?;
        }
        Command::Gram { inputs, scheme, workers, out } => {
            let xs = io::read_paths(&inputs.x)?;
            let ys = io::read_paths(&inputs.y)?;
            let g = gram(&xs, &ys, &SolverConfig::new(scheme.scheme()).with_workers(workers))?;
            let mut w = sink(out.as_ref(), stdout)?;
            for i in 0..g.rows() {
                let row: Vec<String> = (0..g.cols()).map(|j| fmt_value(g.get(i, j))).collect();
                writeln!(w, "{}", row.join(","))?;
            }
            w.flush()?;
        }
        Command::Mmd { inputs, scheme, biased, workers } => {
            let xs = io::read_paths(&inputs.x)?;
            let ys = io::read_paths(&inputs.y)?;
            let v = mmd2(&xs, &ys, &SolverConfig::new(scheme.scheme()).with_workers(workers), !biased)?;
            writeln!(stdout, "{}", fmt_value(v))?;
        }
        Command::Permtest { inputs, scheme, permutations, seed, workers } => {
            let xs = io::read_paths(&inputs.x)?;
            let ys = io::read_paths(&inputs.y)?;
            let solver = SolverConfig::new(scheme.scheme()).with_workers(workers);
            let p = permutation_test(&xs, &ys, &solver, permutations, seed)?;
            writeln!(stdout, "{p}")?;
        }
        Command::BenchMape { generator, points, batch, orders, schemes, seed, oracle, workers, out } => {
            let rows = bench_mape(&MapeBench {
                generator,
                points,
                batch,
                schemes,
                orders,
                seed,
                oracle: oracle.config(),
                workers,
            })?;
            report(&rows, out.as_ref(), stdout)?;
        }
        Command::BenchTime { scheme, lengths, dims, workers, batch, repeats, seed, out } => {
            let rows = bench_time(&TimeBench {
                scheme: scheme.scheme(),
                lengths,
                dims,
                workers,
                batch,
                seed,
                repeats,
            })?;
            report(&rows, out.as_ref(), stdout)?;
        }
    }
    Ok(())
}
