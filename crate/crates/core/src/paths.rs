//! Piecewise-linear paths, grid refinement, synthetic generators and the
//! per-rectangle coefficients of the kernel PDE.
//!
//! A path with `ℓ+1` points has `ℓ` linear segments. Two paths `x` and `y`
//! induce an `ℓ_x × ℓ_y` grid of rectangles; on rectangle `(i, j)` the PDE
//! coefficient is constant and equal to `⟨Δx_i, Δy_j⟩ / (ds_i · dt_j)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Ordered time stamps and `d`-dimensional values, linearly interpolated
/// between consecutive points. Values are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPath {
    times: Vec<f64>,
    values: Vec<f64>,
    dim: usize,
}

/// Constant PDE coefficient of one grid rectangle together with its sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleCoefficient {
    pub c: f64,
    pub ds: f64,
    pub dt: f64,
}

impl RectangleCoefficient {
    pub fn new(c: f64, ds: f64, dt: f64) -> Result<Self> {
        if !(ds > 0.0 && dt > 0.0 && ds.is_finite() && dt.is_finite() && c.is_finite()) {
            return Err(Error::arg(format!(
                "rectangle needs finite c and positive sides, got c={c}, ds={ds}, dt={dt}"
            )));
        }
        Ok(Self { c, ds, dt })
    }
}

/// `count` equally spaced stamps on `[0, 1]`.
pub fn uniform_times(count: usize) -> Vec<f64> {
    let last = (count.max(2) - 1) as f64;
    (0..count).map(|i| i as f64 / last).collect()
}

impl PiecewiseLinearPath {
    /// Builds a path from flat row-major `values` with `dim` columns.
    pub fn new(times: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPath("dimension must be at least 1".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::InvalidPath(format!(
                "{} values do not form rows of width {dim}",
                values.len()
            )));
        }
        let rows = values.len() / dim;
        if rows < 2 {
            return Err(Error::InvalidPath(format!(
                "a path needs at least 2 points, got {rows}"
            )));
        }
        if times.len() != rows {
            return Err(Error::InvalidPath(format!(
                "{} time stamps for {rows} points",
                times.len()
            )));
        }
        if let Some(bad) = times.iter().chain(values.iter()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidPath(format!("non-finite entry {bad}")));
        }
        if let Some(w) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!(
                "times must be strictly increasing (t[{}]={} >= t[{}]={})",
                w,
                times[w],
                w + 1,
                times[w + 1]
            )));
        }
        Ok(Self { times, values, dim })
    }

    /// Builds a path from rows of coordinates. Missing times default to a
    /// uniform grid on `[0, 1]`.
    pub fn from_rows(times: Option<Vec<f64>>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidPath(format!(
                "row {r} has {} entries, expected {dim}",
                rows[r].len()
            )));
        }
        let times = times.unwrap_or_else(|| uniform_times(rows.len()));
        Self::new(times, rows.concat(), dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `ℓ + 1`.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of linear segments `ℓ`.
    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// Length of segment `i` in time.
    pub fn width(&self, i: usize) -> f64 {
        self.times[i + 1] - self.times[i]
    }

    pub fn increment(&self, i: usize) -> Vec<f64> {
        let (a, b) = (self.point(i), self.point(i + 1));
        b.iter().zip(a).map(|(b, a)| b - a).collect()
    }

    /// Subdivides every segment into `factor` equal pieces. The traced curve
    /// is unchanged.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::arg("refinement factor must be at least 1"));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let n = self.segments() * factor + 1;
        let mut times = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n * self.dim);
        for i in 0..self.segments() {
            let (t0, t1) = (self.times[i], self.times[i + 1]);
            let (a, b) = (self.point(i), self.point(i + 1));
            for k in 0..factor {
                let w = k as f64 / factor as f64;
                times.push(t0 + w * (t1 - t0));
                values.extend(a.iter().zip(b).map(|(a, b)| a + w * (b - a)));
            }
        }
        times.push(*self.times.last().unwrap());
        values.extend_from_slice(self.point(self.segments()));
        Self::new(times, values, self.dim)
    }

    /// Same path traversed with values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.times.clone(),
            self.values.iter().map(|v| v * factor).collect(),
            self.dim,
        )
    }
}

/// Validated constructor mirroring [`PiecewiseLinearPath::from_rows`].
pub fn make_path(times: Option<Vec<f64>>, rows: &[Vec<f64>]) -> Result<PiecewiseLinearPath> {
    PiecewiseLinearPath::from_rows(times, rows)
}

pub fn refine_path(p: &PiecewiseLinearPath, factor: usize) -> Result<PiecewiseLinearPath> {
    p.refine(factor)
}

pub(crate) fn check_dims(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// PDE coefficient `C_ij` of rectangle `(i, j)` of the grid spanned by `x` and `y`.
pub fn rect_coeff(
    x: &PiecewiseLinearPath,
    y: &PiecewiseLinearPath,
    i: usize,
    j: usize,
) -> Result<RectangleCoefficient> {
    check_dims(x, y)?;
    if i >= x.segments() || j >= y.segments() {
        return Err(Error::IndexOutOfRange {
            i,
            j,
            lx: x.segments(),
            ly: y.segments(),
        });
    }
    let (ds, dt) = (x.width(i), y.width(j));
    let inc = dot(&x.increment(i), &y.increment(j));
    RectangleCoefficient::new(inc / (ds * dt), ds, dt)
}

/// Segment increments and widths of a path, laid out for the grid sweeps.
#[derive(Debug, Clone)]
pub(crate) struct Increments {
    pub deltas: Vec<f64>,
    pub widths: Vec<f64>,
    pub dim: usize,
}

impl Increments {
    pub fn of(p: &PiecewiseLinearPath) -> Self {
        let d = p.dim();
        let deltas = p
            .values()
            .windows(2 * d)
            .step_by(d)
            .flat_map(|w| (0..d).map(move |k| w[d + k] - w[k]))
            .collect();
        let widths = p.times().windows(2).map(|w| w[1] - w[0]).collect();
        Self {
            deltas,
            widths,
            dim: d,
        }
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn delta(&self, i: usize) -> &[f64] {
        &self.deltas[i * self.dim..(i + 1) * self.dim]
    }

    /// `⟨Δx_i, Δy_j⟩`.
    pub fn inner(&self, i: usize, other: &Increments, j: usize) -> f64 {
        dot(self.delta(i), other.delta(j))
    }

    pub fn coefficient(&self, i: usize, other: &Increments, j: usize) -> RectangleCoefficient {
        let (ds, dt) = (self.widths[i], other.widths[j]);
        RectangleCoefficient {
            c: self.inner(i, other, j) / (ds * dt),
            ds,
            dt,
        }
    }
}

/// Standard Brownian motion on `[0, 1]` sampled at `points` uniform stamps.
pub fn sample_brownian(seed: u64, points: usize, dim: usize) -> Result<PiecewiseLinearPath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    brownian_from(&mut rng, points, dim)
}

pub(crate) fn brownian_from(
    rng: &mut ChaCha8Rng,
    points: usize,
    dim: usize,
) -> Result<PiecewiseLinearPath> {
    if points < 2 {
        return Err(Error::arg(format!("need at least 2 points, got {points}")));
    }
    if dim == 0 {
        return Err(Error::arg("dimension must be at least 1"));
    }
    let sd = (1.0 / (points - 1) as f64).sqrt();
    let mut values = vec![0.0; points * dim];
    for i in 1..points {
        for k in 0..dim {
            let z: f64 = StandardNormal.sample(rng);
            values[i * dim + k] = values[(i - 1) * dim + k] + sd * z;
        }
    }
    PiecewiseLinearPath::new(uniform_times(points), values, dim)
}

/// A batch of `count` independent Brownian paths drawn from one seeded stream.
pub fn sample_brownian_batch(
    seed: u64,
    count: usize,
    points: usize,
    dim: usize,
) -> Result<Vec<PiecewiseLinearPath>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| brownian_from(&mut rng, points, dim))
        .collect()
}

/// Pair of 2-d paths with points `sin(U_i)` and `cos(V_i)`, where `U_i`, `V_i`
/// are independent standard normal vectors.
pub fn sample_sincos_pair(
    seed: u64,
    points: usize,
) -> Result<(PiecewiseLinearPath, PiecewiseLinearPath)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sincos_from(&mut rng, points)
}

pub(crate) fn sincos_from(
    rng: &mut ChaCha8Rng,
    points: usize,
) -> Result<(PiecewiseLinearPath, PiecewiseLinearPath)> {
    if points < 2 {
        return Err(Error::arg(format!("need at least 2 points, got {points}")));
    }
    let mut draw = |f: fn(f64) -> f64| -> Vec<f64> {
        (0..2 * points)
            .map(|_| f(StandardNormal.sample(&mut *rng)))
            .collect()
    };
    let xs = draw(f64::sin);
    let ys = draw(f64::cos);
    Ok((
        PiecewiseLinearPath::new(uniform_times(points), xs, 2)?,
        PiecewiseLinearPath::new(uniform_times(points), ys, 2)?,
    ))
}

/// `count` sin/cos pairs from one seeded stream, split into the x and y batches.
pub fn sample_sincos_batch(
    seed: u64,
    count: usize,
    points: usize,
) -> Result<(Vec<PiecewiseLinearPath>, Vec<PiecewiseLinearPath>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for _ in 0..count {
        let (x, y) = sincos_from(&mut rng, points)?;
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}
