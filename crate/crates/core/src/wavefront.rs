//! Grid sweep shared by all edge-propagating solvers.
//!
//! Cell `(i, j)` reads the state of its bottom edge (`row[i]`) and left edge
//! (`col[j]`) and overwrites them with its top and right edges. Cells on one
//! anti-diagonal `i + j = m` touch pairwise distinct `row` and `col` slots and
//! only depend on anti-diagonal `m - 1`, so they may run concurrently. Each
//! cell runs the same arithmetic under either schedule, which makes the two
//! schedules bitwise identical.

use rayon::prelude::*;

use crate::error::Result;

/// Execution order of the grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Row-major over `j`, then `i`, on the calling thread.
    #[default]
    Serial,
    /// Anti-diagonals in order, cells of one anti-diagonal on the rayon pool.
    Wavefront,
}

pub(crate) fn sweep<S, F>(row: &mut [S], col: &mut [S], schedule: Schedule, cell: F) -> Result<()>
where
    S: Send,
    F: Fn(usize, usize, &mut S, &mut S) -> Result<()> + Sync,
{
    let (lx, ly) = (row.len(), col.len());
    match schedule {
        Schedule::Serial => {
            for (j, left) in col.iter_mut().enumerate() {
                for (i, bottom) in row.iter_mut().enumerate() {
                    cell(i, j, bottom, left)?;
                }
            }
            Ok(())
        }
        Schedule::Wavefront => {
            for m in 0..lx + ly - 1 {
                let i_lo = m.saturating_sub(ly - 1);
                let i_hi = m.min(lx - 1);
                let (j_lo, j_hi) = (m - i_hi, m - i_lo);
                row[i_lo..=i_hi]
                    .par_iter_mut()
                    .zip(col[j_lo..=j_hi].par_iter_mut().rev())
                    .enumerate()
                    .try_for_each(|(k, (bottom, left))| {
                        let i = i_lo + k;
                        cell(i, m - i, bottom, left)
                    })?;
            }
            Ok(())
        }
    }
}
