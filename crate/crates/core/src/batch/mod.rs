//! N satellites × M times over a pool of scoped worker threads.
//!
//! Cells are addressed by a flat row-major index `i * M + j`. The index space
//! is cut into contiguous ranges by [`partition_work`] and each worker writes
//! only its own slice of the output planes, so the result never depends on
//! how many workers ran.

mod binary;

use std::collections::TryReserveError;
use std::ops::Range;

use thiserror::Error;

pub use binary::{read_dump, write_dump, DumpError, DUMP_HEADER_LEN, DUMP_MAGIC, PLANE_ORDER};

use crate::elements::MeanElements;
use crate::gravity::GravityModel;
use crate::kernel::{sat_init_scalars, sgp4_init, Branches, sgp4_propagate, ErrorCode, SatInit, StateVector};
use crate::real::{Float, Real};
use crate::Precision;

macro_rules! define_sat_batch {
    ($($field:ident),* $(,)?) => {
        /// Structure-of-arrays copy of N [`SatInit`] values.
        #[derive(Debug, Clone, PartialEq)]
        pub struct SatBatch<T> {
            $(pub $field: Vec<T>,)*
            pub isimp: Vec<bool>,
            pub branches: Vec<Branches>,
            pub error_codes: Vec<ErrorCode>,
            pub gravity: Vec<GravityModel>,
        }

        impl<T: Real> SatBatch<T> {
            pub fn from_inits(sats: &[SatInit<T>]) -> Self {
                Self {
                    $($field: sats.iter().map(|s| s.$field).collect(),)*
                    isimp: sats.iter().map(|s| s.isimp).collect(),
                    branches: sats.iter().map(|s| s.branches).collect(),
                    error_codes: sats.iter().map(|s| s.error_code_at_init).collect(),
                    gravity: sats.iter().map(|s| s.gravity).collect(),
                }
            }

            /// Gathers satellite `i` back into a [`SatInit`].
            #[inline]
            pub fn get(&self, i: usize) -> SatInit<T> {
                SatInit {
                    $($field: self.$field[i],)*
                    isimp: self.isimp[i],
                    branches: self.branches[i],
                    error_code_at_init: self.error_codes[i],
                    gravity: self.gravity[i],
                }
            }
        }
    };
}
sat_init_scalars!(define_sat_batch);

impl<T: Real> SatBatch<T> {
    pub fn len(&self) -> usize {
        self.error_codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.error_codes.is_empty()
    }

    /// Runs initialization for each element set at precision `T`.
    pub fn from_elements(elems: &[MeanElements], grav: &GravityModel) -> Self {
        let inits: Vec<SatInit<T>> = elems.iter().map(|e| sgp4_init(&e.to_kernel(), grav)).collect();
        Self::from_inits(&inits)
    }
}

/// Dense N×M grid, row-major (satellite-major).
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult<T> {
    pub n: usize,
    pub m: usize,
    /// rx, ry, rz (km), vx, vy, vz (km/s).
    pub planes: [Vec<T>; 6],
    pub errors: Vec<ErrorCode>,
}

impl<T: Copy> BatchResult<T> {
    pub fn cell(&self, i: usize, j: usize) -> StateVector<T> {
        let k = i * self.m + j;
        let p = &self.planes;
        StateVector {
            r: [p[0][k], p[1][k], p[2][k]],
            v: [p[3][k], p[4][k], p[5][k]],
            error_code: self.errors[k],
        }
    }

    pub fn nonzero_error_count(&self) -> usize {
        self.errors.iter().filter(|e| !e.is_ok()).count()
    }
}

/// A batch result at either precision.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyBatchResult {
    Single(BatchResult<f32>),
    Double(BatchResult<f64>),
}

impl AnyBatchResult {
    pub fn precision(&self) -> Precision {
        match self {
            AnyBatchResult::Single(_) => Precision::Single,
            AnyBatchResult::Double(_) => Precision::Double,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            AnyBatchResult::Single(r) => (r.n, r.m),
            AnyBatchResult::Double(r) => (r.n, r.m),
        }
    }
}

impl From<BatchResult<f32>> for AnyBatchResult {
    fn from(r: BatchResult<f32>) -> Self {
        AnyBatchResult::Single(r)
    }
}

impl From<BatchResult<f64>> for AnyBatchResult {
    fn from(r: BatchResult<f64>) -> Self {
        AnyBatchResult::Double(r)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot allocate {cells} output cells ({bytes} bytes)")]
pub struct CapacityError {
    pub cells: usize,
    pub bytes: usize,
}

#[derive(Debug, Error)]
pub enum StreamError<E> {
    #[error("tile dimensions must be at least 1")]
    EmptyTile,
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("sink failed after {tiles_completed} tiles")]
    Sink { tiles_completed: usize, source: E },
}

/// One block of the output grid handed to a streaming sink. Planes are
/// row-major within the tile.
#[derive(Debug)]
pub struct Tile<'a, T> {
    pub index: usize,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    pub planes: [&'a [T]; 6],
    pub errors: &'a [ErrorCode],
}

impl<T: Copy> Tile<'_, T> {
    /// Cell at global coordinates `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> StateVector<T> {
        let k = (i - self.rows.start) * self.cols.len() + (j - self.cols.start);
        let p = &self.planes;
        StateVector {
            r: [p[0][k], p[1][k], p[2][k]],
            v: [p[3][k], p[4][k], p[5][k]],
            error_code: self.errors[k],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSummary {
    pub tiles: usize,
    pub cells_emitted: usize,
    pub nonzero_error_count: usize,
}

/// Splits `0..n*m` into at most `workers` contiguous, disjoint ranges whose
/// lengths differ by at most one. The first `total % workers` ranges take the
/// extra cell. Empty ranges are omitted.
pub fn partition_work(n: usize, m: usize, workers: usize) -> Vec<Range<usize>> {
    let total = n.saturating_mul(m);
    let workers = workers.max(1);
    let base = total / workers;
    let extra = total % workers;
    let mut ranges = Vec::with_capacity(workers.min(total));
    let mut start = 0;
    for w in 0..workers {
        let len = base + usize::from(w < extra);
        if len == 0 {
            break;
        }
        ranges.push(start..start + len);
        start += len;
    }
    ranges
}

pub fn available_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

struct PlanesMut<'a, T> {
    values: [&'a mut [T]; 6],
    errors: &'a mut [ErrorCode],
}

impl<'a, T> PlanesMut<'a, T> {
    fn split_at(self, k: usize) -> (Self, Self) {
        let [a, b, c, d, e, f] = self.values;
        let (a0, a1) = a.split_at_mut(k);
        let (b0, b1) = b.split_at_mut(k);
        let (c0, c1) = c.split_at_mut(k);
        let (d0, d1) = d.split_at_mut(k);
        let (e0, e1) = e.split_at_mut(k);
        let (f0, f1) = f.split_at_mut(k);
        let (g0, g1) = self.errors.split_at_mut(k);
        (
            PlanesMut {
                values: [a0, b0, c0, d0, e0, f0],
                errors: g0,
            },
            PlanesMut {
                values: [a1, b1, c1, d1, e1, f1],
                errors: g1,
            },
        )
    }
}

fn try_plane<T: Clone>(len: usize, fill: T) -> Result<Vec<T>, TryReserveError> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)?;
    v.resize(len, fill);
    Ok(v)
}

fn allocate_planes<T: Float>(cells: usize) -> Result<([Vec<T>; 6], Vec<ErrorCode>), CapacityError> {
    let err = || CapacityError {
        cells,
        bytes: cells.saturating_mul(6 * T::BYTES + 1),
    };
    let mut planes: [Vec<T>; 6] = Default::default();
    for p in &mut planes {
        *p = try_plane(cells, T::default()).map_err(|_| err())?;
    }
    let errors = try_plane(cells, ErrorCode::Ok).map_err(|_| err())?;
    Ok((planes, errors))
}

/// Computes cells `local` of the `rows × cols` region into `out`.
fn fill<T: Float>(
    sats: &SatBatch<T>,
    times: &[T],
    rows: &Range<usize>,
    cols: &Range<usize>,
    local: Range<usize>,
    out: PlanesMut<'_, T>,
) {
    let width = cols.len();
    let mut current = usize::MAX;
    let mut sat = None;
    let PlanesMut { mut values, errors } = out;
    for (k, flat) in local.enumerate() {
        let i = rows.start + flat / width;
        let j = cols.start + flat % width;
        if i != current {
            sat = Some(sats.get(i));
            current = i;
        }
        let state = sgp4_propagate(sat.as_ref().expect("gathered"), times[j]);
        for (plane, value) in values.iter_mut().zip(state.components()) {
            plane[k] = value;
        }
        errors[k] = state.error_code;
    }
}

/// Batch propagation front end. `workers == 1` runs on the calling thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchEngine {
    workers: usize,
}

impl Default for BatchEngine {
    fn default() -> Self {
        Self::new(available_workers())
    }
}

impl BatchEngine {
    pub fn new(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn run_region<T: Float>(
        &self,
        sats: &SatBatch<T>,
        times: &[T],
        rows: Range<usize>,
        cols: Range<usize>,
        out: PlanesMut<'_, T>,
    ) {
        let ranges = partition_work(rows.len(), cols.len(), self.workers);
        if ranges.len() <= 1 {
            let cells = rows.len() * cols.len();
            fill(sats, times, &rows, &cols, 0..cells, out);
            return;
        }
        std::thread::scope(|scope| {
            let mut rest = out;
            let (rows, cols) = (&rows, &cols);
            for range in ranges {
                let (head, tail) = rest.split_at(range.len());
                rest = tail;
                scope.spawn(move || fill(sats, times, rows, cols, range, head));
            }
        });
    }

    /// Propagates every satellite to every time. Entry `(i, j)` equals
    /// `sgp4_propagate(sats.get(i), times[j])` bitwise.
    pub fn propagate<T: Float>(&self, sats: &SatBatch<T>, times: &[T]) -> Result<BatchResult<T>, CapacityError> {
        let (n, m) = (sats.len(), times.len());
        let cells = n.checked_mul(m).ok_or(CapacityError {
            cells: usize::MAX,
            bytes: usize::MAX,
        })?;
        let (mut planes, mut errors) = allocate_planes::<T>(cells)?;
        {
            let [a, b, c, d, e, f] = &mut planes;
            let out = PlanesMut {
                values: [a, b, c, d, e, f],
                errors: &mut errors,
            };
            self.run_region(sats, times, 0..n, 0..m, out);
        }
        Ok(BatchResult { n, m, planes, errors })
    }

    /// Initialization plus propagation, parallel over satellites for the
    /// init step.
    pub fn propagate_elements<T: Float>(
        &self,
        elems: &[MeanElements],
        grav: &GravityModel,
        times: &[T],
    ) -> Result<BatchResult<T>, CapacityError> {
        let sats = self.init_batch::<T>(elems, grav);
        self.propagate(&sats, times)
    }

    pub fn init_batch<T: Float>(&self, elems: &[MeanElements], grav: &GravityModel) -> SatBatch<T> {
        let ranges = partition_work(elems.len(), 1, self.workers);
        if ranges.len() <= 1 {
            return SatBatch::from_elements(elems, grav);
        }
        let mut inits: Vec<SatInit<T>> = Vec::with_capacity(elems.len());
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| {
                    let chunk = &elems[r];
                    scope.spawn(move || {
                        chunk
                            .iter()
                            .map(|e| sgp4_init(&e.to_kernel::<T>(), grav))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                inits.extend(h.join().expect("init worker panicked"));
            }
        });
        SatBatch::from_inits(&inits)
    }

    /// Computes the grid tile by tile, handing each tile to `sink` in
    /// row-major tile order. A single tile buffer is reused, so auxiliary
    /// memory is bounded by one tile regardless of N·M.
    pub fn propagate_streamed<T, E, F>(
        &self,
        sats: &SatBatch<T>,
        times: &[T],
        tile_rows: usize,
        tile_cols: usize,
        mut sink: F,
    ) -> Result<StreamSummary, StreamError<E>>
    where
        T: Float,
        F: FnMut(&Tile<'_, T>) -> Result<(), E>,
    {
        if tile_rows == 0 || tile_cols == 0 {
            return Err(StreamError::EmptyTile);
        }
        let (n, m) = (sats.len(), times.len());
        let tile_rows = tile_rows.min(n.max(1));
        let tile_cols = tile_cols.min(m.max(1));
        let capacity = tile_rows.checked_mul(tile_cols).ok_or(CapacityError {
            cells: usize::MAX,
            bytes: usize::MAX,
        })?;
        let (mut planes, mut errors) = allocate_planes::<T>(capacity)?;

        let mut summary = StreamSummary {
            tiles: 0,
            cells_emitted: 0,
            nonzero_error_count: 0,
        };
        for r0 in (0..n).step_by(tile_rows) {
            let rows = r0..(r0 + tile_rows).min(n);
            for c0 in (0..m).step_by(tile_cols) {
                let cols = c0..(c0 + tile_cols).min(m);
                let cells = rows.len() * cols.len();
                {
                    let [a, b, c, d, e, f] = &mut planes;
                    let out = PlanesMut {
                        values: [&mut a[..cells], &mut b[..cells], &mut c[..cells], &mut d[..cells], &mut e[..cells], &mut f[..cells]],
                        errors: &mut errors[..cells],
                    };
                    self.run_region(sats, times, rows.clone(), cols.clone(), out);
                }
                let tile = Tile {
                    index: summary.tiles,
                    rows: rows.clone(),
                    cols,
                    planes: [
                        &planes[0][..cells],
                        &planes[1][..cells],
                        &planes[2][..cells],
                        &planes[3][..cells],
                        &planes[4][..cells],
                        &planes[5][..cells],
                    ],
                    errors: &errors[..cells],
                };
                let bad = tile.errors.iter().filter(|e| !e.is_ok()).count();
                sink(&tile).map_err(|source| StreamError::Sink {
                    tiles_completed: summary.tiles,
                    source,
                })?;
                summary.tiles += 1;
                summary.cells_emitted += cells;
                summary.nonzero_error_count += bad;
            }
        }
        Ok(summary)
    }
}
