//! Timing protocol and scaling sweeps.
//!
//! One untimed warm-up call, then the iteration count is doubled until a
//! single timed run of that many calls takes at least the threshold. Five
//! trials follow; if the fastest of them dips under the threshold the count
//! is doubled again and all trials are repeated. The reported time is the
//! fastest trial divided by the iteration count.

use std::fmt::{self, Write as _};
use std::time::Instant;

use thiserror::Error;

use crate::batch::{BatchEngine, CapacityError, SatBatch};
use crate::elements::MeanElements;
use crate::gravity::GravityModel;
use crate::real::Float;
use crate::Precision;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingProtocol {
    pub threshold_s: f64,
    pub trials: usize,
}

impl Default for TimingProtocol {
    fn default() -> Self {
        Self {
            threshold_s: 0.2,
            trials: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub iterations: u64,
    /// Wall time of each trial, all `iterations` calls included.
    pub trial_times_s: Vec<f64>,
    /// Fastest trial divided by `iterations`.
    pub min_time_s: f64,
}

impl Timing {
    pub fn mean_time_s(&self) -> f64 {
        self.trial_times_s.iter().sum::<f64>() / (self.trial_times_s.len() as f64 * self.iterations as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Warmup,
    Calibration { iterations: u64 },
    Trial { index: usize, iterations: u64 },
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Warmup => write!(f, "warm-up"),
            Phase::Calibration { iterations } => write!(f, "calibration at {iterations} iterations"),
            Phase::Trial { index, iterations } => write!(f, "trial {index} at {iterations} iterations"),
        }
    }
}

#[derive(Debug, Error)]
#[error("timed task failed during {phase}: {source}")]
pub struct TimingError<E: std::error::Error + 'static> {
    pub phase: Phase,
    #[source]
    pub source: E,
}

fn run_n<E>(iterations: u64, f: &mut impl FnMut() -> Result<(), E>) -> Result<f64, E> {
    let start = Instant::now();
    for _ in 0..iterations {
        f()?;
    }
    Ok(start.elapsed().as_secs_f64())
}

pub fn time_task<E, F>(protocol: &TimingProtocol, mut f: F) -> Result<Timing, TimingError<E>>
where
    E: std::error::Error + 'static,
    F: FnMut() -> Result<(), E>,
{
    let trials = protocol.trials.max(1);
    f().map_err(|source| TimingError {
        phase: Phase::Warmup,
        source,
    })?;
    let mut iterations = 1u64;
    loop {
        let t = run_n(iterations, &mut f).map_err(|source| TimingError {
            phase: Phase::Calibration { iterations },
            source,
        })?;
        if t >= protocol.threshold_s {
            break;
        }
        iterations *= 2;
    }
    loop {
        let mut times = Vec::with_capacity(trials);
        for index in 0..trials {
            let t = run_n(iterations, &mut f).map_err(|source| TimingError {
                phase: Phase::Trial { index, iterations },
                source,
            })?;
            times.push(t);
        }
        let fastest = times.iter().copied().fold(f64::INFINITY, f64::min);
        if fastest >= protocol.threshold_s {
            return Ok(Timing {
                iterations,
                min_time_s: fastest / iterations as f64,
                trial_times_s: times,
            });
        }
        iterations *= 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Satellites,
    Times,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Satellites => "N",
            Axis::Times => "M",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimedUnit {
    /// Initialization and propagation.
    FullPipeline,
    /// Propagation of an already initialized batch.
    PropagateOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub label: String,
    pub axis: Axis,
    pub n: usize,
    pub m: usize,
    pub precision: Precision,
    pub workers: usize,
    pub timing: Timing,
}

impl BenchRecord {
    pub fn cells(&self) -> usize {
        self.n * self.m
    }

    pub fn throughput(&self) -> f64 {
        self.cells() as f64 / self.timing.min_time_s
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub label: String,
    pub axis: Axis,
    /// Strictly increasing sizes along `axis`.
    pub sizes: Vec<usize>,
    pub fixed_other: usize,
    pub precision: Precision,
    pub workers: usize,
    pub unit: TimedUnit,
    pub protocol: TimingProtocol,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep sizes must be positive and strictly increasing")]
    Sizes,
    #[error("base catalogue is empty")]
    EmptyCatalogue,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<BenchRecord>,
    /// Size at which allocation failed; larger sizes were skipped.
    pub stopped: Option<(usize, CapacityError)>,
}

/// `n` satellites drawn cyclically from `base`.
pub fn tile_catalogue(base: &[MeanElements], n: usize) -> Vec<MeanElements> {
    base.iter().copied().cycle().take(n).collect()
}

/// `m` times spread evenly over one day: `t_j = 1440 j / m` minutes.
pub fn day_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| 1440.0 * j as f64 / m as f64).collect()
}

fn time_cell<T: Float>(
    engine: &BatchEngine,
    elems: &[MeanElements],
    grav: &GravityModel,
    minutes: &[f64],
    unit: TimedUnit,
    protocol: &TimingProtocol,
) -> Result<Timing, TimingError<CapacityError>> {
    let times: Vec<T> = minutes.iter().map(|&t| T::from_f64(t)).collect();
    match unit {
        TimedUnit::FullPipeline => time_task(protocol, || {
            let sats: SatBatch<T> = engine.init_batch(elems, grav);
            engine.propagate(&sats, &times).map(drop)
        }),
        TimedUnit::PropagateOnly => {
            let sats: SatBatch<T> = engine.init_batch(elems, grav);
            time_task(protocol, || engine.propagate(&sats, &times).map(drop))
        }
    }
}

pub fn scaling_sweep(base: &[MeanElements], grav: &GravityModel, cfg: &SweepConfig) -> Result<SweepOutcome, SweepError> {
    if base.is_empty() {
        return Err(SweepError::EmptyCatalogue);
    }
    if cfg.sizes.is_empty() || cfg.sizes[0] == 0 || cfg.fixed_other == 0 || cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SweepError::Sizes);
    }
    let engine = BatchEngine::new(cfg.workers);
    let mut records = Vec::with_capacity(cfg.sizes.len());
    for &size in &cfg.sizes {
        let (n, m) = match cfg.axis {
            Axis::Satellites => (size, cfg.fixed_other),
            Axis::Times => (cfg.fixed_other, size),
        };
        let elems = tile_catalogue(base, n);
        let minutes = day_grid(m);
        let timing = match cfg.precision {
            Precision::Single => time_cell::<f32>(&engine, &elems, grav, &minutes, cfg.unit, &cfg.protocol),
            Precision::Double => time_cell::<f64>(&engine, &elems, grav, &minutes, cfg.unit, &cfg.protocol),
        };
        match timing {
            Ok(timing) => records.push(BenchRecord {
                label: cfg.label.clone(),
                axis: cfg.axis,
                n,
                m,
                precision: cfg.precision,
                workers: engine.workers(),
                timing,
            }),
            Err(e) => {
                return Ok(SweepOutcome {
                    records,
                    stopped: Some((size, e.source)),
                })
            }
        }
    }
    Ok(SweepOutcome { records, stopped: None })
}

pub const BENCH_HEADER: &str = "label,axis,N,M,precision,workers,iterations,trials,min_time_s,throughput_cells_per_s";

pub fn emit_bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.8e},{:.8e}",
            r.label,
            r.axis,
            r.n,
            r.m,
            r.precision,
            r.workers,
            r.timing.iterations,
            r.timing.trial_times_s.len(),
            r.timing.min_time_s,
            r.throughput()
        );
    }
    out
}
