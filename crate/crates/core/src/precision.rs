//! Single- versus double-precision drift over a time grid.
//!
//! Both runs start from the same [`MeanElements`] and receive the same
//! minutes-since-epoch grid. The 64-bit state is taken as truth. A cell
//! with a nonzero error code at either precision is excluded.

use std::fmt::Write as _;

use thiserror::Error;

use crate::batch::{BatchEngine, BatchResult, CapacityError};
use crate::elements::MeanElements;
use crate::gravity::GravityModel;
use crate::Precision;

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionReport {
    pub days: Vec<f64>,
    /// p5, p50, p95 of |Δr| in km, one entry per grid time.
    pub dr_km: Vec<[f64; 3]>,
    /// p5, p50, p95 of |Δv| in km/s.
    pub dv_kms: Vec<[f64; 3]>,
    /// 1 km per day.
    pub heuristic_km: Vec<f64>,
    pub corpus_size: usize,
    pub included_cells: usize,
    pub excluded_cells: usize,
    /// Satellites with at least one excluded cell.
    pub excluded_satellites: usize,
}

#[derive(Debug, Error)]
pub enum PrecisionError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("horizon and step must be positive")]
    BadGrid,
    #[error("every cell was excluded by a nonzero error code")]
    AllExcluded,
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

/// Nearest-rank percentile of an ascending slice: the value at rank
/// `ceil(p/100 · n)`, ranks starting at 1.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (p / 100.0 * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn time_grid(horizon_days: f64, step_minutes: f64) -> Vec<f64> {
    let steps = (horizon_days * 1440.0 / step_minutes + 1e-9).floor() as usize;
    (0..=steps).map(|k| k as f64 * step_minutes).collect()
}

/// Drift of a 32-bit run against 64-bit truth.
pub fn drift_report(
    elems: &[MeanElements],
    grav: &GravityModel,
    horizon_days: f64,
    step_minutes: f64,
    engine: &BatchEngine,
) -> Result<PrecisionReport, PrecisionError> {
    drift_report_at(elems, grav, horizon_days, step_minutes, engine, Precision::Single)
}

/// Drift of a run at `test` precision against 64-bit truth. With
/// `Precision::Double` every delta is exactly zero.
pub fn drift_report_at(
    elems: &[MeanElements],
    grav: &GravityModel,
    horizon_days: f64,
    step_minutes: f64,
    engine: &BatchEngine,
    test: Precision,
) -> Result<PrecisionReport, PrecisionError> {
    if elems.is_empty() {
        return Err(PrecisionError::EmptyCorpus);
    }
    if !(horizon_days > 0.0 && step_minutes > 0.0) {
        return Err(PrecisionError::BadGrid);
    }
    let minutes = time_grid(horizon_days, step_minutes);
    let truth = engine.propagate_elements::<f64>(elems, grav, &minutes)?;
    let cells = match test {
        Precision::Double => {
            let other = engine.propagate_elements::<f64>(elems, grav, &minutes)?;
            widen(&other)
        }
        Precision::Single => {
            let m32: Vec<f32> = minutes.iter().map(|&t| t as f32).collect();
            let other = engine.propagate_elements::<f32>(elems, grav, &m32)?;
            widen(&other)
        }
    };
    Ok(assemble(&truth, &cells, &minutes))
        .and_then(|r| if r.included_cells == 0 { Err(PrecisionError::AllExcluded) } else { Ok(r) })
}

struct Widened {
    planes: [Vec<f64>; 6],
    ok: Vec<bool>,
}

fn widen<T: Copy + Into<f64>>(r: &BatchResult<T>) -> Widened {
    Widened {
        planes: std::array::from_fn(|p| r.planes[p].iter().map(|&x| x.into()).collect()),
        ok: r.errors.iter().map(|e| e.is_ok()).collect(),
    }
}

fn assemble(truth: &BatchResult<f64>, test: &Widened, minutes: &[f64]) -> PrecisionReport {
    let (n, m) = (truth.n, truth.m);
    let mut report = PrecisionReport {
        days: minutes.iter().map(|t| t / 1440.0).collect(),
        dr_km: Vec::with_capacity(m),
        dv_kms: Vec::with_capacity(m),
        heuristic_km: minutes.iter().map(|t| t / 1440.0).collect(),
        corpus_size: n,
        included_cells: 0,
        excluded_cells: 0,
        excluded_satellites: 0,
    };
    let mut sat_excluded = vec![false; n];
    let mut dr = Vec::with_capacity(n);
    let mut dv = Vec::with_capacity(n);
    for j in 0..m {
        dr.clear();
        dv.clear();
        for (i, excluded) in sat_excluded.iter_mut().enumerate() {
            let k = i * m + j;
            if !(truth.errors[k].is_ok() && test.ok[k]) {
                report.excluded_cells += 1;
                *excluded = true;
                continue;
            }
            let norm = |range: std::ops::Range<usize>| {
                range
                    .map(|p| {
                        let d = test.planes[p][k] - truth.planes[p][k];
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            };
            dr.push(norm(0..3));
            dv.push(norm(3..6));
        }
        report.included_cells += dr.len();
        dr.sort_by(f64::total_cmp);
        dv.sort_by(f64::total_cmp);
        let pct = |v: &[f64]| [5.0, 50.0, 95.0].map(|p| nearest_rank(v, p));
        report.dr_km.push(pct(&dr));
        report.dv_kms.push(pct(&dv));
    }
    report.excluded_satellites = sat_excluded.iter().filter(|&&x| x).count();
    report
}

pub const REPORT_HEADER: &str = "day,p5_km,p50_km,p95_km,p5_kms,p50_kms,p95_kms,heuristic_km";

/// One row per grid time, every value with 9 significant digits.
pub fn emit_report_csv(report: &PrecisionReport) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for k in 0..report.days.len() {
        let row = [
            report.days[k],
            report.dr_km[k][0],
            report.dr_km[k][1],
            report.dr_km[k][2],
            report.dv_kms[k][0],
            report.dv_kms[k][1],
            report.dv_kms[k][2],
            report.heuristic_km[k],
        ];
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.8e}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
