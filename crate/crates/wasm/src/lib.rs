//! Browser entry points. Every function runs on the calling thread and
//! returns a flat row-major `Float64Array`; errors surface as JS strings.

use sgp4_batch::precision::drift_report;
use sgp4_batch::{
    jacobian_state_wrt_elements, parse_tle, sgp4_init, sgp4_propagate, tle_to_elements, BatchEngine, GravityModel,
    MeanElements, ParseMode,
};
use wasm_bindgen::prelude::*;

/// Columns per row of [`propagate_track`].
pub const TRACK_COLUMNS: usize = 8;
/// Columns per row of [`drift_curve`].
pub const DRIFT_COLUMNS: usize = 8;

fn elements(line1: &str, line2: &str) -> Result<MeanElements, String> {
    parse_tle(line1, line2, ParseMode::Lenient)
        .map(|t| tle_to_elements(&t))
        .map_err(|e| e.to_string())
}

/// Rows of `tsince, rx, ry, rz, vx, vy, vz, error_code` for
/// `start, start + step, ..` up to `stop` inclusive. 64-bit.
#[wasm_bindgen]
pub fn propagate_track(line1: &str, line2: &str, start_min: f64, stop_min: f64, step_min: f64) -> Result<Vec<f64>, String> {
    if !(step_min > 0.0 && stop_min >= start_min && start_min.is_finite() && stop_min.is_finite()) {
        return Err("need step > 0 and stop >= start".into());
    }
    let count = ((stop_min - start_min) / step_min + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("{count} samples requested, limit is 1000000"));
    }
    let sat = sgp4_init(&elements(line1, line2)?.to_kernel::<f64>(), &GravityModel::wgs72());
    let mut out = Vec::with_capacity(count * TRACK_COLUMNS);
    for k in 0..count {
        let t = start_min + k as f64 * step_min;
        let s = sgp4_propagate(&sat, t);
        out.push(t);
        out.extend_from_slice(&s.components());
        out.push(f64::from(s.error_code as u8));
    }
    Ok(out)
}

/// Rows of `day, p5, p50, p95 |Δr| (km), p5, p50, p95 |Δv| (km/s),
/// heuristic (km)` for a 32-bit run against 64-bit truth. `tle_text` holds
/// 2- or 3-line records.
#[wasm_bindgen]
pub fn drift_curve(tle_text: &str, horizon_days: f64, step_min: f64) -> Result<Vec<f64>, String> {
    let records = sgp4_batch::parse_catalogue(tle_text, ParseMode::Lenient).map_err(|e| e.to_string())?;
    let elems: Vec<MeanElements> = records.iter().map(|r| tle_to_elements(&r.tle)).collect();
    let report = drift_report(&elems, &GravityModel::wgs72(), horizon_days, step_min, &BatchEngine::new(1))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(report.days.len() * DRIFT_COLUMNS);
    for k in 0..report.days.len() {
        out.push(report.days[k]);
        out.extend_from_slice(&report.dr_km[k]);
        out.extend_from_slice(&report.dv_kms[k]);
        out.push(report.heuristic_km[k]);
    }
    Ok(out)
}

/// 42 entries, row-major over (rx, ry, rz, vx, vy, vz) × (no_kozai, ecco,
/// inclo, nodeo, argpo, mo, bstar), followed by the propagation error code.
#[wasm_bindgen]
pub fn jacobian(line1: &str, line2: &str, tsince_min: f64) -> Result<Vec<f64>, String> {
    let jac = jacobian_state_wrt_elements(&elements(line1, line2)?, &GravityModel::wgs72(), tsince_min);
    let mut out: Vec<f64> = jac.matrix.iter().flatten().copied().collect();
    out.push(f64::from(jac.error_code as u8));
    Ok(out)
}
