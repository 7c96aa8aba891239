//! One evaluation function per acceptance criterion. Every tolerance is a
//! named constant here. The `acceptance` binary prints the verdicts; the
//! focused test files assert on them.

use std::collections::BTreeSet;
use std::convert::Infallible;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use sgp4_batch::batch::{available_workers, write_dump};
use sgp4_batch::bench::{scaling_sweep, time_task, tile_catalogue, Axis, SweepConfig, TimedUnit, TimingProtocol};
use sgp4_batch::precision::drift_report;
use sgp4_batch::{
    column_relative_error, finite_difference_jacobian, jacobian_state_wrt_elements, sgp4_init, sgp4_propagate,
    tle_to_elements, BatchEngine, BatchResult, ErrorCode, Float, GravityModel, MeanElements, ParseMode, Precision,
    SatBatch, TleError,
};

use super::*;

pub const ORACLE_POS_TOL_KM: f64 = 1e-5;
pub const ORACLE_VEL_TOL_KMS: f64 = 1e-8;

pub const DEEP_SPACE_PERIOD_MIN: f64 = 225.0;

pub const DRIFT_MIN_CORPUS: usize = 100;
pub const DRIFT_HORIZON_DAYS: f64 = 14.0;
pub const DRIFT_STEP_MIN: f64 = 90.0;
pub const DRIFT_EPOCH_MEDIAN_KM: (f64, f64) = (1e-4, 1e-2);
pub const DRIFT_FINAL_MEDIAN_DR_KM: f64 = 1.0;
pub const DRIFT_FINAL_MEDIAN_DV_KMS: f64 = 1e-2;

pub const JACOBIAN_TIMES_MIN: [f64; 3] = [0.0, 60.0, 1440.0];
pub const JACOBIAN_REL_STEP: f64 = 1e-6;
pub const JACOBIAN_MAX_REL_ERR: f64 = 1e-4;
/// Convergence probe: relative steps large enough that truncation, not
/// rounding, dominates the FD error.
pub const JACOBIAN_CONVERGENCE_STEPS: (f64, f64) = (1e-3, 5e-4);
pub const JACOBIAN_CONVERGENCE_RATIO: (f64, f64) = (3.0, 5.0);
pub const JACOBIAN_CONVERGENCE_TIME_MIN: f64 = 60.0;

pub const BATCH_MAX_DIM: usize = 16;
pub const BATCH_CASES: u32 = 48;

pub const MEMORY_SHAPES: [(usize, usize); 3] = [(100, 100), (100, 10_000), (10_000, 100)];
pub const MEMORY_TILE: (usize, usize) = (64, 64);
pub const MEMORY_MAX_PEAK_RATIO: f64 = 2.0;

pub const TIMING_THRESHOLD_S: f64 = 0.2;
pub const TIMING_TRIALS: usize = 5;
/// Stall injected into the first call; honest trials of a no-op stay near
/// 0.2-0.5 s, so any trial this long swallowed the warm-up.
pub const TIMING_WARMUP_STALL_S: f64 = 2.0;
pub const STARLINK_SCALE: (usize, usize) = (9341, 1000);
pub const STARLINK_SCALE_LIMIT_S: f64 = 60.0;
pub const SCALING_MIN_CORES: usize = 4;
pub const SCALING_MIN_SPEEDUP: f64 = 3.0;
pub const SWEEP_SIZES: [usize; 4] = [250, 500, 1000, 2000];
pub const SWEEP_FIXED_M: usize = 100;
pub const PER_CELL_TOLERANCE: f64 = 0.20;

pub const PARSER_MIN_RECORDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Passed every sub-check that could run; some were not applicable on
    /// this host.
    Partial,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    fn check(ok: bool, detail: String) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { status, detail }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

fn grav() -> GravityModel {
    GravityModel::wgs72()
}

pub fn oracle_equivalence() -> Verdict {
    let sats = verification_sats();
    let rows = load_reference_states();
    let (mut worst_r, mut worst_v) = (0.0f64, 0.0f64);
    let mut code_mismatches = Vec::new();
    let mut compared = 0usize;
    let mut failure_codes = BTreeSet::new();
    let mut near_earth = BTreeSet::new();
    for row in &rows {
        let (catalog, sat) = &sats[row.record];
        if *catalog != row.catalog {
            return Verdict::check(false, format!("fixture order mismatch at record {}", row.record));
        }
        if sat.error_code_at_init as u8 != row.init_error {
            code_mismatches.push(format!("{} init {} vs {}", row.catalog, sat.error_code_at_init as u8, row.init_error));
            continue;
        }
        let s = sgp4_propagate(sat, row.tsince);
        if s.error_code as u8 != row.error {
            code_mismatches.push(format!("{}@{} {} vs {}", row.catalog, row.tsince, s.error_code as u8, row.error));
        }
        if row.error != 0 && row.error != ErrorCode::DeepSpaceUnsupported as u8 {
            failure_codes.insert(row.error);
        }
        if let Some(rv) = row.rv {
            near_earth.insert(row.record);
            compared += 1;
            for k in 0..3 {
                worst_r = worst_r.max((s.r[k] - rv[k]).abs());
                worst_v = worst_v.max((s.v[k] - rv[k + 3]).abs());
            }
        }
    }
    let ok = code_mismatches.is_empty() && worst_r < ORACLE_POS_TOL_KM && worst_v < ORACLE_VEL_TOL_KMS && compared > 0;
    Verdict::check(
        ok,
        format!(
            "{} near-Earth records, {compared} states: max|dr|={worst_r:.2e} km (tol {ORACLE_POS_TOL_KM:e}), max|dv|={worst_v:.2e} km/s (tol {ORACLE_VEL_TOL_KMS:e}); failure codes matched {:?}; code mismatches {}{}",
            near_earth.len(),
            failure_codes,
            code_mismatches.len(),
            code_mismatches.first().map(|m| format!(" (first: {m})")).unwrap_or_default()
        ),
    )
}

pub fn deep_space_rejection() -> Verdict {
    let g = grav();
    let mut corpus: Vec<MeanElements> = verification_elements().into_iter().map(|(_, e)| e).collect();
    corpus.extend(starlink_elements());
    corpus.extend(records("catalogue_synthetic.tle").iter().map(|r| tle_to_elements(&r.tle)));
    let engine = BatchEngine::default();
    let times = [0.0, 60.0, 1440.0];
    let sats: SatBatch<f64> = engine.init_batch(&corpus, &g);
    let grid = match engine.propagate(&sats, &times) {
        Ok(grid) => grid,
        Err(e) => return Verdict::check(false, e.to_string()),
    };
    let (mut deep, mut wrong, mut reached) = (0usize, Vec::new(), 0usize);
    for i in 0..sats.len() {
        let sat = sats.get(i);
        let code = sat.error_code_at_init;
        let precedes = matches!(code, ErrorCode::MeanMotionNonpositive | ErrorCode::EccOutOfRange);
        let is_deep = std::f64::consts::TAU / sat.no_unkozai >= DEEP_SPACE_PERIOD_MIN;
        if is_deep && !precedes {
            deep += 1;
            if code != ErrorCode::DeepSpaceUnsupported {
                wrong.push(i);
            }
            for j in 0..times.len() {
                let cell = grid.cell(i, j);
                if cell.error_code != ErrorCode::DeepSpaceUnsupported || cell.components().iter().any(|x| !x.is_nan()) {
                    reached += 1;
                }
            }
        } else if code == ErrorCode::DeepSpaceUnsupported {
            wrong.push(i);
        }
    }
    Verdict::check(
        deep > 0 && wrong.is_empty() && reached == 0,
        format!(
            "{} TLEs, {deep} with period >= {DEEP_SPACE_PERIOD_MIN} min; code-7 mismatches {}; cells that reached the kernel {reached}",
            corpus.len(),
            wrong.len()
        ),
    )
}

pub fn fp32_drift() -> Verdict {
    let corpus = starlink_elements();
    let report = match drift_report(&corpus, &grav(), DRIFT_HORIZON_DAYS, DRIFT_STEP_MIN, &BatchEngine::default()) {
        Ok(r) => r,
        Err(e) => return Verdict::check(false, e.to_string()),
    };
    let last = report.days.len() - 1;
    let epoch = report.dr_km[0][1];
    let final_dr = report.dr_km[last][1];
    let final_dv = report.dv_kms[last][1];
    let ok = corpus.len() >= DRIFT_MIN_CORPUS
        && report.days[last] == DRIFT_HORIZON_DAYS
        && (DRIFT_EPOCH_MEDIAN_KM.0..=DRIFT_EPOCH_MEDIAN_KM.1).contains(&epoch)
        && final_dr < DRIFT_FINAL_MEDIAN_DR_KM
        && final_dv < DRIFT_FINAL_MEDIAN_DV_KMS;
    Verdict::check(
        ok,
        format!(
            "{} sats, {} grid times, {} cells excluded; median|dr| epoch={:.3} m (in [{}, {}] m), day {}={:.3} m (< {} m); median|dv| day {}={:.4} m/s (< {} m/s)",
            corpus.len(),
            report.days.len(),
            report.excluded_cells,
            epoch * 1e3,
            DRIFT_EPOCH_MEDIAN_KM.0 * 1e3,
            DRIFT_EPOCH_MEDIAN_KM.1 * 1e3,
            DRIFT_HORIZON_DAYS,
            final_dr * 1e3,
            DRIFT_FINAL_MEDIAN_DR_KM * 1e3,
            DRIFT_HORIZON_DAYS,
            final_dv * 1e3,
            DRIFT_FINAL_MEDIAN_DV_KMS * 1e3
        ),
    )
}

pub struct JacobianScan {
    pub max_err: f64,
    pub worst: (u32, f64, usize),
    pub compared_columns: usize,
    pub straddled_columns: usize,
    pub invalid_cells: usize,
}

pub fn jacobian_scan(rel_step: f64) -> JacobianScan {
    let g = grav();
    let mut scan = JacobianScan {
        max_err: 0.0,
        worst: (0, 0.0, 0),
        compared_columns: 0,
        straddled_columns: 0,
        invalid_cells: 0,
    };
    for (cat, e) in near_earth_elements() {
        for t in JACOBIAN_TIMES_MIN {
            let ad = jacobian_state_wrt_elements(&e, &g, t);
            let fd = finite_difference_jacobian(&e, &g, t, rel_step);
            if !ad.is_valid() || !fd.jacobian.is_valid() {
                scan.invalid_cells += 1;
                continue;
            }
            for (j, err) in column_relative_error(&ad, &fd.jacobian).into_iter().enumerate() {
                if fd.straddled.contains(&j) {
                    scan.straddled_columns += 1;
                    continue;
                }
                scan.compared_columns += 1;
                if err > scan.max_err || err.is_nan() {
                    scan.max_err = err;
                    scan.worst = (cat, t, j);
                }
            }
        }
    }
    scan
}

/// Frobenius norm of AD − FD over the columns whose step is relative (not
/// floored) at both step sizes.
pub fn jacobian_convergence() -> (f64, f64) {
    let e = near_earth_elements().into_iter().find(|(c, _)| *c == 25544).expect("ISS record").1;
    let g = grav();
    let ad = jacobian_state_wrt_elements(&e, &g, JACOBIAN_CONVERGENCE_TIME_MIN);
    let err = |rel: f64| {
        let fd = finite_difference_jacobian(&e, &g, JACOBIAN_CONVERGENCE_TIME_MIN, rel);
        let x = e.kernel_array();
        let mut sum = 0.0;
        let (a, b) = JACOBIAN_CONVERGENCE_STEPS;
        for (j, xj) in x.iter().enumerate() {
            if a.min(b) * xj.abs() < sgp4_batch::jacobian::FD_ABS_FLOOR[j] {
                continue;
            }
            for i in 0..6 {
                sum += (ad.matrix[i][j] - fd.jacobian.matrix[i][j]).powi(2);
            }
        }
        sum.sqrt()
    };
    let (a, b) = (err(JACOBIAN_CONVERGENCE_STEPS.0), err(JACOBIAN_CONVERGENCE_STEPS.1));
    (a, a / b)
}

pub fn jacobian_correctness() -> Verdict {
    let scan = jacobian_scan(JACOBIAN_REL_STEP);
    let (_, ratio) = jacobian_convergence();
    let ok = scan.compared_columns > 0
        && scan.max_err < JACOBIAN_MAX_REL_ERR
        && (JACOBIAN_CONVERGENCE_RATIO.0..=JACOBIAN_CONVERGENCE_RATIO.1).contains(&ratio);
    Verdict::check(
        ok,
        format!(
            "{} columns over t={:?} min: max column rel err={:.2e} (< {JACOBIAN_MAX_REL_ERR:e}) worst cat {} t={} col {}; {} columns skipped (FD stencil crosses an init guard), {} invalid cells; halving step shrinks error x{ratio:.2} (in [{}, {}])",
            scan.compared_columns,
            JACOBIAN_TIMES_MIN,
            scan.max_err,
            scan.worst.0,
            scan.worst.1,
            sgp4_batch::jacobian::ELEMENT_LABELS[scan.worst.2],
            scan.straddled_columns,
            scan.invalid_cells,
            JACOBIAN_CONVERGENCE_RATIO.0,
            JACOBIAN_CONVERGENCE_RATIO.1
        ),
    )
}

pub fn batch_pool() -> Vec<MeanElements> {
    let mut pool: Vec<MeanElements> = verification_elements().into_iter().map(|(_, e)| e).collect();
    pool.extend(starlink_elements().into_iter().step_by(8));
    pool
}

pub fn worker_counts() -> [usize; 3] {
    [1, 2, available_workers().max(4)]
}

pub fn dump<T: Float>(r: &BatchResult<T>) -> Vec<u8> {
    let mut out = Vec::new();
    write_dump(r, &mut out).expect("in-memory write");
    out
}

/// Batch result assembled from the scalar double loop.
pub fn scalar_grid<T: Float>(elems: &[MeanElements], times: &[T]) -> BatchResult<T> {
    let g = grav();
    let (n, m) = (elems.len(), times.len());
    let mut planes: [Vec<T>; 6] = Default::default();
    let mut errors = Vec::with_capacity(n * m);
    for e in elems {
        let sat = sgp4_init(&e.to_kernel::<T>(), &g);
        for &t in times {
            let s = sgp4_propagate(&sat, t);
            for (p, x) in planes.iter_mut().zip(s.components()) {
                p.push(x);
            }
            errors.push(s.error_code);
        }
    }
    BatchResult { n, m, planes, errors }
}

pub fn check_case<T: Float>(elems: &[MeanElements], minutes: &[f64]) -> Result<(), TestCaseError> {
    let g = grav();
    let times: Vec<T> = minutes.iter().map(|&t| T::from_f64(t)).collect();
    let expect = dump(&scalar_grid(elems, &times));
    for workers in worker_counts() {
        let engine = BatchEngine::new(workers);
        let got = engine.propagate_elements(elems, &g, &times).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(dump(&got) == expect, "batch != scalar at {} workers", workers);
        let sats: SatBatch<T> = engine.init_batch(elems, &g);
        let mut streamed = BatchResult {
            n: elems.len(),
            m: times.len(),
            planes: Default::default(),
            errors: Vec::new(),
        };
        let mut cells = vec![None; elems.len() * times.len()];
        engine
            .propagate_streamed(&sats, &times, 5, 3, |tile| {
                for i in tile.rows.clone() {
                    for j in tile.cols.clone() {
                        cells[i * times.len() + j] = Some(tile.cell(i, j));
                    }
                }
                Ok::<_, Infallible>(())
            })
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        for c in cells {
            let c = c.ok_or_else(|| TestCaseError::fail("tile cell missing"))?;
            for (p, x) in streamed.planes.iter_mut().zip(c.components()) {
                p.push(x);
            }
            streamed.errors.push(c.error_code);
        }
        prop_assert!(dump(&streamed) == expect, "streamed != scalar at {} workers", workers);
    }
    Ok(())
}

pub fn batch_case_strategy(pool_len: usize) -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    (
        proptest::collection::vec(0..pool_len, 1..=BATCH_MAX_DIM),
        proptest::collection::vec(-1440.0f64..4320.0, 1..=BATCH_MAX_DIM),
    )
}

pub fn batch_equals_scalar() -> Verdict {
    let pool = batch_pool();
    let mut runner = TestRunner::new(Config {
        cases: BATCH_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let result = runner.run(&batch_case_strategy(pool.len()), |(idx, minutes)| {
        let elems: Vec<MeanElements> = idx.iter().map(|&i| pool[i]).collect();
        check_case::<f64>(&elems, &minutes)?;
        check_case::<f32>(&elems, &minutes)
    });
    let detail = format!(
        "{BATCH_CASES} random cases, N,M <= {BATCH_MAX_DIM}, pool of {} TLEs, f32+f64, workers {:?}, bulk and streamed",
        pool.len(),
        worker_counts()
    );
    match result {
        Ok(()) => Verdict::check(true, detail),
        Err(e) => Verdict::check(false, format!("{detail}: {e}")),
    }
}

pub fn streamed_peak(n: usize, m: usize) -> Option<usize> {
    let g = grav();
    let engine = BatchEngine::default();
    let elems = tile_catalogue(&starlink_elements(), n);
    let sats: SatBatch<f64> = engine.init_batch(&elems, &g);
    let times = sgp4_batch::bench::day_grid(m);
    let mut checksum = 0.0f64;
    let (summary, peak) = alloc::peak_during(|| {
        engine.propagate_streamed(&sats, &times, MEMORY_TILE.0, MEMORY_TILE.1, |tile| {
            checksum += tile.planes[0].iter().filter(|x| x.is_finite()).sum::<f64>();
            Ok::<_, Infallible>(())
        })
    });
    let summary = summary.ok()?;
    assert_eq!(summary.cells_emitted, n * m);
    assert!(checksum.is_finite());
    peak
}

pub fn memory_contract() -> Verdict {
    let mut peaks = Vec::new();
    for (n, m) in MEMORY_SHAPES {
        match streamed_peak(n, m) {
            Some(p) => peaks.push(p),
            None => return Verdict::check(false, "counting allocator not installed".into()),
        }
    }
    let lo = *peaks.iter().min().unwrap() as f64;
    let hi = *peaks.iter().max().unwrap() as f64;
    let ratio = hi / lo.max(1.0);
    let cells: Vec<usize> = MEMORY_SHAPES.iter().map(|(n, m)| n * m).collect();
    Verdict::check(
        ratio < MEMORY_MAX_PEAK_RATIO,
        format!(
            "tile {:?}; N*M {:?}; peak auxiliary bytes {:?}; max/min={ratio:.3} (< {MEMORY_MAX_PEAK_RATIO})",
            MEMORY_TILE, cells, peaks
        ),
    )
}

pub fn timing_protocol() -> Verdict {
    let protocol = TimingProtocol::default();
    let mut notes = Vec::new();
    let mut ok = protocol.threshold_s == TIMING_THRESHOLD_S && protocol.trials == TIMING_TRIALS;

    // warm-up: the first call is slow and must not appear in any trial
    let mut calls = 0u64;
    let warm = time_task(&protocol, || {
        calls += 1;
        if calls == 1 {
            std::thread::sleep(std::time::Duration::from_secs_f64(TIMING_WARMUP_STALL_S));
        }
        Ok::<_, Infallible>(())
    })
    .expect("infallible");
    let warm_ok = warm.trial_times_s.iter().all(|&t| t < TIMING_WARMUP_STALL_S);
    ok &= warm_ok;
    notes.push(format!("warm-up excluded: {warm_ok}"));

    let base = starlink_elements();
    let workers = available_workers();
    let sweep = scaling_sweep(
        &base,
        &grav(),
        &SweepConfig {
            label: "acceptance".into(),
            axis: Axis::Satellites,
            sizes: SWEEP_SIZES.to_vec(),
            fixed_other: SWEEP_FIXED_M,
            precision: Precision::Double,
            workers,
            unit: TimedUnit::FullPipeline,
            protocol,
        },
    )
    .expect("valid sweep");
    let records = &sweep.records;
    let fidelity = sweep.stopped.is_none()
        && records.len() == SWEEP_SIZES.len()
        && records.iter().all(|r| {
            r.timing.iterations as f64 * r.timing.min_time_s >= TIMING_THRESHOLD_S && r.timing.trial_times_s.len() == TIMING_TRIALS
        });
    ok &= fidelity;
    notes.push(format!("{} records with iterations*min_time >= {TIMING_THRESHOLD_S} s and {TIMING_TRIALS} trials: {fidelity}", records.len()));

    if records.len() >= 2 {
        let per_cell = |r: &sgp4_batch::bench::BenchRecord| r.timing.min_time_s / r.cells() as f64;
        let (a, b) = (per_cell(&records[records.len() - 2]), per_cell(&records[records.len() - 1]));
        let dev = (b / a - 1.0).abs();
        ok &= dev <= PER_CELL_TOLERANCE;
        notes.push(format!("per-cell {:.1} ns vs {:.1} ns, deviation {:.1}% (<= {}%)", a * 1e9, b * 1e9, dev * 100.0, PER_CELL_TOLERANCE * 100.0));
    }

    let elems = tile_catalogue(&base, STARLINK_SCALE.0);
    let minutes = sgp4_batch::bench::day_grid(STARLINK_SCALE.1);
    let start = Instant::now();
    let grid = BatchEngine::new(workers).propagate_elements::<f64>(&elems, &grav(), &minutes);
    let elapsed = start.elapsed().as_secs_f64();
    let spot_ok = grid.as_ref().is_ok_and(|grid| {
        [(0, 0), (4670, 500), (9340, 999)].iter().all(|&(i, j)| {
            let s = sgp4_propagate(&sgp4_init(&elems[i].to_kernel::<f64>(), &grav()), minutes[j]);
            let c = grid.cell(i, j);
            s.components().map(f64::to_bits) == c.components().map(f64::to_bits) && s.error_code == c.error_code
        })
    });
    ok &= spot_ok && elapsed < STARLINK_SCALE_LIMIT_S;
    notes.push(format!(
        "{}x{} at 64-bit on {workers} worker(s): {elapsed:.1} s (< {STARLINK_SCALE_LIMIT_S} s), spot cells equal scalar: {spot_ok}",
        STARLINK_SCALE.0, STARLINK_SCALE.1
    ));

    let mut partial = false;
    if workers < SCALING_MIN_CORES {
        partial = true;
        notes.push(format!("speedup >= {SCALING_MIN_SPEEDUP}x: N/A, {workers} core(s) available, needs {SCALING_MIN_CORES}"));
    } else {
        let throughput = |w: usize| {
            let cfg = SweepConfig {
                label: "scaling".into(),
                axis: Axis::Satellites,
                sizes: vec![SWEEP_SIZES[SWEEP_SIZES.len() - 1]],
                fixed_other: SWEEP_FIXED_M,
                precision: Precision::Double,
                workers: w,
                unit: TimedUnit::PropagateOnly,
                protocol,
            };
            scaling_sweep(&base, &grav(), &cfg).expect("valid sweep").records[0].throughput()
        };
        let speedup = throughput(workers) / throughput(1);
        ok &= speedup >= SCALING_MIN_SPEEDUP;
        notes.push(format!("speedup {workers} vs 1 workers: {speedup:.2}x (>= {SCALING_MIN_SPEEDUP}x)"));
    }
    let status = match (ok, partial) {
        (false, _) => Status::Fail,
        (true, true) => Status::Partial,
        (true, false) => Status::Pass,
    };
    Verdict {
        status,
        detail: notes.join("; "),
    }
}

fn parse_bool(s: &str) -> bool {
    s == "1"
}

/// Field-by-field comparison of the lenient parse of the synthetic
/// catalogue against the reference decoder. Returns (records, mismatches).
pub fn parser_mismatches() -> (usize, Vec<String>, usize) {
    let text = read_data("catalogue_synthetic.tle");
    let parsed = match sgp4_batch::parse_catalogue(&text, ParseMode::Lenient) {
        Ok(p) => p,
        Err(e) => return (0, vec![e.to_string()], 0),
    };
    let reference = read_data("catalogue_reference.csv");
    let mut lines = reference.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let mut bad = Vec::new();
    if rows.len() != parsed.len() {
        bad.push(format!("record count {} vs {}", parsed.len(), rows.len()));
    }
    let mut strict_rejections = 0;
    for (k, (rec, row)) in parsed.iter().zip(&rows).enumerate() {
        let t = &rec.tle;
        let flagged = |line: u8| {
            t.warnings.iter().any(|w| matches!(w, sgp4_batch::tle::ParseWarning::ChecksumMismatch { line: l, .. } if *l == line))
        };
        for (name, value) in header.iter().zip(row) {
            let f = |x: f64| value.parse::<f64>().map(|v| v == x).unwrap_or(false);
            let u = |x: u64| value.parse::<u64>().map(|v| v == x).unwrap_or(false);
            let same = match *name {
                "catalog_number" => u(t.catalog_number as u64),
                "classification" => *value == t.classification.to_string(),
                "intl_designator" => *value == t.intl_designator,
                "epoch_year" => u(t.epoch_year as u64),
                "epoch_day_int" => u(t.epoch_day_int as u64),
                "epoch_day_frac" => f(t.epoch_day_frac),
                "ndot" => f(t.ndot),
                "nddot" => f(t.nddot),
                "bstar" => f(t.bstar),
                "element_set_number" => u(t.element_set_number as u64),
                "inclination_deg" => f(t.inclination_deg),
                "raan_deg" => f(t.raan_deg),
                "eccentricity" => f(t.eccentricity),
                "argp_deg" => f(t.argp_deg),
                "mean_anomaly_deg" => f(t.mean_anomaly_deg),
                "mean_motion_revday" => f(t.mean_motion_revday),
                "rev_number" => u(t.rev_number as u64),
                "checksum1" => u(t.checksum1 as u64),
                "checksum2" => u(t.checksum2 as u64),
                "checksum1_ok" => parse_bool(value) != flagged(1),
                "checksum2_ok" => parse_bool(value) != flagged(2),
                other => {
                    bad.push(format!("unknown column {other}"));
                    true
                }
            };
            if !same {
                bad.push(format!("record {k} ({}) field {name}: reference {value}", t.catalog_number));
            }
        }
        let strict = sgp4_batch::parse_tle(&rec.line1, &rec.line2, ParseMode::Strict);
        let expect_reject = row[header.iter().position(|h| *h == "checksum1_ok").unwrap()] == "0"
            || row[header.iter().position(|h| *h == "checksum2_ok").unwrap()] == "0";
        match strict {
            Err(TleError::Checksum { .. }) if expect_reject => strict_rejections += 1,
            Ok(_) if !expect_reject => {}
            other => bad.push(format!("record {k}: strict parse {:?}", other.map(|_| ())))
        }
    }
    (parsed.len(), bad, strict_rejections)
}

pub fn parser_conformance() -> Verdict {
    let (n, bad, rejected) = parser_mismatches();
    let alpha5 = records("catalogue_synthetic.tle").iter().filter(|r| r.tle.catalog_number > 99_999).count();
    Verdict::check(
        n >= PARSER_MIN_RECORDS && bad.is_empty() && rejected > 0 && alpha5 > 0,
        format!(
            "{n} records (>= {PARSER_MIN_RECORDS}), {alpha5} Alpha-5, {rejected} checksum defects rejected in strict mode; field mismatches {}{}",
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}
