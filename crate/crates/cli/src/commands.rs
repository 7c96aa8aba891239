use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use sgp4_batch::batch::{available_workers, write_dump};
use sgp4_batch::bench::{emit_bench_csv, scaling_sweep, Axis, SweepConfig, TimedUnit, TimingProtocol};
use sgp4_batch::jacobian::{ELEMENT_LABELS, STATE_LABELS};
use sgp4_batch::precision::{drift_report, emit_report_csv};
use sgp4_batch::{
    jacobian_state_wrt_elements, parse_catalogue, sgp4_init, sgp4_propagate, tle_to_elements, BatchEngine, BatchResult,
    Epoch, Float, GravityModel, MeanElements, ParseMode, Precision, TleRecord,
};
use thiserror::Error;

use crate::args::{
    AxisArg, BatchArgs, BenchArgs, Common, Format, JacobianArgs, PropagateArgs, ReportArgs, TimesOrUtc, UnitArg, Workers,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub const STATE_HEADER: &str = "tsince_min,rx,ry,rz,vx,vy,vz,error_code";

/// `START:STOP:STEP` with STOP included when it lies on the grid, or a
/// single number. Times are `START + k·STEP`, never accumulated.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| CliError::Usage(format!("--tsince {spec}: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
    match parts.as_slice() {
        [single] => num(single).map(|t| vec![t]).ok_or_else(|| bad("not a number")),
        [start, stop, step] => {
            let (start, stop, step) = (
                num(start).ok_or_else(|| bad("bad START"))?,
                num(stop).ok_or_else(|| bad("bad STOP"))?,
                num(step).ok_or_else(|| bad("bad STEP"))?,
            );
            if step <= 0.0 {
                return Err(bad("STEP must be positive"));
            }
            if stop < start {
                return Err(bad("STOP is before START"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(bad("expected START:STOP:STEP")),
    }
}

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load_records(common: &Common) -> Result<Vec<TleRecord>> {
    let mode = if common.strict { ParseMode::Strict } else { ParseMode::Lenient };
    let records = parse_catalogue(&read_input(&common.input)?, mode).map_err(|e| CliError::Parse(e.to_string()))?;
    for (k, r) in records.iter().enumerate() {
        for w in &r.tle.warnings {
            eprintln!("warning: record {k} ({}): {w}", r.tle.catalog_number);
        }
    }
    if records.is_empty() {
        return Err(CliError::Parse("no TLE records in input".into()));
    }
    Ok(records)
}

fn load_single(common: &Common) -> Result<TleRecord> {
    let mut records = load_records(common)?;
    if records.len() != 1 {
        return Err(CliError::Usage(format!(
            "expected exactly one TLE, found {}; use `batch` for catalogues",
            records.len()
        )));
    }
    Ok(records.remove(0))
}

fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn engine(w: &Workers) -> BatchEngine {
    BatchEngine::new(w.workers.map_or_else(available_workers, |n| n as usize))
}

fn times_or_utc(times: &TimesOrUtc, rec: &TleRecord, precision: Precision) -> Result<Vec<f64>> {
    if let Some(spec) = &times.tsince {
        return parse_range(spec);
    }
    if let Some(list) = &times.tsince_list {
        if let Some(bad) = list.iter().find(|t| !t.is_finite()) {
            return Err(CliError::Usage(format!("--tsince-list: {bad} is not finite")));
        }
        return Ok(list.clone());
    }
    let utc = times.utc.as_deref().unwrap_or_default();
    if precision != Precision::Double {
        return Err(CliError::Usage("--utc is only available with --precision 64".into()));
    }
    let t = &rec.tle;
    let epoch = Epoch::new(t.epoch_year, t.epoch_day_int, t.epoch_day_frac).map_err(|e| CliError::Parse(e.to_string()))?;
    utc.iter()
        .map(|s| {
            Epoch::parse_iso8601(s)
                .map(|later| epoch.minutes_until(&later))
                .map_err(|e| CliError::Usage(format!("--utc: {e}")))
        })
        .collect()
}

fn write_state_row<T: Float + std::fmt::Display>(out: &mut dyn Write, prefix: &str, tsince: f64, s: [T; 6], code: u8) -> io::Result<()> {
    writeln!(out, "{prefix}{tsince},{},{},{},{},{},{},{code}", s[0], s[1], s[2], s[3], s[4], s[5])
}

fn propagate_rows<T: Float + std::fmt::Display>(out: &mut dyn Write, elems: &MeanElements, minutes: &[f64]) -> io::Result<()> {
    let sat = sgp4_init(&elems.to_kernel::<T>(), &GravityModel::wgs72());
    for &t in minutes {
        let s = sgp4_propagate(&sat, T::from_f64(t));
        write_state_row(out, "", t, s.components(), s.error_code as u8)?;
    }
    Ok(())
}

pub fn propagate(args: &PropagateArgs) -> Result<()> {
    let precision = Precision::from(args.precision);
    let rec = load_single(&args.common)?;
    let minutes = times_or_utc(&args.times, &rec, precision)?;
    let elems = tle_to_elements(&rec.tle);
    let mut out = open_out(&args.common.out)?;
    writeln!(out, "{STATE_HEADER}")?;
    match precision {
        Precision::Single => propagate_rows::<f32>(&mut out, &elems, &minutes)?,
        Precision::Double => propagate_rows::<f64>(&mut out, &elems, &minutes)?,
    }
    out.flush()?;
    Ok(())
}

fn batch_csv<T: Float + std::fmt::Display>(
    out: &mut dyn Write,
    records: &[TleRecord],
    minutes: &[f64],
    grid: &BatchResult<T>,
) -> io::Result<()> {
    writeln!(out, "sat_index,catalog,{STATE_HEADER}")?;
    for (i, rec) in records.iter().enumerate() {
        let prefix = format!("{i},{},", rec.tle.catalog_number);
        for (j, &t) in minutes.iter().enumerate() {
            let c = grid.cell(i, j);
            write_state_row(out, &prefix, t, c.components(), c.error_code as u8)?;
        }
    }
    Ok(())
}

fn run_batch<T: Float + std::fmt::Display>(args: &BatchArgs, records: &[TleRecord], minutes: &[f64]) -> Result<()> {
    let elems: Vec<MeanElements> = records.iter().map(|r| tle_to_elements(&r.tle)).collect();
    let times: Vec<T> = minutes.iter().map(|&t| T::from_f64(t)).collect();
    let grid = engine(&args.workers)
        .propagate_elements(&elems, &GravityModel::wgs72(), &times)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let bad = grid.nonzero_error_count();
    if bad > 0 {
        eprintln!("note: {bad} of {} cells carry a nonzero error code", grid.errors.len());
    }
    let mut out = open_out(&args.common.out)?;
    match args.format {
        Format::Csv => batch_csv(&mut out, records, minutes, &grid)?,
        Format::Binary => write_dump(&grid, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn batch(args: &BatchArgs) -> Result<()> {
    let minutes = match (&args.times.tsince, &args.times.tsince_list) {
        (Some(spec), _) => parse_range(spec)?,
        (None, Some(list)) => list.clone(),
        (None, None) => unreachable!("clap enforces one time option"),
    };
    let records = load_records(&args.common)?;
    match Precision::from(args.precision) {
        Precision::Single => run_batch::<f32>(args, &records, &minutes),
        Precision::Double => run_batch::<f64>(args, &records, &minutes),
    }
}

pub fn jacobian(args: &JacobianArgs) -> Result<()> {
    let rec = load_single(&args.common)?;
    let minutes = times_or_utc(&args.times, &rec, Precision::Double)?;
    let [t] = minutes.as_slice() else {
        return Err(CliError::Usage(format!("jacobian takes exactly one time, got {}", minutes.len())));
    };
    let jac = jacobian_state_wrt_elements(&tle_to_elements(&rec.tle), &GravityModel::wgs72(), *t);
    if !jac.is_valid() {
        eprintln!("note: propagation returned error code {}; entries are not meaningful", jac.error_code as u8);
    }
    let mut out = open_out(&args.common.out)?;
    writeln!(out, "state,{}", ELEMENT_LABELS.join(","))?;
    for (label, row) in STATE_LABELS.iter().zip(&jac.matrix) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(out, "{label},{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn precision_report(args: &ReportArgs) -> Result<()> {
    if !(args.horizon_days > 0.0 && args.step_min > 0.0) {
        return Err(CliError::Usage("--horizon-days and --step-min must be positive".into()));
    }
    let records = load_records(&args.common)?;
    let elems: Vec<MeanElements> = records.iter().map(|r| tle_to_elements(&r.tle)).collect();
    let report = drift_report(&elems, &GravityModel::wgs72(), args.horizon_days, args.step_min, &engine(&args.workers))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    eprintln!(
        "corpus {} satellites, {} cells included, {} excluded ({} satellites affected)",
        report.corpus_size, report.included_cells, report.excluded_cells, report.excluded_satellites
    );
    let mut out = open_out(&args.common.out)?;
    out.write_all(emit_report_csv(&report).as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let records = load_records(&args.common)?;
    let base: Vec<MeanElements> = records.iter().map(|r| tle_to_elements(&r.tle)).collect();
    let cfg = SweepConfig {
        label: args.label.clone(),
        axis: match args.axis {
            AxisArg::N => Axis::Satellites,
            AxisArg::M => Axis::Times,
        },
        sizes: args.sizes.clone(),
        fixed_other: args.fixed,
        precision: args.precision.into(),
        workers: engine(&args.workers).workers(),
        unit: match args.unit {
            UnitArg::Full => TimedUnit::FullPipeline,
            UnitArg::Propagate => TimedUnit::PropagateOnly,
        },
        protocol: TimingProtocol::default(),
    };
    let outcome = scaling_sweep(&base, &GravityModel::wgs72(), &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = open_out(&args.common.out)?;
    out.write_all(emit_bench_csv(&outcome.records).as_bytes())?;
    out.flush()?;
    if let Some((size, e)) = outcome.stopped {
        return Err(CliError::Runtime(format!("sweep stopped at size {size}: {e}")));
    }
    Ok(())
}
