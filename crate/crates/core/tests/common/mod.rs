#![allow(dead_code)]

pub mod criteria;

use std::path::PathBuf;

use sgp4_batch::{parse_catalogue, sgp4_init, tle_to_elements, GravityModel, MeanElements, ParseMode, SatInit, TleRecord};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn records(name: &str) -> Vec<TleRecord> {
    parse_catalogue(&read_data(name), ParseMode::Lenient).unwrap()
}

pub fn verification_elements() -> Vec<(u32, MeanElements)> {
    records("verification.tle")
        .iter()
        .map(|r| (r.tle.catalog_number, tle_to_elements(&r.tle)))
        .collect()
}

/// Initialized verification satellites in file order. Some catalog numbers
/// appear more than once with different epochs.
pub fn verification_sats() -> Vec<(u32, SatInit<f64>)> {
    let grav = GravityModel::wgs72();
    verification_elements()
        .into_iter()
        .map(|(cat, e)| (cat, sgp4_init(&e.to_kernel(), &grav)))
        .collect()
}

/// First verification satellite with the given catalog number.
pub fn by_catalog(sats: &[(u32, SatInit<f64>)], catalog: u32) -> SatInit<f64> {
    sats.iter().find(|(c, _)| *c == catalog).map(|(_, s)| *s).unwrap()
}

/// Verification satellites whose initialization succeeds.
pub fn near_earth_elements() -> Vec<(u32, MeanElements)> {
    let grav = GravityModel::wgs72();
    verification_elements()
        .into_iter()
        .filter(|(_, e)| sgp4_init(&e.to_kernel::<f64>(), &grav).error_code_at_init.is_ok())
        .collect()
}

pub fn starlink_elements() -> Vec<MeanElements> {
    records("starlink_like.tle").iter().map(|r| tle_to_elements(&r.tle)).collect()
}

pub struct StateRow {
    /// Index of the record in the verification file.
    pub record: usize,
    pub catalog: u32,
    pub tsince: f64,
    pub init_error: u8,
    pub error: u8,
    pub rv: Option<[f64; 6]>,
}

pub fn load_reference_states() -> Vec<StateRow> {
    let mut record = 0usize;
    let mut previous = f64::NEG_INFINITY;
    read_data("reference_states.csv")
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let rv = if f[4] == "nan" {
                None
            } else {
                let mut a = [0.0; 6];
                for k in 0..6 {
                    a[k] = f[4 + k].parse().unwrap();
                }
                Some(a)
            };
            let tsince: f64 = f[1].parse().unwrap();
            if tsince <= previous {
                record += 1;
            }
            previous = tsince;
            StateRow {
                record,
                catalog: f[0].parse().unwrap(),
                tsince,
                init_error: f[2].parse().unwrap(),
                error: f[3].parse().unwrap(),
                rv,
            }
        })
        .collect()
}

/// Catalog number, success flag and named init constants.
pub type InitRecord = (u32, bool, Vec<(String, f64)>);

pub fn load_reference_init() -> Vec<InitRecord> {
    let text = read_data("reference_init.csv");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let values = header[3..]
                .iter()
                .zip(&f[3..])
                .map(|(h, v)| (h.to_string(), v.parse().unwrap()))
                .collect();
            (f[0].parse().unwrap(), f[2] == "1", values)
        })
        .collect()
}

pub fn init_field(sat: &SatInit<f64>, name: &str) -> f64 {
    match name {
        "no_unkozai" => sat.no_unkozai,
        "ao" => sat.ao,
        "con41" => sat.con41,
        "cc1" => sat.cc1,
        "cc4" => sat.cc4,
        "cc5" => sat.cc5,
        "d2" => sat.d2,
        "d3" => sat.d3,
        "d4" => sat.d4,
        "delmo" => sat.delmo,
        "eta" => sat.eta,
        "argpdot" => sat.argpdot,
        "omgcof" => sat.omgcof,
        "sinmao" => sat.sinmao,
        "t2cof" => sat.t2cof,
        "t3cof" => sat.t3cof,
        "t4cof" => sat.t4cof,
        "t5cof" => sat.t5cof,
        "x1mth2" => sat.x1mth2,
        "x7thm1" => sat.x7thm1,
        "mdot" => sat.mdot,
        "nodedot" => sat.nodedot,
        "xlcof" => sat.xlcof,
        "xmcof" => sat.xmcof,
        "nodecf" => sat.nodecf,
        "aycof" => sat.aycof,
        other => panic!("unknown init field {other}"),
    }
}
