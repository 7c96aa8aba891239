//! Orbit Mean-Elements Message ingestion, key=value form only.

use thiserror::Error;

use crate::elements::MeanElements;
use crate::epoch::Epoch;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OmmError {
    #[error("missing mandatory key {0}")]
    MissingKey(&'static str),
    #[error("cannot parse {key} from {value:?}")]
    Value { key: &'static str, value: String },
    #[error("eccentricity {0} outside [0, 1)")]
    Eccentricity(f64),
    #[error("malformed EPOCH {0:?}")]
    Epoch(String),
}

const MANDATORY: [&str; 8] = [
    "MEAN_MOTION",
    "ECCENTRICITY",
    "INCLINATION",
    "RA_OF_ASC_NODE",
    "ARG_OF_PERICENTER",
    "MEAN_ANOMALY",
    "BSTAR",
    "EPOCH",
];

pub fn parse_omm_kvp(text: &str) -> Result<MeanElements, OmmError> {
    let mut values: [Option<&str>; 8] = [None; 8];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("COMMENT") {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        if let Some(slot) = MANDATORY.iter().position(|k| *k == key.trim()) {
            values[slot] = Some(value.trim());
        }
    }

    let mut numbers = [0.0f64; 7];
    for (i, key) in MANDATORY[..7].iter().enumerate() {
        let raw = values[i].ok_or(OmmError::MissingKey(key))?;
        numbers[i] = raw.parse().map_err(|_| OmmError::Value {
            key,
            value: raw.to_owned(),
        })?;
    }
    let epoch_text = values[7].ok_or(OmmError::MissingKey("EPOCH"))?;
    let epoch = Epoch::parse_iso8601(epoch_text).map_err(|_| OmmError::Epoch(epoch_text.to_owned()))?;

    let [mean_motion, ecc, incl, raan, argp, ma, bstar] = numbers;
    if !(0.0..1.0).contains(&ecc) {
        return Err(OmmError::Eccentricity(ecc));
    }
    Ok(MeanElements::from_printed_units(
        mean_motion,
        ecc,
        incl,
        raan,
        argp,
        ma,
        bstar,
        epoch.year,
        epoch.day_int,
        epoch.day_frac,
    ))
}
