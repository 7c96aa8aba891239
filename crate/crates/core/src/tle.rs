//! Fixed-column Two-Line Element parsing.
//!
//! Column numbers below are 1-indexed, inclusive, as in the public format
//! definition. Every line is exactly 69 ASCII characters.
//!
//! | Line 1  | Field                                                    |
//! |---------|----------------------------------------------------------|
//! | 1       | line number `1`                                          |
//! | 3–7     | catalog number (Alpha-5 capable)                         |
//! | 8       | classification                                           |
//! | 10–17   | international designator                                 |
//! | 19–20   | epoch year, two digits (57–99 → 19xx, 00–56 → 20xx)      |
//! | 21–32   | epoch day of year with fractional day, `DDD.DDDDDDDD`    |
//! | 34–43   | first derivative of mean motion ÷ 2, rev/day²            |
//! | 45–52   | second derivative of mean motion ÷ 6, implied point      |
//! | 54–61   | B* drag term, implied point and exponent                 |
//! | 63      | ephemeris type                                           |
//! | 65–68   | element set number                                       |
//! | 69      | modulo-10 checksum                                       |
//!
//! | Line 2  | Field                                                    |
//! |---------|----------------------------------------------------------|
//! | 1       | line number `2`                                          |
//! | 3–7     | catalog number                                           |
//! | 9–16    | inclination, degrees                                     |
//! | 18–25   | right ascension of the ascending node, degrees           |
//! | 27–33   | eccentricity, implied leading decimal point              |
//! | 35–42   | argument of perigee, degrees                             |
//! | 44–51   | mean anomaly, degrees                                    |
//! | 53–63   | mean motion, rev/day                                     |
//! | 64–68   | revolution number at epoch                               |
//! | 69      | modulo-10 checksum                                       |
//!
//! Implied-point fields (`nddot`, `bstar`) are `±MMMMM±E`, meaning
//! `±0.MMMMM × 10^±E`.
//!
//! The epoch day is kept as an integer day plus a fraction so that no
//! narrower-than-64-bit type ever holds their sum.
//!
//! `ndot` and `nddot` are stored for fidelity only; SGP4 does not use them.

use std::ops::Range;

use thiserror::Error;

pub const LINE_LEN: usize = 69;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Exact 69-column lines; checksum mismatches are errors.
    Strict,
    /// Trailing whitespace is trimmed and lines re-padded to 69 columns;
    /// checksum problems become warnings.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    ChecksumMismatch { line: u8, printed: u8, computed: u8 },
    ChecksumMissing { line: u8, computed: u8 },
    Repadded { line: u8, original_len: usize },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ChecksumMismatch { line, printed, computed } => {
                write!(f, "line {line}: checksum {printed} printed, {computed} computed")
            }
            Self::ChecksumMissing { line, computed } => write!(f, "line {line}: checksum missing, {computed} computed"),
            Self::Repadded { line, original_len } => write!(f, "line {line}: re-padded from {original_len} characters"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TleError {
    #[error("line {line}: expected {LINE_LEN} columns, found {len}")]
    Length { line: u8, len: usize },
    #[error("line is {len} characters; a checksum needs at least 68")]
    ChecksumLength { len: usize },
    #[error("line {line}: non-ASCII character")]
    NonAscii { line: u8 },
    #[error("line {line}: column 1 is {found:?}, expected '{line}'")]
    LineNumber { line: u8, found: char },
    #[error("catalog numbers disagree: line 1 has {first}, line 2 has {second}")]
    CatalogMismatch { first: u32, second: u32 },
    #[error("line {line}: checksum column is {printed}, computed {computed}")]
    Checksum { line: u8, printed: u8, computed: u8 },
    #[error("invalid Alpha-5 catalog field {0:?}")]
    InvalidAlpha5(String),
    #[error("line {line}: cannot parse {field} from {text:?}")]
    Field {
        line: u8,
        field: &'static str,
        text: String,
    },
    #[error("epoch day {day} out of range 1..=366")]
    EpochDay { day: u32 },
}

/// Raw fields of one element set, before unit conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLineElement {
    pub catalog_number: u32,
    pub classification: char,
    pub intl_designator: String,
    pub epoch_year: i32,
    pub epoch_day_int: u32,
    pub epoch_day_frac: f64,
    pub ndot: f64,
    pub nddot: f64,
    pub bstar: f64,
    pub ephemeris_type: u8,
    pub element_set_number: u32,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub argp_deg: f64,
    pub mean_anomaly_deg: f64,
    pub mean_motion_revday: f64,
    pub rev_number: u32,
    pub checksum1: u8,
    pub checksum2: u8,
    pub warnings: Vec<ParseWarning>,
}

/// A parsed record together with its optional title line.
#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    pub name: Option<String>,
    pub line1: String,
    pub line2: String,
    pub tle: TwoLineElement,
}

#[derive(Debug, Error)]
#[error("record starting at line {line_number}: {source}")]
pub struct CatalogueError {
    pub line_number: usize,
    #[source]
    pub source: TleError,
}

/// Modulo-10 checksum over columns 1–68: digits count their value, `-`
/// counts 1, everything else 0.
pub fn checksum(line: &str) -> Result<u8, TleError> {
    let bytes = line.as_bytes();
    if bytes.len() < 68 {
        return Err(TleError::ChecksumLength { len: bytes.len() });
    }
    let sum: u32 = bytes[..68]
        .iter()
        .map(|&b| match b {
            b'0'..=b'9' => u32::from(b - b'0'),
            b'-' => 1,
            _ => 0,
        })
        .sum();
    Ok((sum % 10) as u8)
}

/// Decodes a 5-character catalog field, including the Alpha-5 extension
/// (`A0000` = 100000 … `Z9999` = 339999, letters I and O unused).
pub fn decode_alpha5(field: &str) -> Result<u32, TleError> {
    let invalid = || TleError::InvalidAlpha5(field.to_owned());
    let bytes = field.as_bytes();
    if bytes.len() != 5 || !field.is_ascii() {
        return Err(invalid());
    }
    let lead = bytes[0];
    let tail_digits = |s: &[u8]| -> Result<u32, TleError> {
        s.iter().try_fold(0u32, |acc, &b| match b {
            b'0'..=b'9' => Ok(acc * 10 + u32::from(b - b'0')),
            _ => Err(invalid()),
        })
    };
    match lead {
        b'0'..=b'9' | b' ' => {
            let trimmed = field.trim_start();
            if trimmed.is_empty() {
                return Err(invalid());
            }
            tail_digits(trimmed.as_bytes())
        }
        b'A'..=b'Z' if lead != b'I' && lead != b'O' => {
            let mut index = u32::from(lead - b'A') + 10;
            if lead > b'I' {
                index -= 1;
            }
            if lead > b'O' {
                index -= 1;
            }
            Ok(index * 10_000 + tail_digits(&bytes[1..])?)
        }
        _ => Err(invalid()),
    }
}

/// 1-indexed inclusive column span as a byte range.
const fn cols(first: usize, last: usize) -> Range<usize> {
    (first - 1)..last
}

fn field(line: &str, span: Range<usize>) -> &str {
    &line[span]
}

fn parse_f64(line_no: u8, name: &'static str, text: &str) -> Result<f64, TleError> {
    let trimmed = text.trim();
    let trimmed = trimmed.strip_prefix('+').unwrap_or(trimmed);
    trimmed.parse::<f64>().map_err(|_| TleError::Field {
        line: line_no,
        field: name,
        text: text.to_owned(),
    })
}

fn parse_u32_or_zero(line_no: u8, name: &'static str, text: &str) -> Result<u32, TleError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(0);
    }
    trimmed.parse::<u32>().map_err(|_| TleError::Field {
        line: line_no,
        field: name,
        text: text.to_owned(),
    })
}

/// `±MMMMM±E` → `±0.MMMMM e ±E`, converted in a single correctly rounded step.
fn parse_implied(line_no: u8, name: &'static str, text: &str) -> Result<f64, TleError> {
    let err = || TleError::Field {
        line: line_no,
        field: name,
        text: text.to_owned(),
    };
    let body = text.trim_end();
    if body.len() < 3 {
        return Err(err());
    }
    let (sign, body) = match body.as_bytes()[0] {
        b'-' => ("-", &body[1..]),
        b'+' | b' ' => ("", &body[1..]),
        _ => ("", body),
    };
    if body.len() < 2 {
        return Err(err());
    }
    let (mantissa, exponent) = body.split_at(body.len() - 2);
    let mantissa = mantissa.trim();
    let exp_sign = exponent.as_bytes()[0];
    if !matches!(exp_sign, b'-' | b'+' | b' ')
        || !exponent.as_bytes()[1].is_ascii_digit()
        || !mantissa.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    let exponent = exponent.replace(' ', "+");
    let mantissa = if mantissa.is_empty() { "0" } else { mantissa };
    format!("{sign}0.{mantissa}e{exponent}")
        .parse::<f64>()
        .map_err(|_| err())
}

fn normalise_line(raw: &str, line_no: u8, mode: ParseMode, warnings: &mut Vec<ParseWarning>) -> Result<String, TleError> {
    if !raw.is_ascii() {
        return Err(TleError::NonAscii { line: line_no });
    }
    match mode {
        ParseMode::Strict => {
            if raw.len() != LINE_LEN {
                return Err(TleError::Length {
                    line: line_no,
                    len: raw.len(),
                });
            }
            Ok(raw.to_owned())
        }
        ParseMode::Lenient => {
            let trimmed = raw.trim_end();
            if trimmed.len() > LINE_LEN || trimmed.len() < 64 {
                return Err(TleError::Length {
                    line: line_no,
                    len: raw.len(),
                });
            }
            if trimmed.len() != LINE_LEN {
                warnings.push(ParseWarning::Repadded {
                    line: line_no,
                    original_len: raw.len(),
                });
            }
            Ok(format!("{trimmed:<LINE_LEN$}"))
        }
    }
}

fn verify_checksum(line: &str, line_no: u8, mode: ParseMode, warnings: &mut Vec<ParseWarning>) -> Result<u8, TleError> {
    let computed = checksum(line)?;
    let printed = line.as_bytes()[68];
    if !printed.is_ascii_digit() {
        return match mode {
            ParseMode::Strict => Err(TleError::Field {
                line: line_no,
                field: "checksum",
                text: (printed as char).to_string(),
            }),
            ParseMode::Lenient => {
                warnings.push(ParseWarning::ChecksumMissing {
                    line: line_no,
                    computed,
                });
                Ok(computed)
            }
        };
    }
    let printed = printed - b'0';
    if printed != computed {
        match mode {
            ParseMode::Strict => {
                return Err(TleError::Checksum {
                    line: line_no,
                    printed,
                    computed,
                })
            }
            ParseMode::Lenient => warnings.push(ParseWarning::ChecksumMismatch {
                line: line_no,
                printed,
                computed,
            }),
        }
    }
    Ok(printed)
}

/// Parses one element set from its two data lines.
pub fn parse_tle(line1: &str, line2: &str, mode: ParseMode) -> Result<TwoLineElement, TleError> {
    let mut warnings = Vec::new();
    let l1 = normalise_line(line1, 1, mode, &mut warnings)?;
    let l2 = normalise_line(line2, 2, mode, &mut warnings)?;

    for (line, no) in [(&l1, 1u8), (&l2, 2u8)] {
        let first = line.as_bytes()[0];
        if first != b'0' + no {
            return Err(TleError::LineNumber {
                line: no,
                found: first as char,
            });
        }
    }

    let checksum1 = verify_checksum(&l1, 1, mode, &mut warnings)?;
    let checksum2 = verify_checksum(&l2, 2, mode, &mut warnings)?;

    let catalog_number = decode_alpha5(field(&l1, cols(3, 7)))?;
    let second = decode_alpha5(field(&l2, cols(3, 7)))?;
    if catalog_number != second {
        return Err(TleError::CatalogMismatch {
            first: catalog_number,
            second,
        });
    }

    let yy = parse_u32_or_zero(1, "epoch year", field(&l1, cols(19, 20)))?;
    let epoch_year = if yy >= 57 { 1900 + yy as i32 } else { 2000 + yy as i32 };

    let day_text = field(&l1, cols(21, 32)).trim();
    let (whole, frac) = day_text.split_once('.').unwrap_or((day_text, ""));
    let epoch_day_int = parse_u32_or_zero(1, "epoch day", whole)?;
    if !(1..=366).contains(&epoch_day_int) {
        return Err(TleError::EpochDay { day: epoch_day_int });
    }
    let epoch_day_frac = if frac.is_empty() {
        0.0
    } else if frac.bytes().all(|b| b.is_ascii_digit()) {
        parse_f64(1, "epoch fraction", &format!("0.{frac}"))?
    } else {
        return Err(TleError::Field {
            line: 1,
            field: "epoch day",
            text: day_text.to_owned(),
        });
    };

    let ecc_text = field(&l2, cols(27, 33)).trim();
    if ecc_text.is_empty() || !ecc_text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TleError::Field {
            line: 2,
            field: "eccentricity",
            text: ecc_text.to_owned(),
        });
    }

    let ephemeris = l1.as_bytes()[62];
    Ok(TwoLineElement {
        catalog_number,
        classification: l1.as_bytes()[7] as char,
        intl_designator: field(&l1, cols(10, 17)).trim().to_owned(),
        epoch_year,
        epoch_day_int,
        epoch_day_frac,
        ndot: parse_f64(1, "ndot", &field(&l1, cols(34, 43)).replace(' ', ""))?,
        nddot: parse_implied(1, "nddot", field(&l1, cols(45, 52)))?,
        bstar: parse_implied(1, "bstar", field(&l1, cols(54, 61)))?,
        ephemeris_type: if ephemeris.is_ascii_digit() { ephemeris - b'0' } else { 0 },
        element_set_number: parse_u32_or_zero(1, "element set number", field(&l1, cols(65, 68)))?,
        inclination_deg: parse_f64(2, "inclination", field(&l2, cols(9, 16)))?,
        raan_deg: parse_f64(2, "raan", field(&l2, cols(18, 25)))?,
        eccentricity: parse_f64(2, "eccentricity", &format!("0.{ecc_text}"))?,
        argp_deg: parse_f64(2, "argument of perigee", field(&l2, cols(35, 42)))?,
        mean_anomaly_deg: parse_f64(2, "mean anomaly", field(&l2, cols(44, 51)))?,
        mean_motion_revday: parse_f64(2, "mean motion", field(&l2, cols(53, 63)))?,
        rev_number: parse_u32_or_zero(2, "revolution number", field(&l2, cols(64, 68)))?,
        checksum1,
        checksum2,
        warnings,
    })
}

/// Splits concatenated 2- or 3-line records. Title lines (optionally
/// prefixed `0 `) attach to the following element set.
pub fn parse_catalogue(text: &str, mode: ParseMode) -> Result<Vec<TleRecord>, CatalogueError> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let mut records = Vec::new();
    let mut name: Option<String> = None;
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.trim().is_empty() {
            i += 1;
            continue;
        }
        let is_line1 = line.starts_with("1 ") && lines.get(i + 1).is_some_and(|n| n.starts_with("2 "));
        if is_line1 {
            let tle = parse_tle(line, lines[i + 1], mode).map_err(|source| CatalogueError {
                line_number: i + 1,
                source,
            })?;
            records.push(TleRecord {
                name: name.take(),
                line1: line.to_owned(),
                line2: lines[i + 1].to_owned(),
                tle,
            });
            i += 2;
        } else {
            let title = line.strip_prefix("0 ").unwrap_or(line).trim();
            name = Some(title.to_owned());
            i += 1;
        }
    }
    Ok(records)
}
