//! Calendar helpers for split epochs.
//!
//! Everything here is 64-bit only. The kernel itself takes minutes since
//! epoch and never reconstructs absolute time.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpochError {
    #[error("day {day} out of range for year {year}")]
    DayOutOfRange { year: i32, day: u32 },
    #[error("fraction of day {0} outside [0, 1)")]
    Fraction(f64),
    #[error("malformed ISO-8601 timestamp {0:?}")]
    Iso(String),
}

/// Year, integer day of year (1-based) and fraction of day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epoch {
    pub year: i32,
    pub day_int: u32,
    pub day_frac: f64,
}

pub fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_year(year: i32) -> u32 {
    if is_leap(year) {
        366
    } else {
        365
    }
}

/// Days from 1970-01-01 to the given proleptic Gregorian date.
fn days_from_civil(year: i32, month: u32, day: u32) -> i64 {
    let y = i64::from(year) - i64::from(month <= 2);
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let m = i64::from(month);
    let doy = (153 * (m + if m > 2 { -3 } else { 9 }) + 2) / 5 + i64::from(day) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

const JD_UNIX_EPOCH: f64 = 2_440_587.5;

impl Epoch {
    pub fn new(year: i32, day_int: u32, day_frac: f64) -> Result<Self, EpochError> {
        if day_int == 0 || day_int > days_in_year(year) {
            return Err(EpochError::DayOutOfRange { year, day: day_int });
        }
        if !(0.0..1.0).contains(&day_frac) {
            return Err(EpochError::Fraction(day_frac));
        }
        Ok(Self {
            year,
            day_int,
            day_frac,
        })
    }

    /// Whole days since 1970-01-01 of the start of this epoch's day.
    fn unix_day(&self) -> i64 {
        days_from_civil(self.year, 1, 1) + i64::from(self.day_int) - 1
    }

    pub fn julian_date(&self) -> f64 {
        (self.unix_day() as f64 + JD_UNIX_EPOCH) + self.day_frac
    }

    /// Minutes from `self` to `later`, combining whole days and fractions
    /// separately so the result keeps sub-millisecond resolution.
    pub fn minutes_until(&self, later: &Epoch) -> f64 {
        let days = (later.unix_day() - self.unix_day()) as f64;
        (days + (later.day_frac - self.day_frac)) * 1440.0
    }

    /// Parses `YYYY-MM-DDTHH:MM:SS[.fff…][Z]` or the ordinal form
    /// `YYYY-DDDTHH:MM:SS[.fff…][Z]`.
    pub fn parse_iso8601(text: &str) -> Result<Self, EpochError> {
        let bad = || EpochError::Iso(text.to_owned());
        let s = text.trim();
        let s = s.strip_suffix('Z').unwrap_or(s);
        let (date, time) = s.split_once(['T', ' ']).unwrap_or((s, "00:00:00"));

        let parts: Vec<&str> = date.split('-').collect();
        let num = |p: &str| -> Result<u32, EpochError> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            p.parse().map_err(|_| bad())
        };
        let (year, day_int) = match parts.as_slice() {
            [y, m, d] if y.len() == 4 && m.len() == 2 && d.len() == 2 => {
                let year = num(y)? as i32;
                let (month, day) = (num(m)?, num(d)?);
                if !(1..=12).contains(&month) || day == 0 {
                    return Err(bad());
                }
                let doy = days_from_civil(year, month, day) - days_from_civil(year, 1, 1) + 1;
                let next_month = if month == 12 {
                    days_from_civil(year + 1, 1, 1)
                } else {
                    days_from_civil(year, month + 1, 1)
                };
                if days_from_civil(year, month, day) >= next_month {
                    return Err(bad());
                }
                (year, doy as u32)
            }
            [y, doy] if y.len() == 4 && doy.len() == 3 => (num(y)? as i32, num(doy)?),
            _ => return Err(bad()),
        };

        let hms: Vec<&str> = time.split(':').collect();
        let [h, m, sec] = hms.as_slice() else {
            return Err(bad());
        };
        if h.len() != 2 || m.len() != 2 {
            return Err(bad());
        }
        let (h, m) = (num(h)?, num(m)?);
        let (whole, frac) = sec.split_once('.').unwrap_or((sec, ""));
        let whole = num(whole)?;
        if h > 23 || m > 59 || whole > 59 || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let nanos: u64 = if frac.is_empty() {
            0
        } else {
            format!("{frac:0<9}").parse().map_err(|_| bad())?
        };
        let nanos_of_day = (u64::from(h) * 3600 + u64::from(m) * 60 + u64::from(whole)) * 1_000_000_000 + nanos;
        let day_frac = nanos_of_day as f64 / 86_400e9;
        Self::new(year, day_int, day_frac).map_err(|_| bad())
    }
}

/// Julian date of a split epoch. 64-bit only; a 32-bit Julian date cannot
/// resolve better than about a quarter day.
pub fn epoch_to_julian(epoch_year: i32, epoch_day_int: u32, epoch_day_frac: f64) -> Result<f64, EpochError> {
    Ok(Epoch::new(epoch_year, epoch_day_int, epoch_day_frac)?.julian_date())
}
