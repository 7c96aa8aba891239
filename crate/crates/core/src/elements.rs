use std::f64::consts::{PI, TAU};

use crate::real::Real;
use crate::tle::TwoLineElement;

/// rev/day per rad/min.
pub const XPDOTP: f64 = 1440.0 / (2.0 * PI);
pub const DEG2RAD: f64 = PI / 180.0;

/// Kozai mean elements in canonical units with the epoch kept split.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanElements {
    /// rad/min
    pub no_kozai: f64,
    pub ecco: f64,
    pub inclo: f64,
    pub nodeo: f64,
    pub argpo: f64,
    pub mo: f64,
    /// 1 / Earth radii
    pub bstar: f64,
    pub epoch_year: i32,
    pub epoch_day_int: u32,
    pub epoch_day_frac: f64,
}

/// The seven kernel inputs at a chosen scalar type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elements<T> {
    pub no_kozai: T,
    pub ecco: T,
    pub inclo: T,
    pub nodeo: T,
    pub argpo: T,
    pub mo: T,
    pub bstar: T,
}

impl<T: Copy> Elements<T> {
    pub fn to_array(&self) -> [T; 7] {
        [
            self.no_kozai,
            self.ecco,
            self.inclo,
            self.nodeo,
            self.argpo,
            self.mo,
            self.bstar,
        ]
    }

    pub fn from_array(a: [T; 7]) -> Self {
        Self {
            no_kozai: a[0],
            ecco: a[1],
            inclo: a[2],
            nodeo: a[3],
            argpo: a[4],
            mo: a[5],
            bstar: a[6],
        }
    }
}

impl MeanElements {
    /// Builds elements from the printed TLE/OMM units.
    #[allow(clippy::too_many_arguments)]
    pub fn from_printed_units(
        mean_motion_revday: f64,
        eccentricity: f64,
        inclination_deg: f64,
        raan_deg: f64,
        argp_deg: f64,
        mean_anomaly_deg: f64,
        bstar: f64,
        epoch_year: i32,
        epoch_day_int: u32,
        epoch_day_frac: f64,
    ) -> Self {
        Self {
            no_kozai: mean_motion_revday / XPDOTP,
            ecco: eccentricity,
            inclo: inclination_deg * DEG2RAD,
            nodeo: wrap_angle(raan_deg * DEG2RAD),
            argpo: wrap_angle(argp_deg * DEG2RAD),
            mo: wrap_angle(mean_anomaly_deg * DEG2RAD),
            bstar,
            epoch_year,
            epoch_day_int,
            epoch_day_frac,
        }
    }

    /// Rounds the seven kernel inputs to `T` (or lifts them to constants).
    pub fn to_kernel<T: Real>(&self) -> Elements<T> {
        Elements::from_array(self.kernel_array().map(T::from_f64))
    }

    pub fn kernel_array(&self) -> [f64; 7] {
        [
            self.no_kozai,
            self.ecco,
            self.inclo,
            self.nodeo,
            self.argpo,
            self.mo,
            self.bstar,
        ]
    }

    pub fn with_kernel_array(&self, a: [f64; 7]) -> Self {
        Self {
            no_kozai: a[0],
            ecco: a[1],
            inclo: a[2],
            nodeo: a[3],
            argpo: a[4],
            mo: a[5],
            bstar: a[6],
            ..*self
        }
    }
}

/// Maps into [0, 2π). Values already in range are returned unchanged.
fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r == TAU {
        0.0
    } else {
        r
    }
}

pub fn tle_to_elements(tle: &TwoLineElement) -> MeanElements {
    MeanElements::from_printed_units(
        tle.mean_motion_revday,
        tle.eccentricity,
        tle.inclination_deg,
        tle.raan_deg,
        tle.argp_deg,
        tle.mean_anomaly_deg,
        tle.bstar,
        tle.epoch_year,
        tle.epoch_day_int,
        tle.epoch_day_frac,
    )
}
