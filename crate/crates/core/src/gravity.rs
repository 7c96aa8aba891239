/// Geopotential constants in the canonical units of the theory
/// (Earth radii, minutes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityModel {
    /// km³/s²
    pub mu: f64,
    pub radius_earth_km: f64,
    /// √(GM) in Earth radii^1.5 per minute.
    pub xke: f64,
    /// Minutes per canonical time unit, `1 / xke`.
    pub tumin: f64,
    pub j2: f64,
    pub j3: f64,
    pub j4: f64,
    pub j3oj2: f64,
}

impl GravityModel {
    /// Derives `xke`, `tumin` and `j3oj2` from the primary constants.
    pub fn new(mu: f64, radius_earth_km: f64, j2: f64, j3: f64, j4: f64) -> Self {
        let xke = 60.0 / (radius_earth_km * radius_earth_km * radius_earth_km / mu).sqrt();
        Self {
            mu,
            radius_earth_km,
            xke,
            tumin: 1.0 / xke,
            j2,
            j3,
            j4,
            j3oj2: j3 / j2,
        }
    }

    pub fn wgs72() -> Self {
        Self::new(398600.8, 6378.135, 0.001082616, -0.00000253881, -0.00000165597)
    }

    /// Earth radii per minute → km/s.
    pub fn velocity_scale(&self) -> f64 {
        self.radius_earth_km * self.xke / 60.0
    }
}

impl Default for GravityModel {
    fn default() -> Self {
        Self::wgs72()
    }
}
