//! Batch-parallel SGP4 near-Earth propagation.
//!
//! The pipeline is TLE text → [`TwoLineElement`] → [`MeanElements`] →
//! [`SatInit`] → [`StateVector`]. The kernel is generic over [`Real`], so the
//! same source runs at `f32`, `f64`, and on [`Dual`] numbers for Jacobians.
//!
//! Anomalous inputs never panic inside the kernel. They are reported through
//! [`ErrorCode`] on each output cell and the computed values are retained.
//!
//! ```
//! use sgp4_batch::{parse_tle, tle_to_elements, sgp4_init, sgp4_propagate, GravityModel, ParseMode};
//!
//! let tle = parse_tle(
//!     "1 00005U 58002B   00179.78495062  .00000023  00000-0  28098-4 0  4753",
//!     "2 00005  34.2682 348.7242 1859667 331.7664  19.3264 10.82419157413667",
//!     ParseMode::Strict,
//! ).unwrap();
//! let elems = tle_to_elements(&tle);
//! let sat = sgp4_init(&elems.to_kernel::<f64>(), &GravityModel::wgs72());
//! let state = sgp4_propagate(&sat, 0.0);
//! assert!(state.error_code.is_ok());
//! assert!((state.r[0] - 7022.465292664065).abs() < 1e-6);
//! ```

pub mod batch;
pub mod bench;
pub mod dual;
pub mod elements;
pub mod epoch;
pub mod gravity;
pub mod jacobian;
pub mod kernel;
pub mod omm;
pub mod precision;
pub mod real;
pub mod tle;

pub use batch::{
    partition_work, AnyBatchResult, BatchEngine, BatchResult, CapacityError, SatBatch,
    StreamError, StreamSummary, Tile,
};
pub use dual::Dual;
pub use elements::{tle_to_elements, Elements, MeanElements};
pub use epoch::{epoch_to_julian, Epoch, EpochError};
pub use gravity::GravityModel;
pub use jacobian::{column_relative_error, finite_difference_jacobian, jacobian_state_wrt_elements, StateJacobian};
pub use kernel::{solve_kepler, sgp4_init, sgp4_propagate, Branches, ErrorCode, SatInit, StateVector};
pub use omm::{parse_omm_kvp, OmmError};
pub use real::{select, Float, Real};
pub use tle::{checksum, decode_alpha5, parse_catalogue, parse_tle, ParseMode, TleError, TleRecord, TwoLineElement};

/// Floating-point width of a propagation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub const fn bits(self) -> u32 {
        match self {
            Precision::Single => 32,
            Precision::Double => 64,
        }
    }

    pub const fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            32 => Some(Precision::Single),
            64 => Some(Precision::Double),
            _ => None,
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.bits())
    }
}
