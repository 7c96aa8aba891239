//! Scalar abstraction shared by the propagation kernel.
//!
//! The kernel is written once against [`Real`] and instantiated at `f32`,
//! `f64` and [`Dual`](crate::dual::Dual). Comparisons used for control flow
//! always look at the primal value only.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::Precision;

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Primal value widened to `f64`.
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    /// `self` raised to a constant exponent.
    fn powf(self, exponent: f64) -> Self;
    fn abs(self) -> Self;
    /// Truncated remainder with the sign of `self` (C `fmod`).
    fn fmod(self, modulus: f64) -> Self;

    #[inline(always)]
    fn is_finite(self) -> bool {
        self.value().is_finite()
    }
}

/// Picks `on_true` or `on_false` after both have been evaluated.
///
/// Callers must make sure the discarded operand was computed from guarded
/// inputs, so neither side can trap or produce values that leak.
#[inline(always)]
pub fn select<T: Copy>(cond: bool, on_true: T, on_false: T) -> T {
    if cond {
        on_true
    } else {
        on_false
    }
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Real for $t {
            #[inline(always)]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline(always)]
            fn value(self) -> f64 {
                self as f64
            }
            #[inline(always)]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline(always)]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline(always)]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline(always)]
            fn atan2(self, x: Self) -> Self {
                <$t>::atan2(self, x)
            }
            #[inline(always)]
            fn powf(self, exponent: f64) -> Self {
                <$t>::powf(self, exponent as $t)
            }
            #[inline(always)]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline(always)]
            fn fmod(self, modulus: f64) -> Self {
                self % (modulus as $t)
            }
        }
    };
}

impl_real_float!(f32);
impl_real_float!(f64);

/// Machine floating-point types that can back a batch grid or a binary dump.
pub trait Float: Real + Default {
    const PRECISION: Precision;
    const BYTES: usize;

    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Float for f32 {
    const PRECISION: Precision = Precision::Single;
    const BYTES: usize = 4;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().expect("4 bytes"))
    }
}

impl Float for f64 {
    const PRECISION: Precision = Precision::Double;
    const BYTES: usize = 8;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
    }
}
