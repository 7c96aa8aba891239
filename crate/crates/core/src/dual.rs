//! Forward-mode dual numbers carrying `K` tangent directions at once.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<const K: usize> {
    pub value: f64,
    pub tangents: [f64; K],
}

impl<const K: usize> Dual<K> {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            tangents: [0.0; K],
        }
    }

    /// Independent variable seeded along direction `index`.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut tangents = [0.0; K];
        tangents[index] = 1.0;
        Self { value, tangents }
    }

    /// Applies the chain rule for a unary map with derivative `slope` at `self`.
    #[inline(always)]
    fn chain(self, value: f64, slope: f64) -> Self {
        let mut tangents = self.tangents;
        for t in &mut tangents {
            *t *= slope;
        }
        Self { value, tangents }
    }
}

impl<const K: usize> PartialOrd for Dual<K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl<const K: usize> Add for Dual<K> {
    type Output = Self;
    #[inline(always)]
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.tangents.iter_mut().zip(rhs.tangents) {
            *a += b;
        }
        self
    }
}

impl<const K: usize> Sub for Dual<K> {
    type Output = Self;
    #[inline(always)]
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.tangents.iter_mut().zip(rhs.tangents) {
            *a -= b;
        }
        self
    }
}

impl<const K: usize> Mul for Dual<K> {
    type Output = Self;
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        let mut tangents = [0.0; K];
        for (k, t) in tangents.iter_mut().enumerate() {
            *t = self.tangents[k] * rhs.value + self.value * rhs.tangents[k];
        }
        Self {
            value: self.value * rhs.value,
            tangents,
        }
    }
}

impl<const K: usize> Div for Dual<K> {
    type Output = Self;
    #[inline(always)]
    fn div(self, rhs: Self) -> Self {
        let value = self.value / rhs.value;
        let mut tangents = [0.0; K];
        for (k, t) in tangents.iter_mut().enumerate() {
            *t = (self.tangents[k] - value * rhs.tangents[k]) / rhs.value;
        }
        Self { value, tangents }
    }
}

impl<const K: usize> Neg for Dual<K> {
    type Output = Self;
    #[inline(always)]
    fn neg(self) -> Self {
        self.chain(-self.value, -1.0)
    }
}

impl<const K: usize> Real for Dual<K> {
    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        Self::constant(x)
    }

    #[inline(always)]
    fn value(self) -> f64 {
        self.value
    }

    fn sqrt(self) -> Self {
        let root = self.value.sqrt();
        self.chain(root, 0.5 / root)
    }

    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    fn atan2(self, x: Self) -> Self {
        let denom = self.value * self.value + x.value * x.value;
        let mut tangents = [0.0; K];
        for (k, t) in tangents.iter_mut().enumerate() {
            *t = (x.value * self.tangents[k] - self.value * x.tangents[k]) / denom;
        }
        Self {
            value: self.value.atan2(x.value),
            tangents,
        }
    }

    fn powf(self, exponent: f64) -> Self {
        let value = self.value.powf(exponent);
        self.chain(value, exponent * self.value.powf(exponent - 1.0))
    }

    fn abs(self) -> Self {
        if self.value < 0.0 {
            -self
        } else {
            self
        }
    }

    fn fmod(self, modulus: f64) -> Self {
        Self {
            value: self.value % modulus,
            tangents: self.tangents,
        }
    }
}
