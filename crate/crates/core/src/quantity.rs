//! Dimension-checked physical scalars.
//!
//! Every public quantity in this crate is a [`PhysQuantity`]: an `f64` value
//! paired with an integer exponent vector over the four SI base dimensions
//! this domain needs (metre, kilogram, second, kelvin). Multiplication and
//! division combine exponent vectors; addition, subtraction and comparison
//! are only defined between quantities of equal dimension. A quantity whose
//! exponent vector is all zero is dimensionless and can be compared with and
//! extracted to a plain `f64`.

use std::fmt;
use std::ops::{Div, Mul, Neg};

use thiserror::Error;

/// Exponent vector over (m, kg, s, K).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Dim {
    pub length: i8,
    pub mass: i8,
    pub time: i8,
    pub temperature: i8,
}

impl Dim {
    pub const NONE: Dim = Dim::new(0, 0, 0, 0);
    pub const LENGTH: Dim = Dim::new(1, 0, 0, 0);
    pub const MASS: Dim = Dim::new(0, 1, 0, 0);
    pub const TIME: Dim = Dim::new(0, 0, 1, 0);
    pub const TEMPERATURE: Dim = Dim::new(0, 0, 0, 1);
    pub const FREQUENCY: Dim = Dim::new(0, 0, -1, 0);
    pub const VELOCITY: Dim = Dim::new(1, 0, -1, 0);
    pub const ACCELERATION: Dim = Dim::new(1, 0, -2, 0);
    pub const AREA: Dim = Dim::new(2, 0, 0, 0);
    pub const ENERGY: Dim = Dim::new(2, 1, -2, 0);
    pub const ACTION: Dim = Dim::new(2, 1, -1, 0);
    /// Strain spectral density, 1/Hz = s.
    pub const SPECTRAL_DENSITY: Dim = Dim::TIME;
    /// Displacement spectral density, m^2/Hz = m^2 s.
    pub const DISPLACEMENT_SPECTRAL_DENSITY: Dim = Dim::new(2, 0, 1, 0);
    /// Momentum diffusion coefficient, kg^2 m^2 / s^3.
    pub const MOMENTUM_DIFFUSION: Dim = Dim::new(2, 2, -3, 0);
    /// Squared momentum, kg^2 m^2 / s^2.
    pub const MOMENTUM_SQUARED: Dim = Dim::new(2, 2, -2, 0);

    pub const fn new(length: i8, mass: i8, time: i8, temperature: i8) -> Self {
        Dim { length, mass, time, temperature }
    }

    pub const fn combine(self, other: Dim) -> Dim {
        Dim::new(
            self.length + other.length,
            self.mass + other.mass,
            self.time + other.time,
            self.temperature + other.temperature,
        )
    }

    pub const fn inverse(self) -> Dim {
        Dim::new(-self.length, -self.mass, -self.time, -self.temperature)
    }

    pub fn pow(self, n: i32) -> Dim {
        let n = n as i8;
        Dim::new(self.length * n, self.mass * n, self.time * n, self.temperature * n)
    }

    pub const fn is_none(self) -> bool {
        self.length == 0 && self.mass == 0 && self.time == 0 && self.temperature == 0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_none() {
            return write!(f, "dimensionless");
        }
        let mut parts = Vec::new();
        for (symbol, exp) in [
            ("m", self.length),
            ("kg", self.mass),
            ("s", self.time),
            ("K", self.temperature),
        ] {
            match exp {
                0 => {}
                1 => parts.push(symbol.to_string()),
                e => parts.push(format!("{symbol}^{e}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Mismatch { context: &'static str, expected: Dim, found: Dim },
    #[error("square root of odd dimension exponents ({dim})")]
    OddSqrt { dim: Dim },
}

/// A value with an SI dimension vector.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PhysQuantity {
    value: f64,
    dim: Dim,
}

impl PhysQuantity {
    pub const fn new(value: f64, dim: Dim) -> Self {
        PhysQuantity { value, dim }
    }

    pub const fn dimensionless(value: f64) -> Self {
        PhysQuantity::new(value, Dim::NONE)
    }

    pub const fn meters(value: f64) -> Self {
        PhysQuantity::new(value, Dim::LENGTH)
    }

    pub const fn kilograms(value: f64) -> Self {
        PhysQuantity::new(value, Dim::MASS)
    }

    pub const fn seconds(value: f64) -> Self {
        PhysQuantity::new(value, Dim::TIME)
    }

    pub const fn kelvins(value: f64) -> Self {
        PhysQuantity::new(value, Dim::TEMPERATURE)
    }

    pub const fn per_second(value: f64) -> Self {
        PhysQuantity::new(value, Dim::FREQUENCY)
    }

    pub const fn meters_per_second(value: f64) -> Self {
        PhysQuantity::new(value, Dim::VELOCITY)
    }

    /// Strain spectral density in 1/Hz.
    pub const fn per_hertz(value: f64) -> Self {
        PhysQuantity::new(value, Dim::SPECTRAL_DENSITY)
    }

    pub const fn value(self) -> f64 {
        self.value
    }

    pub const fn dim(self) -> Dim {
        self.dim
    }

    pub const fn is_dimensionless(self) -> bool {
        self.dim.is_none()
    }

    /// Checks that the quantity carries `expected` and returns the bare value.
    pub fn expect_dim(self, expected: Dim, context: &'static str) -> Result<f64, DimensionError> {
        if self.dim == expected {
            Ok(self.value)
        } else {
            Err(DimensionError::Mismatch { context, expected, found: self.dim })
        }
    }

    pub fn as_dimensionless(self) -> Result<f64, DimensionError> {
        self.expect_dim(Dim::NONE, "dimensionless extraction")
    }

    pub fn try_add(self, other: PhysQuantity) -> Result<PhysQuantity, DimensionError> {
        if self.dim == other.dim {
            Ok(PhysQuantity::new(self.value + other.value, self.dim))
        } else {
            Err(DimensionError::Mismatch { context: "addition", expected: self.dim, found: other.dim })
        }
    }

    pub fn try_sub(self, other: PhysQuantity) -> Result<PhysQuantity, DimensionError> {
        if self.dim == other.dim {
            Ok(PhysQuantity::new(self.value - other.value, self.dim))
        } else {
            Err(DimensionError::Mismatch { context: "subtraction", expected: self.dim, found: other.dim })
        }
    }

    pub fn powi(self, n: i32) -> PhysQuantity {
        PhysQuantity::new(self.value.powi(n), self.dim.pow(n))
    }

    pub fn sqrt(self) -> Result<PhysQuantity, DimensionError> {
        let d = self.dim;
        if d.length % 2 != 0 || d.mass % 2 != 0 || d.time % 2 != 0 || d.temperature % 2 != 0 {
            return Err(DimensionError::OddSqrt { dim: d });
        }
        let half = Dim::new(d.length / 2, d.mass / 2, d.time / 2, d.temperature / 2);
        Ok(PhysQuantity::new(self.value.sqrt(), half))
    }

    pub fn recip(self) -> PhysQuantity {
        PhysQuantity::new(1.0 / self.value, self.dim.inverse())
    }

    pub fn abs(self) -> PhysQuantity {
        PhysQuantity::new(self.value.abs(), self.dim)
    }

    /// Relative difference |a-b|/|b| between same-dimension quantities.
    pub fn rel_diff(self, other: PhysQuantity) -> Result<f64, DimensionError> {
        let delta = self.try_sub(other)?;
        Ok((delta.value / other.value).abs())
    }
}

impl Mul for PhysQuantity {
    type Output = PhysQuantity;
    fn mul(self, rhs: PhysQuantity) -> PhysQuantity {
        PhysQuantity::new(self.value * rhs.value, self.dim.combine(rhs.dim))
    }
}

impl Div for PhysQuantity {
    type Output = PhysQuantity;
    fn div(self, rhs: PhysQuantity) -> PhysQuantity {
        PhysQuantity::new(self.value / rhs.value, self.dim.combine(rhs.dim.inverse()))
    }
}

impl Mul<f64> for PhysQuantity {
    type Output = PhysQuantity;
    fn mul(self, rhs: f64) -> PhysQuantity {
        PhysQuantity::new(self.value * rhs, self.dim)
    }
}

impl Mul<PhysQuantity> for f64 {
    type Output = PhysQuantity;
    fn mul(self, rhs: PhysQuantity) -> PhysQuantity {
        PhysQuantity::new(self * rhs.value, rhs.dim)
    }
}

impl Div<f64> for PhysQuantity {
    type Output = PhysQuantity;
    fn div(self, rhs: f64) -> PhysQuantity {
        PhysQuantity::new(self.value / rhs, self.dim)
    }
}

impl Neg for PhysQuantity {
    type Output = PhysQuantity;
    fn neg(self) -> PhysQuantity {
        PhysQuantity::new(-self.value, self.dim)
    }
}

/// Dimensionless quantities compare against plain reals; anything else is
/// simply unequal/unordered.
impl PartialEq<f64> for PhysQuantity {
    fn eq(&self, other: &f64) -> bool {
        self.dim.is_none() && self.value == *other
    }
}

impl PartialOrd<f64> for PhysQuantity {
    fn partial_cmp(&self, other: &f64) -> Option<std::cmp::Ordering> {
        if self.dim.is_none() {
            self.value.partial_cmp(other)
        } else {
            None
        }
    }
}

impl PartialOrd for PhysQuantity {
    fn partial_cmp(&self, other: &PhysQuantity) -> Option<std::cmp::Ordering> {
        if self.dim == other.dim {
            self.value.partial_cmp(&other.value)
        } else {
            None
        }
    }
}

impl fmt::Display for PhysQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim.is_none() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} {}", self.value, self.dim)
        }
    }
}
