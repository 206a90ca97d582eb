//! Tropical (min, +) weights.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

/// A cost in the tropical semiring.
///
/// `plus` selects the cheaper of two costs and `times` adds them. The
/// infinite cost is the semiring zero (no path); `0.0` is the semiring one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight(f64);

impl Weight {
    pub const fn new(value: f64) -> Self {
        Weight(value)
    }

    pub const fn one() -> Self {
        Weight(0.0)
    }

    pub const fn zero() -> Self {
        Weight(f64::INFINITY)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_one(self) -> bool {
        self.0 == 0.0
    }

    pub fn plus(self, other: Weight) -> Weight {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn times(self, other: Weight) -> Weight {
        if self.is_zero() || other.is_zero() {
            Weight::zero()
        } else {
            Weight(self.0 + other.0)
        }
    }

    /// Total order used by the search routines (NaN never occurs in practice).
    pub fn total_cmp(&self, other: &Weight) -> Ordering {
        self.0.total_cmp(&other.0)
    }

    /// Equality up to a small tolerance; sums of costs are accumulated in
    /// different orders by different algorithms.
    pub fn approx_eq(self, other: Weight, eps: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        (self.0 - other.0).abs() <= eps
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::one()
    }
}

impl From<f64> for Weight {
    fn from(v: f64) -> Self {
        Weight(v)
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        self.times(rhs)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        *self = self.times(rhs);
    }
}

/// Prints with at least one decimal, trailing zeros trimmed, `inf` for zero.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("inf");
        }
        let mut s = format!("{:.6}", self.0);
        while s.ends_with('0') && !s.ends_with(".0") {
            s.pop();
        }
        if s == "-0.0" {
            s = "0.0".to_string();
        }
        f.write_str(&s)
    }
}

impl std::str::FromStr for Weight {
    type Err = std::num::ParseFloatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "Infinity" {
            return Ok(Weight::zero());
        }
        s.parse::<f64>().map(Weight)
    }
}
