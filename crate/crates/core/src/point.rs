//! Coordinates in the `(m, x)` plane.

use std::fmt;

use thiserror::Error;

/// Lower edge of the working `m` range used for fitting and evaluation.
pub const M_MIN: f64 = -4.0;
/// Upper edge of the working `m` range.
pub const M_MAX: f64 = 4.0;
/// Lower edge of the working `x` range.
pub const X_MIN: f64 = 4.0;
/// Upper edge of the working `x` range.
pub const X_MAX: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid point (m = {m}, x = {x}): {reason}")]
pub struct PointError {
    pub m: f64,
    pub x: f64,
    pub reason: &'static str,
}

/// A point `(m, x)`: `m` is the exponent of the power-law frequency factor
/// `A·T^m`, `x = E/RT` the reduced activation energy.
///
/// `x` is always strictly positive and both coordinates are finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    m: f64,
    x: f64,
}

impl EvalPoint {
    pub fn new(m: f64, x: f64) -> Result<Self, PointError> {
        if !m.is_finite() {
            return Err(PointError { m, x, reason: "m must be finite" });
        }
        if !x.is_finite() || x <= 0.0 {
            return Err(PointError { m, x, reason: "x must be finite and strictly positive" });
        }
        Ok(Self { m, x })
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    /// True inside `[-4, 4] × [4, 100]`.
    pub fn in_working_domain(&self) -> bool {
        (M_MIN..=M_MAX).contains(&self.m) && (X_MIN..=X_MAX).contains(&self.x)
    }

    /// Natural log of the analytic prefactor `e^(-x) / x^(m+2)`.
    #[inline]
    pub fn ln_prefactor(&self) -> f64 {
        -self.x - (self.m + 2.0) * self.x.ln()
    }

    /// The prefactor `e^(-x) / x^(m+2)`, computed in log space.
    #[inline]
    pub fn prefactor(&self) -> f64 {
        self.ln_prefactor().exp()
    }
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m = {}, x = {})", self.m, self.x)
    }
}
