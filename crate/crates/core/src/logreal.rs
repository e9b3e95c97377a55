//! Nonnegative reals stored by their natural logarithm.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// Values below this are never materialized in the linear domain.
pub const MATERIALIZE_FLOOR: f64 = 1e-300;

/// A nonnegative real `x` held as `ln x`; zero is `ln x = -inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    /// Wraps a natural logarithm. NaN is rejected by debug assertion.
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "LogReal from NaN");
        LogReal(ln)
    }

    /// Converts a nonnegative linear value.
    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0, "LogReal from negative value {x}");
        LogReal(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Linear value, or `None` when it would fall below [`MATERIALIZE_FLOOR`].
    pub fn try_value(self) -> Option<f64> {
        let v = self.0.exp();
        (v >= MATERIALIZE_FLOOR).then_some(v)
    }

    /// Linear value with values under the floor flushed to zero.
    pub fn value(self) -> f64 {
        self.try_value().unwrap_or(0.0)
    }

    pub fn sqrt(self) -> Self {
        LogReal(0.5 * self.0)
    }

    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogReal(p * self.0)
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        LogReal(self.0 + rhs.0)
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        LogReal(self.0 - rhs.0)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

/// `ln(sum_i exp(x_i))` without overflow or underflow.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(logs: I) -> f64 {
    let logs: Vec<f64> = logs.into_iter().collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_infinite() {
        return max;
    }
    let mut acc = crate::sum::NeumaierSum::default();
    for &l in &logs {
        acc += (l - max).exp();
    }
    max + acc.sum().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_one() {
        assert!(LogReal::ZERO.is_zero());
        assert_eq!(LogReal::ZERO.value(), 0.0);
        assert_eq!(LogReal::ONE.value(), 1.0);
        assert_eq!(LogReal::ZERO.sqrt(), LogReal::ZERO);
    }

    #[test]
    fn underflow_is_not_materialized() {
        let tiny = LogReal::from_ln(-800.0);
        assert_eq!(tiny.try_value(), None);
        assert_eq!(tiny.value(), 0.0);
        let small = LogReal::from_ln(-600.0);
        assert!(small.try_value().is_some());
    }

    #[test]
    fn products_add_logs() {
        let a = LogReal::from_value(0.25);
        let b = LogReal::from_value(8.0);
        assert!(((a * b).value() - 2.0).abs() < 1e-15);
        assert!(((b / a).value() - 32.0).abs() < 1e-13);
        assert!(a < b);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        let v = log_sum_exp([-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp([0.0, f64::NEG_INFINITY]);
        assert_eq!(v, 0.0);
    }
}
