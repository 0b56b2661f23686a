//! The real scalar type that grid-valued data is generic over.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

use crate::Rational;

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    fn of_f64(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts")
    }

    fn of_usize(n: usize) -> Self {
        Self::of_f64(n as f64)
    }

    /// Nearest scalar to an exact rational.
    fn of_rational(r: &Rational) -> Self {
        Self::of_f64(crate::arith::rational_to_f64(r))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<S> {
    sum: S,
    carry: S,
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        Self { sum: S::zero(), carry: S::zero() }
    }

    pub fn add(&mut self, x: S) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum + self.carry
    }
}

impl<S: Scalar> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        let xs = [1.0e16_f64, 1.0, -1.0e16, 1.0];
        let acc: CompensatedSum<f64> = xs.iter().copied().collect();
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn rational_conversion_is_nearest() {
        let r = Rational::new(1.into(), 3.into());
        assert_eq!(f64::of_rational(&r), 1.0 / 3.0);
        assert_eq!(f32::of_rational(&r), 1.0_f32 / 3.0);
    }
}
