//! Spectra of the building blocks and points on them.

use std::fmt;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::arith::{frac, rational_to_f64, rational_to_string};
use crate::Rational;

/// Spectrum of a building block. Intervals are parameterized over `[0,1]`,
/// circles by the phase `θ ∈ [0,1)` with `z = e^{2πiθ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Point,
    Interval,
    Circle,
}

impl Space {
    /// Number of stored samples for a grid of the given resolution.
    pub fn sample_count(self, resolution: usize) -> usize {
        match self {
            Space::Point => 1,
            Space::Interval => resolution + 1,
            Space::Circle => resolution,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Point => "pt",
            Space::Interval => "[0,1]",
            Space::Circle => "S1",
        })
    }
}

/// Coordinate of a spectrum point: exact whenever it comes out of a
/// construction, approximate only when a caller supplies a float.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    Exact(Rational),
    Approx(OrderedFloat<f64>),
}

impl Coordinate {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coordinate::Exact(r) => rational_to_f64(r),
            Coordinate::Approx(x) => x.0,
        }
    }
}

/// A point of a block spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectrumPoint {
    space: Space,
    coord: Coordinate,
}

impl SpectrumPoint {
    pub fn point() -> Self {
        Self { space: Space::Point, coord: Coordinate::Exact(Rational::from_integer(0.into())) }
    }

    /// Exact interval point; `None` outside `[0,1]`.
    pub fn interval(t: Rational) -> Option<Self> {
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        (t >= zero && t <= one).then_some(Self { space: Space::Interval, coord: Coordinate::Exact(t) })
    }

    /// Exact circle point with phase reduced mod 1.
    pub fn circle(theta: Rational) -> Self {
        Self { space: Space::Circle, coord: Coordinate::Exact(frac(&theta)) }
    }

    pub fn interval_approx(t: f64) -> Option<Self> {
        (0.0..=1.0).contains(&t).then_some(Self { space: Space::Interval, coord: Coordinate::Approx(OrderedFloat(t)) })
    }

    pub fn circle_approx(theta: f64) -> Self {
        Self { space: Space::Circle, coord: Coordinate::Approx(OrderedFloat(theta.rem_euclid(1.0))) }
    }

    /// Exact point of `space` at `coord` (phase for circles).
    pub fn exact(space: Space, coord: Rational) -> Option<Self> {
        match space {
            Space::Point => Some(Self::point()),
            Space::Interval => Self::interval(coord),
            Space::Circle => Some(Self::circle(coord)),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coordinate(&self) -> &Coordinate {
        &self.coord
    }

    pub fn exact_coordinate(&self) -> Option<&Rational> {
        match &self.coord {
            Coordinate::Exact(r) => Some(r),
            Coordinate::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.coord.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coord, Coordinate::Exact(_))
    }

    /// String form used in serialized output: `"num/den"` or a decimal.
    pub fn coordinate_string(&self) -> String {
        match &self.coord {
            Coordinate::Exact(r) => rational_to_string(r),
            Coordinate::Approx(x) => format!("{}", x.0),
        }
    }
}

impl fmt::Display for SpectrumPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.space {
            Space::Point => f.write_str("pt"),
            Space::Interval => write!(f, "t={}", self.coordinate_string()),
            Space::Circle => write!(f, "exp(2πi·{})", self.coordinate_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    #[test]
    fn circle_phase_is_reduced() {
        let p = SpectrumPoint::circle(rational(7, 3));
        assert_eq!(p.exact_coordinate(), Some(&rational(1, 3)));
        assert_eq!(SpectrumPoint::circle_approx(-0.25).to_f64(), 0.75);
    }

    #[test]
    fn interval_rejects_outside() {
        assert!(SpectrumPoint::interval(rational(3, 2)).is_none());
        assert!(SpectrumPoint::interval(rational(1, 1)).is_some());
        assert!(SpectrumPoint::interval_approx(-0.1).is_none());
    }

    #[test]
    fn sample_counts() {
        assert_eq!(Space::Interval.sample_count(4), 5);
        assert_eq!(Space::Circle.sample_count(4), 4);
        assert_eq!(Space::Point.sample_count(4), 1);
    }
}
