//! Grid-sampled real functions on a block spectrum and the elementary norms.
//!
//! An interval function at resolution `N` stores `N+1` samples at `k/N`
//! (endpoints included); a circle function stores `N` samples at phases `k/N`
//! with the sample at phase 1 identified with phase 0; a point function
//! stores one value. Between nodes evaluation is linear interpolation
//! (circularly for circles). All norms are taken over nodes.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{Coordinate, Space, SpectrumPoint};
use crate::system::Loc;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<S> {
    space: Space,
    resolution: usize,
    samples: Vec<S>,
}

impl<S: Scalar> GridFunction<S> {
    pub fn new(space: Space, resolution: usize, samples: Vec<S>) -> Result<Self> {
        if space != Space::Point && resolution < 2 {
            return Err(Error::InvalidParams(format!("grid resolution must be >= 2, got {resolution}")));
        }
        let want = space.sample_count(resolution);
        if samples.len() != want {
            return Err(Error::InvalidParams(format!(
                "{space} grid at resolution {resolution} needs {want} samples, got {}",
                samples.len()
            )));
        }
        Ok(Self { space, resolution, samples })
    }

    /// Sample `f` at the nodes; `f` receives the node coordinate (phase for
    /// circles, `0` for the point).
    pub fn from_fn(space: Space, resolution: usize, f: impl Fn(f64) -> S) -> Self {
        let samples = (0..space.sample_count(resolution)).map(|k| f(node(space, resolution, k))).collect();
        Self::new(space, resolution, samples).expect("sample count matches by construction")
    }

    pub fn constant(space: Space, resolution: usize, c: S) -> Self {
        Self::from_fn(space, resolution, |_| c)
    }

    pub fn zeros(space: Space, resolution: usize) -> Self {
        Self::constant(space, resolution, S::zero())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn samples(&self) -> &[S] {
        &self.samples
    }

    /// Coordinate of node `k`.
    pub fn node(&self, k: usize) -> f64 {
        node(self.space, self.resolution, k)
    }

    /// Value at a real coordinate (phase for circles).
    pub fn value_at(&self, x: f64) -> S {
        let n = self.resolution;
        match self.space {
            Space::Point => self.samples[0],
            Space::Interval => {
                let pos = x.clamp(0.0, 1.0) * n as f64;
                let i = (pos.floor() as usize).min(n);
                if i == n {
                    return self.samples[n];
                }
                self.lerp(i, i + 1, S::of_f64(pos - i as f64))
            }
            Space::Circle => {
                let pos = x.rem_euclid(1.0) * n as f64;
                let i = (pos.floor() as usize).min(n - 1);
                self.lerp(i, (i + 1) % n, S::of_f64(pos - i as f64))
            }
        }
    }

    /// Value at the exact coordinate `num/den`; lands exactly on a node
    /// whenever `den` divides `num * resolution`.
    pub fn value_at_ratio(&self, num: u64, den: u64) -> S {
        debug_assert!(den > 0);
        let n = self.resolution as u128;
        let (num, den) = (num as u128, den as u128);
        match self.space {
            Space::Point => self.samples[0],
            Space::Interval => {
                let scaled = num.min(den) * n;
                let i = (scaled / den) as usize;
                let rem = scaled % den;
                if rem == 0 {
                    return self.samples[i];
                }
                self.lerp(i, i + 1, S::of_f64(rem as f64 / den as f64))
            }
            Space::Circle => {
                let scaled = (num % den) * n;
                let i = (scaled / den) as usize;
                let rem = scaled % den;
                if rem == 0 {
                    return self.samples[i];
                }
                self.lerp(i, (i + 1) % self.resolution, S::of_f64(rem as f64 / den as f64))
            }
        }
    }

    pub fn value_at_loc(&self, loc: Loc) -> S {
        match loc {
            Loc::Ratio(num, den) => self.value_at_ratio(num, den),
            Loc::Real(x) => self.value_at(x),
        }
    }

    /// Value at a spectrum point of this function's space.
    pub fn value_at_point(&self, p: &SpectrumPoint) -> S {
        debug_assert_eq!(p.space(), self.space);
        match p.coordinate() {
            Coordinate::Exact(r) => match crate::arith::small_fraction(r) {
                Some((num, den)) => self.value_at_ratio(num, den),
                None => self.value_at(p.to_f64()),
            },
            Coordinate::Approx(x) => self.value_at(x.0),
        }
    }

    fn lerp(&self, i: usize, j: usize, w: S) -> S {
        self.samples[i] * (S::one() - w) + self.samples[j] * w
    }

    pub fn max(&self) -> S {
        self.samples.iter().copied().fold(S::neg_infinity(), S::max)
    }

    pub fn min(&self) -> S {
        self.samples.iter().copied().fold(S::infinity(), S::min)
    }

    /// `max f - min f` over nodes.
    pub fn oscillation(&self) -> S {
        self.max() - self.min()
    }

    /// Largest slope between adjacent nodes, in units of the coordinate.
    pub fn lipschitz_estimate(&self) -> S {
        let n = S::of_usize(self.resolution);
        let pairs = match self.space {
            Space::Point => 0,
            Space::Interval => self.resolution,
            Space::Circle => self.resolution,
        };
        (0..pairs)
            .map(|k| (self.samples[(k + 1) % self.samples.len()] - self.samples[k]).abs() * n)
            .fold(S::zero(), S::max)
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self { space: self.space, resolution: self.resolution, samples: self.samples.iter().map(|&x| f(x)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            space: self.space,
            resolution: self.resolution,
            samples: self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.resolution != other.resolution {
            return Err(Error::BlockMismatch(format!(
                "grid {}@{} vs {}@{}",
                self.space, self.resolution, other.space, other.resolution
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: S) -> Self {
        self.map(|x| x * c)
    }

    pub fn offset(&self, c: S) -> Self {
        self.map(|x| x + c)
    }

    /// Value at the basepoint (`t = 0`, `θ = 0`, or the point).
    pub fn basepoint_value(&self) -> S {
        self.samples[0]
    }

    pub fn sup_norm(&self) -> S {
        sup_norm(self)
    }

    pub fn midrange_seminorm(&self) -> S {
        midrange_seminorm(self)
    }
}

fn node(space: Space, resolution: usize, k: usize) -> f64 {
    match space {
        Space::Point => 0.0,
        Space::Interval | Space::Circle => k as f64 / resolution as f64,
    }
}

/// Max of `|f|` over the nodes.
pub fn sup_norm<S: Scalar>(f: &GridFunction<S>) -> S {
    f.samples.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
}

/// Half the oscillation, `(max f - min f) / 2`: the norm of the class of `f`
/// modulo all real constants.
pub fn midrange_seminorm<S: Scalar>(f: &GridFunction<S>) -> S {
    (f.max() - f.min()) / S::of_f64(2.0)
}

/// `inf { ‖f - c‖ : c ∈ step·ℤ }`. With `mid` the midrange and `half` the
/// midrange seminorm, `‖f - c‖ = half + |mid - c|`, so only the distance from
/// `mid` to the lattice matters.
pub fn lattice_quotient_seminorm<S: Scalar>(f: &GridFunction<S>, lattice_step: &Rational) -> S {
    let step = S::of_rational(lattice_step);
    assert!(step > S::zero(), "lattice step must be positive");
    let (hi, lo) = (f.max(), f.min());
    let two = S::of_f64(2.0);
    let half = (hi - lo) / two;
    let mid = (hi + lo) / two;
    let r = mid - (mid / step).floor() * step;
    half + r.min(step - r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;
    use std::f64::consts::TAU;

    fn ramp(n: usize) -> GridFunction<f64> {
        GridFunction::from_fn(Space::Interval, n, |t| t)
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(sup_norm(&GridFunction::<f64>::zeros(Space::Interval, 8)), 0.0);
        assert_eq!(sup_norm(&ramp(4)), 1.0);
        let s = GridFunction::from_fn(Space::Circle, 1024, |x| (TAU * x).sin());
        // dense re-sampling oracle
        let dense = (0..1_000_000).map(|k| s.value_at(k as f64 / 1e6).abs()).fold(0.0, f64::max);
        assert!((sup_norm(&s) - 1.0).abs() < 1e-4);
        assert!((sup_norm(&s) - dense).abs() < 1e-4);
    }

    #[test]
    fn midrange_examples() {
        assert_eq!(midrange_seminorm(&ramp(16)), 0.5);
        assert_eq!(midrange_seminorm(&GridFunction::constant(Space::Circle, 8, 3.25)), 0.0);
    }

    #[test]
    fn lattice_examples() {
        let half = GridFunction::constant(Space::Interval, 4, 0.5);
        assert_eq!(lattice_quotient_seminorm(&half, &rational(1, 1)), 0.5);
        assert_eq!(lattice_quotient_seminorm(&half, &rational(1, 2)), 0.0);
        let f = ramp(64);
        let step = 0.25;
        let brute = (-8..=8).map(|k| sup_norm(&f.offset(-(k as f64) * step))).fold(f64::INFINITY, f64::min);
        assert!((lattice_quotient_seminorm(&f, &rational(1, 4)) - brute).abs() < 1e-12);
    }

    #[test]
    fn ratio_evaluation_hits_nodes_exactly() {
        let f = GridFunction::from_fn(Space::Circle, 8, |x| (TAU * x).cos());
        assert_eq!(f.value_at_ratio(3, 8), f.samples()[3]);
        assert_eq!(f.value_at_ratio(11, 8), f.samples()[3]);
        assert_eq!(f.value_at_ratio(6, 16), f.samples()[3]);
        let g = ramp(4);
        assert!((g.value_at_ratio(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.value_at_ratio(1, 1), 1.0);
    }

    #[test]
    fn circle_interpolation_wraps() {
        let f = GridFunction::<f64>::new(Space::Circle, 4, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((f.value_at(0.875) - 1.5).abs() < 1e-12);
        assert!((f.value_at(-0.125) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_sample_count() {
        assert!(GridFunction::new(Space::Interval, 4, vec![0.0f64; 4]).is_err());
        assert!(GridFunction::new(Space::Circle, 1, vec![0.0f64; 1]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let f = GridFunction::<f32>::from_fn(Space::Interval, 16, |t| t as f32);
        assert_eq!(midrange_seminorm(&f), 0.5);
    }
}
