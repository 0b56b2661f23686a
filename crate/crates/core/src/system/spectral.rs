//! Spectral maps and run-length compressed eigenvalue patterns.
//!
//! A pattern lists the maps `λ : X_target → X_source` whose diagonal
//! `diag(f∘λ₁, f∘λ₂, …)` is a partial homomorphism. Repeated maps are stored
//! once with a multiplicity, and an arithmetic progression of constant points
//! (the roots of unity `e^{2πij/l}`) is stored as one entry; the patterns of
//! late steps have millions of entries otherwise.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{frac, rational_to_string, small_fraction};
use crate::space::{Coordinate, Space, SpectrumPoint};
use crate::Rational;

/// Position in a source spectrum: exact `num/den` (phase for circles) when
/// it fits machine integers, otherwise a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Loc {
    Ratio(u64, u64),
    Real(f64),
}

impl Loc {
    pub fn of_point(p: &SpectrumPoint) -> Loc {
        match p.coordinate() {
            Coordinate::Exact(r) => small_fraction(r).map_or_else(|| Loc::Real(p.to_f64()), |(a, b)| Loc::Ratio(a, b)),
            Coordinate::Approx(x) => Loc::Real(x.0),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Loc::Ratio(a, b) => a as f64 / b as f64,
            Loc::Real(x) => x,
        }
    }
}

/// One diagonal entry of a partial homomorphism, as a map from the target
/// block's spectrum into the source block's spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpectralMap {
    /// Constant map onto a point of the source spectrum; legal for any target.
    Const(SpectrumPoint),
    /// `[0,1] → [0,1]`, `t ↦ t`.
    IdentityInterval,
    /// `S¹ → S¹`, `z ↦ z^w`.
    CircleWinding(BigInt),
    /// `[0,1] → S¹`, `t ↦ e^{2πiwt}`.
    ExpWinding(BigInt),
}

impl SpectralMap {
    pub fn circle_winding(w: i64) -> Self {
        SpectralMap::CircleWinding(BigInt::from(w))
    }

    pub fn exp_winding(w: i64) -> Self {
        SpectralMap::ExpWinding(BigInt::from(w))
    }

    /// Required target space, `None` when any target is allowed.
    pub fn domain(&self) -> Option<Space> {
        match self {
            SpectralMap::Const(_) => None,
            SpectralMap::IdentityInterval | SpectralMap::ExpWinding(_) => Some(Space::Interval),
            SpectralMap::CircleWinding(_) => Some(Space::Circle),
        }
    }

    /// Source space the map lands in.
    pub fn codomain(&self) -> Space {
        match self {
            SpectralMap::Const(p) => p.space(),
            SpectralMap::IdentityInterval => Space::Interval,
            SpectralMap::CircleWinding(_) | SpectralMap::ExpWinding(_) => Space::Circle,
        }
    }

    /// Multiplier `c` of a coordinate-linear map `x ↦ c·x` (mod 1 on circles).
    pub fn linear_factor(&self) -> Option<BigInt> {
        match self {
            SpectralMap::Const(_) => None,
            SpectralMap::IdentityInterval => Some(BigInt::one()),
            SpectralMap::CircleWinding(w) | SpectralMap::ExpWinding(w) => Some(w.clone()),
        }
    }

    /// Image of an exact coordinate.
    pub fn apply_exact(&self, x: &Rational) -> Rational {
        match self {
            SpectralMap::Const(p) => {
                p.exact_coordinate().cloned().unwrap_or_else(|| crate::arith::rational_from_f64(p.to_f64()))
            }
            SpectralMap::IdentityInterval => x.clone(),
            SpectralMap::CircleWinding(w) | SpectralMap::ExpWinding(w) => {
                frac(&(x * Rational::from_integer(w.clone())))
            }
        }
    }

    pub fn apply_point(&self, p: &SpectrumPoint) -> SpectrumPoint {
        match self {
            SpectralMap::Const(q) => q.clone(),
            SpectralMap::IdentityInterval => p.clone(),
            SpectralMap::CircleWinding(w) | SpectralMap::ExpWinding(w) => match p.coordinate() {
                Coordinate::Exact(r) => SpectrumPoint::circle(r * Rational::from_integer(w.clone())),
                Coordinate::Approx(x) => SpectrumPoint::circle_approx(w.to_f64().unwrap_or(f64::NAN) * x.0),
            },
        }
    }

    /// Source location of the target node `k/n`.
    pub fn locate(&self, k: usize, n: usize) -> Loc {
        match self {
            SpectralMap::Const(p) => Loc::of_point(p),
            SpectralMap::IdentityInterval => Loc::Ratio(k as u64, n as u64),
            SpectralMap::CircleWinding(w) | SpectralMap::ExpWinding(w) => {
                let wm = crate::arith::big_mod_u64(w, n as u64) as u128;
                Loc::Ratio(((wm * k as u128) % n as u128) as u64, n as u64)
            }
        }
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn after(&self, inner: &SpectralMap) -> SpectralMap {
        match (self, inner) {
            (SpectralMap::Const(p), _) => SpectralMap::Const(p.clone()),
            (outer, SpectralMap::Const(q)) => SpectralMap::Const(outer.apply_point(q)),
            (SpectralMap::IdentityInterval, inner) => inner.clone(),
            (outer, SpectralMap::IdentityInterval) => outer.clone(),
            (SpectralMap::CircleWinding(v), SpectralMap::CircleWinding(w)) => SpectralMap::CircleWinding(v * w),
            (SpectralMap::CircleWinding(v), SpectralMap::ExpWinding(w)) => SpectralMap::ExpWinding(v * w),
            (SpectralMap::ExpWinding(_), _) => unreachable!("ExpWinding needs an interval-valued inner map"),
        }
    }
}

impl fmt::Display for SpectralMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralMap::Const(p) => write!(f, "const({p})"),
            SpectralMap::IdentityInterval => f.write_str("t"),
            SpectralMap::CircleWinding(w) => write!(f, "z^{w}"),
            SpectralMap::ExpWinding(w) => write!(f, "exp(2πi·{w}t)"),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MapRepr {
    Const { space: Space, point: String },
    Identity,
    CircleWinding { winding: String },
    ExpWinding { winding: String },
}

impl Serialize for SpectralMap {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        match self {
            SpectralMap::Const(p) => MapRepr::Const { space: p.space(), point: p.coordinate_string() },
            SpectralMap::IdentityInterval => MapRepr::Identity,
            SpectralMap::CircleWinding(w) => MapRepr::CircleWinding { winding: w.to_string() },
            SpectralMap::ExpWinding(w) => MapRepr::ExpWinding { winding: w.to_string() },
        }
        .serialize(s)
    }
}

/// A run of identical entries, or an arithmetic progression of constant
/// points `start + r·step` (`r = 0..count`, reduced mod 1 on circles), each
/// repeated `mult` times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternEntry {
    Map { map: SpectralMap, mult: BigUint },
    Progression { space: Space, start: Rational, step: Rational, count: u64, mult: BigUint },
}

impl PatternEntry {
    pub fn single(map: SpectralMap) -> Self {
        PatternEntry::Map { map, mult: BigUint::one() }
    }

    pub fn repeated(map: SpectralMap, mult: impl Into<BigUint>) -> Self {
        PatternEntry::Map { map, mult: mult.into() }
    }

    pub fn progression(space: Space, start: Rational, step: Rational, count: u64) -> Self {
        let (start, step) = match space {
            Space::Circle => (frac(&start), frac(&step)),
            _ => (start, step),
        };
        PatternEntry::Progression { space, start, step, count, mult: BigUint::one() }
    }

    /// Number of diagonal entries this run stands for.
    pub fn multiplicity(&self) -> BigUint {
        match self {
            PatternEntry::Map { mult, .. } => mult.clone(),
            PatternEntry::Progression { count, mult, .. } => mult * BigUint::from(*count),
        }
    }

    pub fn mult(&self) -> &BigUint {
        match self {
            PatternEntry::Map { mult, .. } | PatternEntry::Progression { mult, .. } => mult,
        }
    }

    pub fn codomain(&self) -> Space {
        match self {
            PatternEntry::Map { map, .. } => map.codomain(),
            PatternEntry::Progression { space, .. } => *space,
        }
    }

    pub fn domain(&self) -> Option<Space> {
        match self {
            PatternEntry::Map { map, .. } => map.domain(),
            PatternEntry::Progression { .. } => None,
        }
    }

    fn with_mult(&self, mult: BigUint) -> Self {
        let mut e = self.clone();
        match &mut e {
            PatternEntry::Map { mult: m, .. } | PatternEntry::Progression { mult: m, .. } => *m = mult,
        }
        e
    }

    fn key(&self) -> PatternEntry {
        self.with_mult(BigUint::zero())
    }

    /// The progression's points, expanded. Intended for small counts and
    /// for checking the compressed arithmetic.
    pub fn progression_points(&self) -> Vec<Rational> {
        match self {
            PatternEntry::Map { .. } => Vec::new(),
            PatternEntry::Progression { space, start, step, count, .. } => (0..*count)
                .map(|r| {
                    let x = start + step * Rational::from_integer(BigInt::from(r));
                    if *space == Space::Circle {
                        frac(&x)
                    } else {
                        x
                    }
                })
                .collect(),
        }
    }

    /// Locations of the progression's points without expanding rationals;
    /// the common denominator must fit in a `u64`.
    pub fn progression_locs(&self) -> Option<impl Iterator<Item = Loc> + '_> {
        let PatternEntry::Progression { space, start, step, count, .. } = self else {
            return None;
        };
        let (s, d, l) = common_denominator(start, step)?;
        let circle = *space == Space::Circle;
        Some((0..*count).map(move |r| {
            let num = s as u128 + r as u128 * d as u128;
            let num = if circle { num % l as u128 } else { num };
            Loc::Ratio(num as u64, l)
        }))
    }

    /// Exact `Σ_r coord(start + r·step)` over the progression (phases in
    /// `[0,1)` on circles), not counting `mult`.
    pub fn progression_coordinate_sum(&self) -> Option<Rational> {
        let PatternEntry::Progression { space, start, step, count, .. } = self else {
            return None;
        };
        let n = BigInt::from(*count);
        if *space != Space::Circle {
            let tri = Rational::new(&n * (&n - 1), BigInt::from(2));
            return Some(start * Rational::from_integer(n) + step * tri);
        }
        let l = start.denom().lcm(step.denom());
        let s = (start.numer() * (&l / start.denom())).mod_floor(&l);
        let d = (step.numer() * (&l / step.denom())).mod_floor(&l);
        // Σ ((s + r d) mod l) = Σ (s + r d) − l·Σ ⌊(s + r d)/l⌋
        let linear = &s * &n + &d * (&n * (&n - 1) / 2);
        let floors = floor_sum(&n, &l, &d, &s);
        Some(Rational::new(linear - &l * floors, l))
    }

    /// Exact image of this run under an outer map (this run is the inner
    /// part of a composite).
    fn after_outer_map(&self, outer: &SpectralMap, outer_mult: &BigUint) -> PatternEntry {
        match self {
            PatternEntry::Map { map, mult } => PatternEntry::Map { map: outer.after(map), mult: outer_mult * mult },
            PatternEntry::Progression { start, step, count, mult, .. } => match outer.linear_factor() {
                None => PatternEntry::Map { map: outer.clone(), mult: outer_mult * mult * BigUint::from(*count) },
                Some(c) => {
                    let c = Rational::from_integer(c);
                    let space = outer.codomain();
                    let mut e = PatternEntry::progression(space, start * &c, step * &c, *count);
                    if let PatternEntry::Progression { mult: m, .. } = &mut e {
                        *m = outer_mult * mult;
                    }
                    e
                }
            },
        }
    }
}

impl Serialize for PatternEntry {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        #[derive(Serialize)]
        #[serde(tag = "kind", rename_all = "snake_case")]
        enum Repr<'a> {
            Map { map: &'a SpectralMap, mult: String },
            Progression { space: Space, start: String, step: String, count: u64, mult: String },
        }
        match self {
            PatternEntry::Map { map, mult } => Repr::Map { map, mult: mult.to_string() },
            PatternEntry::Progression { space, start, step, count, mult } => Repr::Progression {
                space: *space,
                start: rational_to_string(start),
                step: rational_to_string(step),
                count: *count,
                mult: mult.to_string(),
            },
        }
        .serialize(s)
    }
}

fn common_denominator(a: &Rational, b: &Rational) -> Option<(u64, u64, u64)> {
    if a.is_negative() || b.is_negative() {
        return None;
    }
    let l = a.denom().lcm(b.denom());
    let s = a.numer() * (&l / a.denom());
    let d = b.numer() * (&l / b.denom());
    Some((s.to_u64()?, d.to_u64()?, l.to_u64()?))
}

/// `Σ_{i=0}^{n-1} ⌊(a·i + b)/m⌋` for `n, a, b ≥ 0`, `m > 0`.
pub fn floor_sum(n: &BigInt, m: &BigInt, a: &BigInt, b: &BigInt) -> BigInt {
    let (mut n, mut m, mut a, mut b) = (n.clone(), m.clone(), a.clone(), b.clone());
    let mut acc = BigInt::zero();
    loop {
        if n.is_zero() {
            return acc;
        }
        if a >= m {
            acc += &n * (&n - 1) / 2 * (&a / &m);
            a %= &m;
        }
        if b >= m {
            acc += &n * (&b / &m);
            b %= &m;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            return acc;
        }
        n = &y_max / &m;
        b = &y_max % &m;
        std::mem::swap(&mut m, &mut a);
    }
}

/// The eigenvalue pattern of one partial homomorphism.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Pattern {
    entries: Vec<PatternEntry>,
}

impl Pattern {
    pub fn new(entries: Vec<PatternEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[PatternEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of diagonal entries.
    pub fn len(&self) -> BigUint {
        self.entries.iter().map(PatternEntry::multiplicity).sum()
    }

    /// `self ∘ inner`: the pattern of `outer_hom ∘ inner_hom` through one
    /// intermediate block, where `self` belongs to the earlier homomorphism
    /// (maps into the original source) and `inner` to the later one.
    pub fn after(&self, inner: &Pattern) -> Pattern {
        let mut out = Vec::new();
        for mu in &self.entries {
            for lambda in &inner.entries {
                out.push(match mu {
                    PatternEntry::Map { map, mult } => lambda.after_outer_map(map, mult),
                    PatternEntry::Progression { .. } => mu.with_mult(mu.mult() * lambda.multiplicity()),
                });
            }
        }
        Pattern::new(out)
    }

    pub fn concat(&mut self, other: Pattern) {
        self.entries.extend(other.entries);
    }

    /// Sorted, with equal runs merged and one-point progressions turned into
    /// constant maps. Two patterns that differ only by a permutation of the
    /// diagonal have the same canonical form when their runs line up.
    pub fn canonical(&self) -> Pattern {
        let mut items: Vec<(PatternEntry, BigUint)> = self
            .entries
            .iter()
            .map(|e| match e {
                PatternEntry::Progression { space, start, count: 1, mult, .. } => {
                    let p = SpectrumPoint::exact(*space, start.clone()).expect("progression point lies in its space");
                    (PatternEntry::Map { map: SpectralMap::Const(p), mult: BigUint::zero() }, mult.clone())
                }
                _ => (e.key(), e.mult().clone()),
            })
            .filter(|(_, m)| !m.is_zero())
            .collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<PatternEntry> = Vec::new();
        let mut last_key: Option<PatternEntry> = None;
        for (key, m) in items {
            if last_key.as_ref() == Some(&key) {
                let prev = merged.last_mut().expect("a key was pushed");
                *prev = prev.with_mult(prev.mult() + m);
            } else {
                merged.push(key.with_mult(m));
                last_key = Some(key);
            }
        }
        Pattern::new(merged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;

    #[test]
    fn exp_then_circle_winding() {
        let m = SpectralMap::circle_winding(2).after(&SpectralMap::exp_winding(16));
        assert_eq!(m, SpectralMap::exp_winding(32));
    }

    #[test]
    fn constants_are_pushed_through_exactly() {
        let p = SpectrumPoint::circle(rational(2, 3));
        let m = SpectralMap::circle_winding(2).after(&SpectralMap::Const(p));
        assert_eq!(m, SpectralMap::Const(SpectrumPoint::circle(rational(1, 3))));
        let q = SpectrumPoint::interval(rational(3, 8)).unwrap();
        let m = SpectralMap::exp_winding(-3).after(&SpectralMap::Const(q));
        assert_eq!(m, SpectralMap::Const(SpectrumPoint::circle(rational(7, 8))));
    }

    #[test]
    fn locate_reduces_windings_mod_grid() {
        assert_eq!(SpectralMap::exp_winding(-1).locate(1, 8), Loc::Ratio(7, 8));
        assert_eq!(SpectralMap::exp_winding(12).locate(3, 8), Loc::Ratio(4, 8));
    }

    #[test]
    fn floor_sum_matches_loop() {
        for (n, m, a, b) in [(0, 5, 3, 2), (7, 5, 3, 2), (100, 37, 91, 12), (13, 1, 4, 0)] {
            let direct: i64 = (0..n).map(|i| (a * i + b) / m).sum();
            let fs = floor_sum(&n.into(), &m.into(), &a.into(), &b.into());
            assert_eq!(fs, BigInt::from(direct), "n={n} m={m} a={a} b={b}");
        }
    }

    #[test]
    fn progression_sum_matches_expansion() {
        for (s, d, c) in [((1, 3), (1, 3), 2u64), ((0, 1), (1, 7), 7), ((2, 9), (5, 6), 40), ((1, 2), (3, 4), 9)] {
            let e = PatternEntry::progression(Space::Circle, rational(s.0, s.1), rational(d.0, d.1), c);
            let direct: Rational = e.progression_points().into_iter().sum();
            assert_eq!(e.progression_coordinate_sum().unwrap(), direct);
        }
    }

    #[test]
    fn progression_locs_match_points() {
        let e = PatternEntry::progression(Space::Circle, rational(2, 9), rational(5, 6), 11);
        let from_locs: Vec<f64> = e.progression_locs().unwrap().map(Loc::to_f64).collect();
        let from_points: Vec<f64> = e.progression_points().iter().map(crate::arith::rational_to_f64).collect();
        assert_eq!(from_locs, from_points);
    }

    #[test]
    fn canonical_merges_and_sorts() {
        let a = SpectralMap::exp_winding(1);
        let b = SpectralMap::exp_winding(-1);
        let p = Pattern::new(vec![
            PatternEntry::single(a.clone()),
            PatternEntry::single(b.clone()),
            PatternEntry::repeated(a.clone(), 2u32),
        ]);
        let q = Pattern::new(vec![PatternEntry::single(b), PatternEntry::repeated(a, 3u32)]);
        assert_eq!(p.canonical(), q.canonical());
        assert_eq!(p.len(), BigUint::from(4u32));
    }

    #[test]
    fn progression_under_winding_stays_a_progression() {
        let roots = Pattern::new(vec![PatternEntry::progression(Space::Circle, rational(1, 5), rational(1, 5), 4)]);
        let outer = Pattern::new(vec![PatternEntry::single(SpectralMap::circle_winding(3))]);
        let c = outer.after(&roots);
        let direct: Vec<Rational> = (1..5).map(|j| frac(&rational(3 * j, 5))).collect();
        assert_eq!(c.entries()[0].progression_points(), direct);
    }
}
