//! The Hausdorffified unitary layer. A class in `U/S̃U` (or `U/‾DU`) of a
//! block algebra is recorded through its normalized determinant: per block a
//! winding number (circle blocks only) and a real phase `h` with
//! `det u(x) = e^{2πi·size·h(x)}` times the winding part.

mod determinant;
mod dhs;

pub use determinant::{
    det_class_of_generator_image, is_uniformly_varied, unwrap_winding, DeterminantClass, UvdPart, UvdReport,
};
pub use dhs::{dhs_determinant, dhs_quadrature, exponential_lift, BlockExponent, DiagonalExponent};

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aff::accumulate_pullback;
use crate::arith::frac;
use crate::error::{Error, Result};
use crate::grid::{lattice_quotient_seminorm, midrange_seminorm, GridFunction};
use crate::scalar::{CompensatedSum, Scalar};
use crate::space::Space;
use crate::system::{Block, PatternEntry, SpectralMap, StepHom};
use crate::Rational;

/// Which constants the phase is taken modulo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeMode {
    /// Modulo all real constants: classes in `U/S̃U`.
    ModAllConstants,
    /// Modulo `(1/size)ℤ` per block: classes in `U/‾DU`.
    ModLattice,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UBlock<S> {
    pub winding: BigInt,
    pub phase: GridFunction<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UClass<S> {
    pub stage: usize,
    pub sizes: Vec<BigUint>,
    pub blocks: Vec<UBlock<S>>,
    pub mode: LatticeMode,
}

impl<S: Scalar> UClass<S> {
    /// Phases are renormalized at the basepoint: to 0 modulo all constants,
    /// into `[0, 1/size)` modulo the lattice.
    pub fn new(
        stage: usize,
        blocks: &[Block],
        parts: Vec<(BigInt, GridFunction<S>)>,
        mode: LatticeMode,
    ) -> Result<Self> {
        if parts.len() != blocks.len() {
            return Err(Error::BlockMismatch(format!("{} parts for {} blocks", parts.len(), blocks.len())));
        }
        let mut out = Vec::with_capacity(parts.len());
        for (k, ((winding, phase), b)) in parts.into_iter().zip(blocks).enumerate() {
            if phase.space() != b.space {
                return Err(Error::BlockMismatch(format!(
                    "phase of block {} lives on {}, not {}",
                    k + 1,
                    phase.space(),
                    b.space
                )));
            }
            if b.space != Space::Circle && !winding.is_zero() {
                return Err(Error::BlockMismatch(format!(
                    "block {} has no circle spectrum but winding {winding}",
                    k + 1
                )));
            }
            out.push(UBlock { winding, phase });
        }
        let mut u = Self { stage, sizes: blocks.iter().map(|b| b.size.clone()).collect(), blocks: out, mode };
        u.normalize();
        Ok(u)
    }

    pub fn zero(stage: usize, blocks: &[Block], resolution: usize, mode: LatticeMode) -> Self {
        let parts = blocks.iter().map(|b| (BigInt::zero(), GridFunction::zeros(b.space, resolution))).collect();
        Self::new(stage, blocks, parts, mode).expect("zero class is well formed")
    }

    /// `x` times the standard generator `diag(z, 1, …, 1)` of a circle block
    /// (1-based), with the given phase correction there.
    pub fn generator(
        stage: usize,
        blocks: &[Block],
        block: usize,
        x: i64,
        phase: Option<GridFunction<S>>,
        resolution: usize,
        mode: LatticeMode,
    ) -> Result<Self> {
        if blocks.get(block.wrapping_sub(1)).map(|b| b.space) != Some(Space::Circle) {
            return Err(Error::NotCircleSource(block));
        }
        let parts = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if i + 1 == block {
                    (BigInt::from(x), phase.clone().unwrap_or_else(|| GridFunction::zeros(b.space, resolution)))
                } else {
                    (BigInt::zero(), GridFunction::zeros(b.space, resolution))
                }
            })
            .collect();
        Self::new(stage, blocks, parts, mode)
    }

    fn normalize(&mut self) {
        for (b, size) in self.blocks.iter_mut().zip(&self.sizes) {
            let c = b.phase.basepoint_value();
            let shift = match self.mode {
                LatticeMode::ModAllConstants => c,
                LatticeMode::ModLattice => {
                    let step = S::one() / S::of_rational(&Rational::from_integer(BigInt::from(size.clone())));
                    (c / step).floor() * step
                }
            };
            b.phase = b.phase.offset(-shift);
        }
    }

    pub fn resolution(&self) -> usize {
        self.blocks.first().map_or(2, |b| b.phase.resolution())
    }

    pub fn windings(&self) -> Vec<BigInt> {
        self.blocks.iter().map(|b| b.winding.clone()).collect()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        if self.sizes != other.sizes {
            return Err(Error::BlockMismatch("classes live on different stages".into()));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: i32) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let phase = if sign > 0 { a.phase.add(&b.phase)? } else { a.phase.sub(&b.phase)? };
                let winding = if sign > 0 { &a.winding + &b.winding } else { &a.winding - &b.winding };
                Ok(UBlock { winding, phase })
            })
            .collect::<Result<_>>()?;
        let mut u = Self { stage: self.stage, sizes: self.sizes.clone(), blocks, mode: self.mode };
        u.normalize();
        Ok(u)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1)
    }

    /// Compression to the listed blocks (0-based).
    pub fn select(&self, blocks: &[usize]) -> Self {
        Self {
            stage: self.stage,
            sizes: blocks.iter().map(|&i| self.sizes[i].clone()).collect(),
            blocks: blocks.iter().map(|&i| self.blocks[i].clone()).collect(),
            mode: self.mode,
        }
    }

    /// Corner inclusion `ι_*` from the corner with ranks `p` into the one with
    /// ranks `q`: phases scale by `rank p_i / rank q_i`, windings are kept.
    pub fn include(&self, p: &[BigUint], q: &[BigUint]) -> Result<Self> {
        if p.len() != self.blocks.len() || q.len() != p.len() || p.iter().zip(q).any(|(a, b)| a > b) {
            return Err(Error::BlockMismatch("inclusion needs p <= q of matching shape".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(p.iter().zip(q))
            .map(|(b, (pi, qi))| {
                let c = if qi.is_zero() {
                    S::zero()
                } else {
                    S::of_rational(&Rational::new(BigInt::from(pi.clone()), BigInt::from(qi.clone())))
                };
                UBlock {
                    winding: if pi.is_zero() { BigInt::zero() } else { b.winding.clone() },
                    phase: b.phase.scale(c),
                }
            })
            .collect();
        let mut u = Self { stage: self.stage, sizes: self.sizes.clone(), blocks, mode: self.mode };
        u.normalize();
        Ok(u)
    }
}

/// `φ^♮`: push a class through a step. For target block `j`
/// `phase'_j = (1/size_j)·Σ_i Σ_{λ ∈ pattern(i,j)} [size_i·phase_i(λ(x)) + winding_i·lift(λ)(x)]`,
/// where `lift(e^{2πiwt}) = wt`, `lift(const e^{2πiθ}) = θ`, and `z ↦ z^v`
/// entries feed `winding'_j += winding_i·v` instead of the phase.
pub fn push_forward_uclass<S: Scalar>(h: &StepHom, u: &UClass<S>) -> Result<UClass<S>> {
    let src_sizes: Vec<BigUint> = h.source().iter().map(|b| b.size.clone()).collect();
    if src_sizes != u.sizes {
        return Err(Error::BlockMismatch("class does not live on the step's source".into()));
    }
    let n = u.resolution();
    let mut parts = Vec::with_capacity(h.target().len());
    for (j, tb) in h.target().iter().enumerate() {
        let size_j = Rational::from_integer(BigInt::from(tb.size.clone()));
        let mut acc = vec![CompensatedSum::new(); tb.space.sample_count(n)];
        let mut winding = BigInt::zero();
        let mut slope = Rational::zero();
        let mut constant = Rational::zero();
        for (i, ub) in u.blocks.iter().enumerate() {
            let Some(part) = h.part(i, j) else { continue };
            let size_i = Rational::from_integer(BigInt::from(h.source()[i].size.clone()));
            for e in part.pattern.entries() {
                let mult = Rational::from_integer(BigInt::from(e.mult().clone()));
                accumulate_pullback(&mut acc, &ub.phase, e, S::of_rational(&(&mult * &size_i / &size_j)));
                if ub.winding.is_zero() {
                    continue;
                }
                let w = Rational::from_integer(ub.winding.clone());
                match e {
                    PatternEntry::Map { map: SpectralMap::CircleWinding(v), mult } => {
                        winding += BigInt::from(mult.clone()) * v * &ub.winding;
                    }
                    PatternEntry::Map { map: SpectralMap::ExpWinding(v), .. } => {
                        slope += &mult * &w * Rational::from_integer(v.clone());
                    }
                    PatternEntry::Map { map: SpectralMap::Const(p), .. } => {
                        let theta = p
                            .exact_coordinate()
                            .cloned()
                            .unwrap_or_else(|| crate::arith::rational_from_f64(p.to_f64()));
                        constant = frac(&(constant + &mult * &w * theta));
                    }
                    PatternEntry::Progression { .. } => {
                        let sum = e.progression_coordinate_sum().expect("progression entry");
                        constant = frac(&(constant + &mult * &w * sum));
                    }
                    PatternEntry::Map { map: SpectralMap::IdentityInterval, .. } => {
                        unreachable!("a circle source has no identity-interval entries")
                    }
                }
            }
        }
        let slope = S::of_rational(&(slope / &size_j));
        let constant = S::of_rational(&(constant / &size_j));
        let samples = acc
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let x = if tb.space == Space::Point { S::zero() } else { S::of_usize(k) / S::of_usize(n) };
                a.value() + slope * x + constant
            })
            .collect();
        parts.push((winding, GridFunction::new(tb.space, n, samples)?));
    }
    UClass::new(h.to_stage, h.target(), parts, u.mode)
}

fn block_quotient<S: Scalar>(f: &GridFunction<S>, size: &BigUint, mode: LatticeMode) -> S {
    match mode {
        LatticeMode::ModAllConstants => midrange_seminorm(f),
        LatticeMode::ModLattice => lattice_quotient_seminorm(f, &Rational::new(1.into(), BigInt::from(size.clone()))),
    }
}

/// `‖[f]‖~`: the max over blocks of the phase's quotient seminorm. Defined
/// on classes with no winding.
pub fn quotient_norm_uclass<S: Scalar>(u: &UClass<S>) -> Result<S> {
    if let Some(k) = u.blocks.iter().position(|b| !b.winding.is_zero()) {
        return Err(Error::NonTorsionClass(k + 1));
    }
    Ok(u.blocks.iter().zip(&u.sizes).map(|(b, s)| block_quotient(&b.phase, s, u.mode)).fold(S::zero(), S::max))
}

/// `d′(u,v)`: quotient distance of the phase difference, `None` when the
/// windings differ.
pub fn quotient_distance<S: Scalar>(u: &UClass<S>, v: &UClass<S>) -> Result<Option<S>> {
    u.check_same_shape(v)?;
    if u.windings() != v.windings() {
        return Ok(None);
    }
    let diff = u.sub(v)?;
    Ok(Some(
        diff.blocks.iter().zip(&diff.sizes).map(|(b, s)| block_quotient(&b.phase, s, u.mode)).fold(S::zero(), S::max),
    ))
}

/// `D(u,v)`: 2 across different K₁ classes, otherwise `|e^{2πid′}−1|`,
/// capped at 2 once `d′ ≥ 1/2`.
pub fn metric_d<S: Scalar>(u: &UClass<S>, v: &UClass<S>) -> Result<f64> {
    Ok(match quotient_distance(u, v)? {
        None => 2.0,
        Some(d) => distance_from_quotient(d.as_f64()),
    })
}

pub fn distance_from_quotient(d: f64) -> f64 {
    if d >= 0.5 {
        2.0
    } else {
        2.0 * (PI * d).sin()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarDistanceReport {
    pub size: String,
    pub pairs: usize,
    pub max_observed: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Distances between random scalar unitaries `λ·1, μ·1` in `M_N(C(X))`
/// stay below `2π/N`.
pub fn scalar_distance_certificate(block: &Block, samples: usize, seed: u64) -> Result<ScalarDistanceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = std::slice::from_ref(block);
    let scalar = |alpha: f64| {
        UClass::<f64>::new(
            1,
            blocks,
            vec![(BigInt::zero(), GridFunction::constant(block.space, 2, alpha))],
            LatticeMode::ModLattice,
        )
    };
    let mut max_observed = 0.0f64;
    for _ in 0..samples {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        max_observed = max_observed.max(metric_d(&scalar(a)?, &scalar(b)?)?);
    }
    let n = crate::arith::rational_to_f64(&Rational::from_integer(BigInt::from(block.size.clone())));
    let bound = 2.0 * PI / n;
    Ok(ScalarDistanceReport {
        size: block.size.to_string(),
        pairs: samples,
        max_observed,
        bound,
        pass: max_observed <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_block(size: u32) -> Vec<Block> {
        vec![Block::new(size, Space::Circle)]
    }

    #[test]
    fn metric_examples() {
        let blocks = circle_block(4);
        let z = UClass::<f64>::zero(1, &blocks, 64, LatticeMode::ModAllConstants);
        assert_eq!(metric_d(&z, &z).unwrap(), 0.0);
        let g = UClass::generator(1, &blocks, 1, 1, None, 64, LatticeMode::ModAllConstants).unwrap();
        assert_eq!(metric_d(&z, &g).unwrap(), 2.0);
        assert!((distance_from_quotient(0.25) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scalar_distance_example() {
        let blocks = vec![Block::new(4u32, Space::Interval)];
        let lam = UClass::<f64>::new(
            1,
            &blocks,
            vec![(BigInt::zero(), GridFunction::constant(Space::Interval, 2, 0.125))],
            LatticeMode::ModLattice,
        )
        .unwrap();
        let one = UClass::<f64>::zero(1, &blocks, 2, LatticeMode::ModLattice);
        let d = metric_d(&lam, &one).unwrap();
        assert!((d - 0.7653668647301796).abs() < 1e-12);
        assert!(d <= 2.0 * PI / 4.0);
    }

    #[test]
    fn quotient_norm_of_sine() {
        let blocks = circle_block(1);
        let phase = GridFunction::from_fn(Space::Circle, 1024, |x| (2.0 * PI * x).sin());
        let u = UClass::new(1, &blocks, vec![(BigInt::zero(), phase)], LatticeMode::ModAllConstants).unwrap();
        assert!((quotient_norm_uclass(&u).unwrap() - 1.0).abs() < 1e-4);
        let g = UClass::<f64>::generator(1, &blocks, 1, 1, None, 8, LatticeMode::ModAllConstants).unwrap();
        assert_eq!(quotient_norm_uclass(&g), Err(Error::NonTorsionClass(1)));
    }
}
