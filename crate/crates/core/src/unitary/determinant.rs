//! Determinants of generator images and the uniformly varied determinant
//! property.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{big_mod_u64, frac, rational_to_string};
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use crate::space::Space;
use crate::system::{InductiveSystem, Loc, PatternEntry, SpectralMap, StepHom};
use crate::Rational;

/// Largest residual phase oscillation accepted as "constant".
const RESIDUAL_TOL: f64 = 1e-9;

/// `det` of the image of `diag(z,1,…,1)` under one part, as a function on
/// the target spectrum: `x ↦ e^{2πi(degree·x + constant)}`, plus the
/// sampled cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantClass {
    pub target_space: Space,
    /// Sum of `mult·w` over winding entries.
    pub degree: BigInt,
    /// Sum of `mult·θ` over constant entries, in `[0,1)`.
    pub constant: Rational,
    /// Rank of the image corner.
    pub corner_rank: BigUint,
    /// Oscillation of the sampled phase after removing `degree·x + constant`,
    /// wrapped into `(-1/2, 1/2]` nodewise.
    pub residual_oscillation: f64,
    /// Winding recovered by unwrapping the sampled phase; an error when the
    /// grid cannot resolve the phase speed.
    pub sampled_degree: std::result::Result<BigInt, Error>,
}

impl DeterminantClass {
    /// A constant determinant: no winding, no residual.
    pub fn is_constant(&self) -> bool {
        self.degree.is_zero() && self.residual_oscillation <= RESIDUAL_TOL
    }

    /// `λ·z^k` on a circle target.
    pub fn is_pure_winding(&self) -> bool {
        self.residual_oscillation <= RESIDUAL_TOL
    }
}

fn wrap(x: f64) -> f64 {
    let r = x - x.round();
    if r <= -0.5 {
        r + 1.0
    } else {
        r
    }
}

/// Determinant of the image of the standard generator of the circle block
/// `source` (0-based) in target block `target` (0-based), sampled at the
/// given resolution.
pub fn det_class_of_generator_image(
    h: &StepHom,
    source: usize,
    target: usize,
    resolution: usize,
) -> Result<DeterminantClass> {
    if h.source()[source].space != Space::Circle {
        return Err(Error::NotCircleSource(source + 1));
    }
    let part = h
        .part(source, target)
        .ok_or_else(|| Error::BlockMismatch(format!("part ({},{}) is zero", source + 1, target + 1)))?;
    let target_space = h.target()[target].space;
    let mut degree = BigInt::zero();
    let mut constant = Rational::zero();
    let mut speed = BigUint::zero();
    for e in part.pattern.entries() {
        let mult = BigInt::from(e.mult().clone());
        match e {
            PatternEntry::Map { map: SpectralMap::CircleWinding(w) | SpectralMap::ExpWinding(w), .. } => {
                degree += &mult * w;
                speed += e.mult() * w.abs().to_biguint().expect("absolute value");
            }
            PatternEntry::Map { map: SpectralMap::Const(p), .. } => {
                let theta =
                    p.exact_coordinate().cloned().unwrap_or_else(|| crate::arith::rational_from_f64(p.to_f64()));
                constant = frac(&(constant + Rational::from_integer(mult) * theta));
            }
            PatternEntry::Progression { .. } => {
                let sum = e.progression_coordinate_sum().expect("progression entry");
                constant = frac(&(constant + Rational::from_integer(mult) * sum));
            }
            PatternEntry::Map { map: SpectralMap::IdentityInterval, .. } => unreachable!("circle source"),
        }
    }
    let sampled = sampled_phase(part.pattern.entries(), target_space, resolution);
    let n = resolution as u64;
    let deg_mod = big_mod_u64(&degree, n);
    let c = crate::arith::rational_to_f64(&constant);
    let residual: Vec<f64> = sampled
        .iter()
        .enumerate()
        .map(|(k, &phi)| {
            let model = ((deg_mod as u128 * k as u128) % n as u128) as f64 / n as f64 + c;
            wrap(phi - model)
        })
        .collect();
    let hi = residual.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = residual.iter().copied().fold(f64::INFINITY, f64::min);
    let sampled_degree = if target_space == Space::Point {
        Ok(BigInt::zero())
    } else if speed * 8u32 > BigUint::from(resolution) {
        Err(Error::GridTooCoarse { resolution, speed: degree.abs().to_string() })
    } else {
        Ok(unwrap_winding(&sampled, target_space))
    };
    Ok(DeterminantClass {
        target_space,
        degree,
        constant,
        corner_rank: part.rank_consumed(),
        residual_oscillation: hi - lo,
        sampled_degree,
    })
}

/// Phase of `∏_λ λ(x)` in `[0,1)` at every target node, accumulated in
/// floating point from the entries' positions.
fn sampled_phase(entries: &[PatternEntry], target: Space, resolution: usize) -> Vec<f64> {
    let nodes = target.sample_count(resolution);
    let mut acc = vec![CompensatedSum::<f64>::new(); nodes];
    for e in entries {
        let mult = e.mult().to_f64().unwrap_or(f64::INFINITY);
        match e {
            PatternEntry::Map { map: SpectralMap::Const(p), .. } => {
                let v = (mult * Loc::of_point(p).to_f64()).rem_euclid(1.0);
                acc.iter_mut().for_each(|a| a.add(v));
            }
            PatternEntry::Map { map, .. } => {
                for (k, a) in acc.iter_mut().enumerate() {
                    a.add((mult * map.locate(k, resolution).to_f64()).rem_euclid(1.0));
                }
            }
            PatternEntry::Progression { .. } => {
                let s: CompensatedSum<f64> = match e.progression_locs() {
                    Some(locs) => locs.map(Loc::to_f64).collect(),
                    None => e.progression_points().iter().map(crate::arith::rational_to_f64).collect(),
                };
                let v = (mult * s.value().rem_euclid(1.0)).rem_euclid(1.0);
                acc.iter_mut().for_each(|a| a.add(v));
            }
        }
    }
    acc.iter().map(|a| a.value().rem_euclid(1.0)).collect()
}

/// Total phase change of a sampled phase (in turns) across the spectrum,
/// assuming adjacent nodes differ by less than half a turn.
pub fn unwrap_winding(phase: &[f64], space: Space) -> BigInt {
    let n = phase.len();
    let steps = match space {
        Space::Circle => n,
        _ => n.saturating_sub(1),
    };
    let total: f64 = (0..steps).map(|k| wrap(phase[(k + 1) % n] - phase[k])).sum();
    BigInt::from(total.round() as i64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UvdPart {
    pub step: usize,
    pub source_block: usize,
    pub target_block: usize,
    pub target_space: Space,
    pub degree: String,
    pub constant: String,
    pub residual_oscillation: f64,
    pub sampled_degree: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UvdReport {
    pub parts: Vec<UvdPart>,
    pub pass: bool,
}

impl UvdReport {
    pub fn failures(&self) -> impl Iterator<Item = &UvdPart> {
        self.parts.iter().filter(|p| !p.pass)
    }
}

/// Generator images must have constant determinant in non-circle blocks and
/// determinant `λz^k` in circle blocks, for every circle source block and
/// nonzero part of every step.
pub fn is_uniformly_varied(sys: &InductiveSystem) -> Result<UvdReport> {
    let resolution = sys.params.grid_resolution;
    let mut parts = Vec::new();
    for (s, h) in sys.steps().iter().enumerate() {
        for (i, sb) in h.source().iter().enumerate() {
            if sb.space != Space::Circle {
                continue;
            }
            for j in 0..h.target().len() {
                if h.part(i, j).is_none() {
                    continue;
                }
                let d = det_class_of_generator_image(h, i, j, resolution)?;
                let pass = if d.target_space == Space::Circle { d.is_pure_winding() } else { d.is_constant() };
                parts.push(UvdPart {
                    step: s + 1,
                    source_block: i + 1,
                    target_block: j + 1,
                    target_space: d.target_space,
                    degree: d.degree.to_string(),
                    constant: rational_to_string(&d.constant),
                    residual_oscillation: d.residual_oscillation,
                    sampled_degree: d.sampled_degree.as_ref().ok().map(|w| w.to_string()),
                    pass,
                });
            }
        }
    }
    let pass = parts.iter().all(|p| p.pass);
    Ok(UvdReport { parts, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational;
    use crate::system::{build_system_a, build_system_b, SystemParams};

    #[test]
    fn step_one_dichotomy() {
        let params = SystemParams::default();
        let a = build_system_a(&params).unwrap();
        let b = build_system_b(&params).unwrap();
        let da = det_class_of_generator_image(a.step(1), 0, 0, 4096).unwrap();
        assert_eq!(da.degree, BigInt::zero());
        // e^{2πi/3}·e^{4πi/3} = 1
        assert_eq!(da.constant, rational(0, 1));
        assert!(da.residual_oscillation < 1e-12);
        let db = det_class_of_generator_image(b.step(1), 0, 0, 4096).unwrap();
        assert_eq!(db.degree, BigInt::from(16));
        assert_eq!(db.sampled_degree, Ok(BigInt::from(16)));
        let up = det_class_of_generator_image(a.step(1), 0, 1, 4096).unwrap();
        assert_eq!(up.degree, BigInt::from(1));
        assert!(up.is_pure_winding());
    }

    #[test]
    fn unwrap_counts_turns() {
        let phase: Vec<f64> = (0..64).map(|k| (5.0 * k as f64 / 64.0).rem_euclid(1.0)).collect();
        assert_eq!(unwrap_winding(&phase, Space::Circle), BigInt::from(5));
        let phase: Vec<f64> = (0..=64).map(|k| (-3.0 * k as f64 / 64.0).rem_euclid(1.0)).collect();
        assert_eq!(unwrap_winding(&phase, Space::Interval), BigInt::from(-3));
    }

    #[test]
    fn coarse_grid_is_reported() {
        let b = build_system_b(&SystemParams::default()).unwrap();
        let d = det_class_of_generator_image(b.step(1), 0, 0, 16).unwrap();
        assert!(matches!(d.sampled_degree, Err(Error::GridTooCoarse { .. })));
    }
}
