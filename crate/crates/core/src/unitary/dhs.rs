//! The de la Harpe–Skandalis determinant of exponential paths with diagonal
//! exponents: `Δ(ξ)(τ) = (1/2πi)∫₀¹ τ(ξ′(s)ξ(s)*) ds` for `ξ(s) = e^{2πis·h}`.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;

use super::UClass;
use crate::aff::AffElement;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::{CompensatedSum, Scalar};
use crate::Rational;

/// Simpson nodes on `[0,1]`.
const SIMPSON_NODES: usize = 129;
/// Step of the fourth-order central difference in `s`.
const DIFF_STEP: f64 = 1e-3;

/// Diagonal self-adjoint exponent of one block: the listed entries with
/// multiplicities, zeros on the rest of the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockExponent<S> {
    pub size: BigUint,
    pub entries: Vec<(GridFunction<S>, BigUint)>,
}

/// Exponent `h` of the path `s ↦ e^{2πis·h}` on a direct sum.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalExponent<S> {
    pub stage: usize,
    pub blocks: Vec<BlockExponent<S>>,
}

fn weight<S: Scalar>(mult: &BigUint, size: &BigUint) -> S {
    S::of_rational(&Rational::new(BigInt::from(mult.clone()), BigInt::from(size.clone())))
}

fn check_path<S: Scalar>(path: &[DiagonalExponent<S>]) -> Result<&DiagonalExponent<S>> {
    let first = path.first().ok_or_else(|| Error::InvalidParams("empty path".into()))?;
    if path.iter().any(|p| p.blocks.len() != first.blocks.len()) {
        return Err(Error::BlockMismatch("path pieces have different block counts".into()));
    }
    Ok(first)
}

fn block_template<S: Scalar>(b: &BlockExponent<S>) -> Result<&GridFunction<S>> {
    b.entries.first().map(|(f, _)| f).ok_or_else(|| Error::InvalidParams("block exponent has no entries".into()))
}

/// Closed form: the normalized trace of `h`, summed over the concatenated
/// pieces.
pub fn dhs_determinant<S: Scalar>(path: &[DiagonalExponent<S>]) -> Result<AffElement<S>> {
    let first = check_path(path)?;
    let mut funcs = Vec::with_capacity(first.blocks.len());
    for (k, b0) in first.blocks.iter().enumerate() {
        let t = block_template(b0)?;
        let mut acc = vec![CompensatedSum::<S>::new(); t.samples().len()];
        for piece in path {
            let b = &piece.blocks[k];
            for (f, mult) in &b.entries {
                t.check_compatible(f)?;
                let w = weight::<S>(mult, &b.size);
                acc.iter_mut().zip(f.samples()).for_each(|(a, &x)| a.add(w * x));
            }
        }
        funcs.push(GridFunction::new(t.space(), t.resolution(), acc.iter().map(CompensatedSum::value).collect())?);
    }
    Ok(AffElement::new(first.stage, funcs))
}

/// `(1/2πi)∫₀¹ ξ′(s)·conj(ξ(s)) ds` for `ξ(s) = e^{2πisa}`, with `ξ′` from a
/// fourth-order central difference and composite Simpson quadrature.
fn log_derivative_integral(a: f64) -> f64 {
    let xi = |s: f64| Complex64::from_polar(1.0, 2.0 * PI * s * a);
    let d = DIFF_STEP;
    let integrand = |s: f64| {
        let deriv = (-xi(s + 2.0 * d) + xi(s + d) * 8.0 - xi(s - d) * 8.0 + xi(s - 2.0 * d)) / (12.0 * d);
        (deriv * xi(s).conj() / Complex64::new(0.0, 2.0 * PI)).re
    };
    let m = SIMPSON_NODES - 1;
    let hstep = 1.0 / m as f64;
    let mut acc = CompensatedSum::<f64>::new();
    for k in 0..=m {
        let c = if k == 0 || k == m {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(c * integrand(k as f64 * hstep));
    }
    acc.value() * hstep / 3.0
}

/// The same determinant by numerical differentiation and quadrature along
/// each diagonal entry's path.
pub fn dhs_quadrature<S: Scalar>(path: &[DiagonalExponent<S>]) -> Result<AffElement<S>> {
    let first = check_path(path)?;
    let mut funcs = Vec::with_capacity(first.blocks.len());
    for (k, b0) in first.blocks.iter().enumerate() {
        let t = block_template(b0)?;
        let mut acc = vec![CompensatedSum::<S>::new(); t.samples().len()];
        for piece in path {
            let b = &piece.blocks[k];
            for (f, mult) in &b.entries {
                t.check_compatible(f)?;
                let w = weight::<S>(mult, &b.size);
                for (a, &x) in acc.iter_mut().zip(f.samples()) {
                    a.add(w * S::of_f64(log_derivative_integral(x.as_f64())));
                }
            }
        }
        funcs.push(GridFunction::new(t.space(), t.resolution(), acc.iter().map(CompensatedSum::value).collect())?);
    }
    Ok(AffElement::new(first.stage, funcs))
}

/// Exponent `diag(size·h, 0, …, 0)` per block of a class without winding:
/// a lift whose determinant is the class's phase.
pub fn exponential_lift<S: Scalar>(u: &UClass<S>) -> Result<DiagonalExponent<S>> {
    if let Some(k) = u.blocks.iter().position(|b| b.winding != BigInt::from(0)) {
        return Err(Error::NonTorsionClass(k + 1));
    }
    let blocks = u
        .blocks
        .iter()
        .zip(&u.sizes)
        .map(|(b, size)| {
            let s = S::of_rational(&Rational::from_integer(BigInt::from(size.clone())));
            BlockExponent { size: size.clone(), entries: vec![(b.phase.scale(s), BigUint::from(1u32))] }
        })
        .collect();
    Ok(DiagonalExponent { stage: u.stage, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn projection_gives_its_trace() {
        let one = GridFunction::<f64>::constant(Space::Interval, 8, 1.0);
        let path = [DiagonalExponent {
            stage: 1,
            blocks: vec![BlockExponent { size: BigUint::from(8u32), entries: vec![(one, BigUint::from(3u32))] }],
        }];
        let closed = dhs_determinant(&path).unwrap();
        let quad = dhs_quadrature(&path).unwrap();
        for (&c, &q) in closed.funcs[0].samples().iter().zip(quad.funcs[0].samples()) {
            assert!((c - 0.375).abs() < 1e-15);
            assert!((q - 0.375).abs() < 1e-9);
        }
    }

    #[test]
    fn ramp_over_size_two() {
        let t = GridFunction::<f64>::from_fn(Space::Interval, 16, |t| t);
        let path = [DiagonalExponent {
            stage: 1,
            blocks: vec![BlockExponent { size: BigUint::from(2u32), entries: vec![(t, BigUint::from(1u32))] }],
        }];
        let quad = dhs_quadrature(&path).unwrap();
        for (k, &q) in quad.funcs[0].samples().iter().enumerate() {
            assert!((q - k as f64 / 32.0).abs() < 1e-9);
        }
    }
}
