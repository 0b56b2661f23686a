//! Finite-stage invariants of inductive systems of matrix algebras over the
//! point, the interval and the circle: exact K-theory, tracial affine
//! functions, and the Hausdorffified algebraic K1 layer with its metrics.
//!
//! Grid-valued data is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the common choice.

pub mod aff;
pub mod arith;
pub mod error;
pub mod family;
pub mod grid;
pub mod ktheory;
pub mod lab;
pub mod report;
pub mod scalar;
pub mod space;
pub mod suite;
pub mod system;
pub mod unitary;

/// Exact rational with arbitrary-precision numerator and denominator, always
/// in lowest terms.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use grid::{lattice_quotient_seminorm, midrange_seminorm, sup_norm, GridFunction};
pub use scalar::Scalar;
pub use space::{Coordinate, Space, SpectrumPoint};
pub use system::{
    build_system_a, build_system_b, compose, corner_unit_image, multiplicity_matrix, Block, InductiveSystem, Pattern,
    PatternEntry, Projection, SpectralMap, StepHom, SystemKind, SystemParams,
};

pub type GridFunctionF64 = GridFunction<f64>;
pub type GridFunctionF32 = GridFunction<f32>;
pub type AffElementF64 = aff::AffElement<f64>;
