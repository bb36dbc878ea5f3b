//! Fork-hologram synthesis, scalar wave propagation and vortex-beam analysis
//! for electron optics.
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiation.

pub mod analysis;
pub mod cfld;
pub mod constants;
pub mod error;
pub mod export;
pub mod fft;
pub mod field;
pub mod hologram;
pub mod modal;
pub mod pgm;
pub mod propagation;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use field::{ComplexField, GridSpec, PlaneTag, PolarField};
pub use hologram::{BeamParams, HologramSpec, ThicknessMap};
pub use scalar::Real;

pub type Grid = GridSpec<f64>;
pub type Field = ComplexField<f64>;
pub type Polar = PolarField<f64>;
pub type Plane = PlaneTag<f64>;
pub type Beam = BeamParams<f64>;
pub type Hologram = HologramSpec<f64>;
pub type Thickness = ThicknessMap<f64>;

pub type Grid32 = GridSpec<f32>;
pub type Field32 = ComplexField<f32>;
