//! Constant-mean-curvature spheres in the Riemannian Heisenberg group H¹.
//!
//! The ambient space carries the left-invariant metric making
//! `X = (1/ε)(∂x + σy∂t)`, `Y = (1/ε)(∂y − σx∂t)`, `T = ε²∂t` orthonormal.
//! On top of it this crate evaluates the rotationally symmetric CMC spheres
//! `Σ_R`, their curvature, the meridian geodesic foliation, the calibrating
//! foliation of a vertical half-cylinder and the quantitative isoperimetric
//! deficit.
//!
//! Everything is `no_std` with `alloc`; floating point goes through `libm`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibration;
pub mod curvature;
pub mod diff;
pub mod error;
pub mod foliation;
pub mod geometry;
pub mod isoperimetry;
pub mod quadrature;
pub mod roots;
pub mod sphere;
pub mod verification;

mod math;

pub use error::{Error, Result};
pub use geometry::{ModelParams, Point, TangentVector};
pub use sphere::SphereSpec;
