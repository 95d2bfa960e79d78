//! Early-time electromagnetic decay of conducting, magnetically permeable
//! targets.
//!
//! * [`timescales`]: target parameters and the derived diffusion, bulk and
//!   magnetic crossover times.
//! * [`specfun`]: erfc, erfcx and spherical Bessel functions.
//! * [`sphere`]: exact decay spectrum and H_l series of a homogeneous sphere.
//! * [`early_time`]: boundary-layer profile functions, their asymptotes and
//!   mode superposition.
//! * [`surface`]: triangulated-surface mode eigensolver (surface Laplacian,
//!   exterior Neumann-to-Dirichlet map, scalar and transverse modes).
//! * [`fit`]: log-log power-law fitting and crossover estimation.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod early_time;
pub mod error;
pub mod fit;
pub mod specfun;
pub mod sphere;
pub mod surface;
pub mod timescales;

pub use error::{Error, Result};
pub use timescales::{DerivedTimescales, TargetParams};

/// Vacuum permeability in H/m.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
