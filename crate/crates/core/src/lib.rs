//! Linear response of a scalar field coupled to a one-loop semiclassical
//! back-reaction, in a flat background.
//!
//! The characteristic function `S(z)` of the linearized theory controls every
//! result: its zeros are the discrete masses, its cut carries a continuum, and
//! their signs decide whether a mode oscillates or runs away.

// `!(x > 0.0)` style guards reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cosmo;
pub mod decay;
pub mod dispersion;
pub mod error;
pub mod evolve;
pub mod filon;
pub mod greens;
pub mod grid;
pub mod params;
pub mod quad;
pub mod radial;
pub mod spectral;

pub use error::{Error, Result};
pub use params::ModelParams;
