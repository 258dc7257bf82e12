//! Numerical laboratory around a hard-to-approximate radial function.
//!
//! The crate constructs the radial target function built from signed
//! Bessel-shell indicators, the probability measure whose density is the
//! squared Fourier transform of a unit-volume ball indicator, compiles
//! 3-layer networks that approximate the target, trains width-swept
//! 2-layer networks against it, and numerically checks every explicit
//! inequality the construction relies on.

pub mod error;
pub mod experiment;
pub mod hardfn;
pub mod netbuild;
pub mod quad;
pub mod radial;
pub mod rng;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
