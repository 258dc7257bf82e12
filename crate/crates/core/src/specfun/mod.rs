//! Special functions: log-Gamma, Bessel J of the first kind, the Krasikov
//! approximation with its certified envelope, and the unit-volume-ball
//! radius R_d.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! any number of threads.

mod bessel;
mod gamma;

pub use bessel::{
    bessel_j, bessel_j_krasikov, bessel_j_over_pow, bessel_j_series, krasikov_terms,
    KrasikovTerms, SpecFunConfig,
};
pub use gamma::log_gamma;

/// The crate-wide default Bessel configuration.
pub const DEFAULT_SPECFUN: SpecFunConfig =
    SpecFunConfig { series_terms: 60, asymptotic_switch: 30.0, abs_tol: 1e-9 };

use crate::error::{Error, Result};

/// Radius R_d of the d-dimensional Euclidean ball of unit volume:
/// R_d = π^(−1/2) Γ(d/2+1)^(1/d). Always within [√d/5, √d/2].
pub fn unit_ball_radius(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("unit_ball_radius requires d >= 1".into()));
    }
    let dd = d as f64;
    // Log-space keeps Γ(d/2+1)^(1/d) finite for large d.
    Ok((log_gamma(dd / 2.0 + 1.0)? / dd).exp() / std::f64::consts::PI.sqrt())
}

/// Surface area A_d of the unit sphere in R^d: d·π^(d/2)/Γ(d/2+1).
pub fn unit_sphere_area(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("unit_sphere_area requires d >= 1".into()));
    }
    let dd = d as f64;
    Ok((dd.ln() + 0.5 * dd * std::f64::consts::PI.ln() - log_gamma(dd / 2.0 + 1.0)?).exp())
}
