//! Bessel function of the first kind J_ν for real order ν ≥ 0.
//!
//! Three evaluation routes, combined by [`bessel_j`]:
//!   * the ascending power series (safe in double precision up to x ≈ 20,
//!     where the alternating terms start cancelling catastrophically),
//!   * the Hankel large-argument expansion for low orders, extended to
//!     higher orders by upward three-term recurrence while ν stays well
//!     below x,
//!   * Miller's normalized downward recurrence for the remaining wedge
//!     (x above the series zone but below the order).
//!
//! The Krasikov-style one-term approximation with its certified x^(-3/2)
//! envelope is exposed separately ([`krasikov_terms`], [`bessel_j_krasikov`]);
//! it is a claim under test, not the accuracy path.

use crate::error::{Error, Result};
use crate::specfun::gamma::log_gamma;
use std::f64::consts::PI;

/// Cancellation-safe upper limit for the ascending series in f64.
const SERIES_SAFE_X: f64 = 20.0;
/// The Hankel expansion for orders ≤ 1.5 is well converged from here on.
const ASYMPTOTIC_MIN_X: f64 = 18.0;
/// Upward recurrence is used only while the target order stays below this
/// fraction of the argument.
const UPWARD_MAX_RATIO: f64 = 0.75;
/// Extra orders above ν when seeding Miller's downward recurrence.
const MILLER_HEADROOM: usize = 42;

/// Tuning knobs for [`bessel_j`].
#[derive(Debug, Clone, Copy)]
pub struct SpecFunConfig {
    /// Truncation limit for the ascending power series.
    pub series_terms: usize,
    /// Multiplier t: the large-argument machinery may be used once
    /// x ≥ t·max(ν, 1).
    pub asymptotic_switch: f64,
    /// Target absolute error for J.
    pub abs_tol: f64,
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        Self { series_terms: 60, asymptotic_switch: 30.0, abs_tol: 1e-9 }
    }
}

impl SpecFunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.series_terms < 10 {
            return Err(Error::Config(format!(
                "series_terms must be >= 10, got {}",
                self.series_terms
            )));
        }
        if !(self.asymptotic_switch >= 1.0) {
            return Err(Error::Config(format!(
                "asymptotic_switch must be >= 1, got {}",
                self.asymptotic_switch
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::Config(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        Ok(())
    }
}

/// The factors of Krasikov's approximation for J_{d/2}(x).
#[derive(Debug, Clone, Copy)]
pub struct KrasikovTerms {
    /// c_{d,x} = sqrt(1 − (d²−1)/(4x²)).
    pub c_dx: f64,
    /// f_{d,x} = c_{d,x} + (sqrt(d²−1)/(2x))·arcsin(sqrt(d²−1)/(2x)).
    pub f_dx: f64,
    /// Certified absolute error bound x^(−3/2).
    pub envelope: f64,
}

/// Ascending power series J_ν(x) = Σ (−1)^m / (m! Γ(m+ν+1)) (x/2)^{2m+ν}.
///
/// Absolutely convergent for all x, but the partial sums cancel; callers
/// should stay below x ≈ 20 in double precision.
pub fn bessel_j_series(nu: f64, x: f64, max_terms: usize) -> Result<f64> {
    check_domain(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    // First term (x/2)^ν / Γ(ν+1) via logs to dodge overflow at large ν.
    let half = 0.5 * x;
    let mut term = (nu * half.ln() - log_gamma(nu + 1.0)?).exp();
    let q = half * half;
    let mut sum = term;
    let mut peak = term.abs();
    for m in 0..max_terms {
        let mf = m as f64;
        term *= -q / ((mf + 1.0) * (mf + nu + 1.0));
        sum += term;
        peak = peak.max(term.abs());
        if term.abs() < 1e-18 * sum.abs().max(peak * 1e-16).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(sum)
}

/// Hankel's large-argument expansion, reliable for ν ≤ 2 and x ≥ 18.
fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let omega = x - (0.5 * nu + 0.25) * PI;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1usize..=18 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() >= prev {
            break; // divergent tail reached
        }
        prev = term.abs();
        // signs follow (−1)^{k/2} on even k (into P) and (−1)^{(k−1)/2} on odd k (into Q)
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// Upward three-term recurrence from (J_f, J_{f+1}) to order ν = f + steps.
fn recur_up(j_f: f64, j_f1: f64, f: f64, x: f64, steps: usize) -> f64 {
    let mut lo = j_f;
    let mut hi = j_f1;
    let mut order = f + 1.0;
    for _ in 0..steps {
        let next = (2.0 * order / x) * hi - lo;
        lo = hi;
        hi = next;
        order += 1.0;
    }
    hi
}

/// Miller's downward recurrence for the wedge x < ν: seed two tiny values
/// well above the target order, recur down to the fractional base order,
/// and normalize against the Hankel value there.
fn miller_down(nu: f64, x: f64) -> f64 {
    let frac = nu - nu.floor();
    let total_steps = (nu - frac) as usize + MILLER_HEADROOM;
    let mut hi = 0.0_f64;
    let mut lo = 1e-280_f64;
    let mut order = frac + total_steps as f64;
    let mut at_target = 0.0;
    let want = nu - frac; // integer offset of the target above frac
    for k in (0..total_steps).rev() {
        let next = (2.0 * (order) / x) * lo - hi;
        hi = lo;
        lo = next;
        order -= 1.0;
        if k as f64 == want {
            at_target = lo;
        }
        // rescale to dodge overflow
        if lo.abs() > 1e250 {
            hi /= 1e250;
            lo /= 1e250;
            at_target /= 1e250;
        }
    }
    // lo = unnormalized J_frac, hi = unnormalized J_{frac+1}
    let base0 = hankel_asymptotic(frac, x);
    let base1 = hankel_asymptotic(frac + 1.0, x);
    let scale = if base0.abs() >= base1.abs() { base0 / lo } else { base1 / hi };
    at_target * scale
}

fn check_domain(nu: f64, x: f64) -> Result<()> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::Domain(format!("bessel_j requires nu >= 0, got {nu}")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("bessel_j requires x >= 0, got {x}")));
    }
    Ok(())
}

/// J_ν(x) for ν ≥ 0, x ≥ 0, accurate to well below `cfg.abs_tol`
/// everywhere the crate needs it (x up to 1e6, ν up to ~50).
pub fn bessel_j(nu: f64, x: f64, cfg: &SpecFunConfig) -> Result<f64> {
    check_domain(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let want_asymptotic = x >= cfg.asymptotic_switch * nu.max(1.0);
    if x <= SERIES_SAFE_X && !(want_asymptotic && x >= ASYMPTOTIC_MIN_X) {
        return bessel_j_series(nu, x, cfg.series_terms);
    }
    // Large-argument zone. Work from the fractional base order.
    let frac = nu - nu.floor();
    if nu < 2.0 {
        return Ok(hankel_asymptotic(nu, x));
    }
    if nu <= UPWARD_MAX_RATIO * x {
        let j_f = hankel_asymptotic(frac, x);
        let j_f1 = hankel_asymptotic(frac + 1.0, x);
        let steps = (nu - frac) as usize - 1;
        return Ok(recur_up(j_f, j_f1, frac, x, steps));
    }
    Ok(miller_down(nu, x))
}

/// J_ν(z) / z^ν — the kernel that stays smooth through z = 0.
///
/// Near the origin the plain J underflows as z^ν while radial transforms
/// need the ratio; the ascending series gives it directly.
pub fn bessel_j_over_pow(nu: f64, z: f64, cfg: &SpecFunConfig) -> Result<f64> {
    check_domain(nu, z)?;
    if z <= 10.0 {
        // Series for J_ν(z)/z^ν: Σ (−1)^m z^{2m} / (m! Γ(m+ν+1) 2^{2m+ν})
        let mut term = (-log_gamma(nu + 1.0)? - nu * std::f64::consts::LN_2).exp();
        let q = 0.25 * z * z;
        let mut sum = term;
        for m in 0..cfg.series_terms {
            let mf = m as f64;
            term *= -q / ((mf + 1.0) * (mf + nu + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        Ok(sum)
    } else {
        // integer orders dominate the hot transform loops; powi is much
        // cheaper than powf there
        let z_pow = if nu.fract() == 0.0 && nu <= 32.0 {
            z.powi(nu as i32)
        } else {
            z.powf(nu)
        };
        Ok(bessel_j(nu, z, cfg)? / z_pow)
    }
}

/// The exact factors of Lemma-style Krasikov approximation, valid for
/// integer d ≥ 2 and x ≥ d.
pub fn krasikov_terms(d: u32, x: f64) -> Result<KrasikovTerms> {
    if d < 2 {
        return Err(Error::Domain(format!("krasikov_terms requires d >= 2, got {d}")));
    }
    if !(x >= d as f64) {
        return Err(Error::Domain(format!(
            "krasikov_terms requires x >= d (got d={d}, x={x}); the approximation is not certified below"
        )));
    }
    let dd = d as f64;
    let s = (dd * dd - 1.0).sqrt() / (2.0 * x);
    let c_dx = (1.0 - s * s).sqrt();
    let f_dx = c_dx + s * s.asin();
    Ok(KrasikovTerms { c_dx, f_dx, envelope: x.powf(-1.5) })
}

/// The Krasikov one-term approximation of J_{d/2}(x):
/// sqrt(2/(π c x)) · cos(−(d+1)π/4 + f·x), with |error| ≤ x^(−3/2).
pub fn bessel_j_krasikov(d: u32, x: f64) -> Result<f64> {
    let t = krasikov_terms(d, x)?;
    let phase = -((d as f64 + 1.0) * PI / 4.0) + t.f_dx * x;
    Ok((2.0 / (PI * t.c_dx * x)).sqrt() * phase.cos())
}
