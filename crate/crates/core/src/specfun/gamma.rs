//! Log-Gamma via the Lanczos approximation (g = 7, 9 coefficients).

use crate::error::{Error, Result};

/// Lanczos coefficients for g = 7, n = 9 (Godfrey's set).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_78;

/// Natural log of the Gamma function for positive arguments.
///
/// Absolute error below 1e-12 on [0.5, 200]; arguments in (0, 0.5) go
/// through the reflection formula.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires z > 0, got {z}")));
    }
    if z < 0.5 {
        // ln Γ(z) = ln(π / sin(πz)) − ln Γ(1 − z)
        let reflected = lanczos(1.0 - z);
        return Ok((std::f64::consts::PI / (std::f64::consts::PI * z).sin()).ln() - reflected);
    }
    Ok(lanczos(z))
}

fn lanczos(z: f64) -> f64 {
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z - 1.0 + i as f64);
    }
    let t = z + 6.5; // z − 1 + g + 0.5
    LN_SQRT_2PI + (z - 0.5) * t.ln() - t + acc.ln()
}
