//! Univariate approximators in the Assumption form
//! h(x) = a + Σ α_i σ(β_i x − γ_i).
//!
//! The ReLU builder is the constructive interpolation argument: knots at
//! multiples of δ/L, coefficients the successive slope differences. The
//! threshold builder is the floor staircase. Both certify the sup error
//! on a grid of spacing δ/(10L) before returning.

use super::{Activation, UnivariateApproximator, UnivariateTerm};
use crate::error::{Error, Result};

/// Piecewise-linear interpolant through (knots, values) as a ReLU
/// combination, constant outside the knot range. `a` is the left constant
/// and each α is a slope change, so |α_i| ≤ 2·max-slope automatically.
pub fn pl_from_knots(knots: &[f64], values: &[f64]) -> Result<UnivariateApproximator> {
    if knots.len() != values.len() || knots.is_empty() {
        return Err(Error::Config("pl_from_knots needs matching nonempty knots/values".into()));
    }
    if knots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("pl_from_knots needs strictly increasing knots".into()));
    }
    let mut terms = Vec::with_capacity(knots.len());
    let mut prev_slope = 0.0;
    for i in 0..knots.len() - 1 {
        let slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
        let change = slope - prev_slope;
        if change != 0.0 {
            terms.push(UnivariateTerm { alpha: change, beta: 1.0, gamma: knots[i] });
        }
        prev_slope = slope;
    }
    if prev_slope != 0.0 {
        terms.push(UnivariateTerm {
            alpha: -prev_slope,
            beta: 1.0,
            gamma: knots[knots.len() - 1],
        });
    }
    Ok(UnivariateApproximator { a: values[0], terms })
}

/// Floor staircase through (knots, values) as a threshold combination:
/// `h(x) = values[i]` on `[knots[i], knots[i+1])`, constant outside.
pub fn staircase_from_knots(knots: &[f64], values: &[f64]) -> Result<UnivariateApproximator> {
    if knots.len() != values.len() || knots.is_empty() {
        return Err(Error::Config("staircase needs matching nonempty knots/values".into()));
    }
    if knots.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("staircase needs strictly increasing knots".into()));
    }
    let mut terms = Vec::with_capacity(knots.len());
    for i in 1..knots.len() {
        let step = values[i] - values[i - 1];
        if step != 0.0 {
            terms.push(UnivariateTerm { alpha: step, beta: 1.0, gamma: knots[i] });
        }
    }
    Ok(UnivariateApproximator { a: values[0], terms })
}

fn check_inputs(l: f64, r: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be > 0, got {delta}")));
    }
    if !(l >= 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!("Lipschitz bound must be >= 0, got {l}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("support radius must be >= 0, got {r}")));
    }
    Ok(())
}

/// Certify sup|f − h| ≤ budget on a grid of spacing δ/(10L); the grid plus
/// both functions' Lipschitz bounds covers the gaps.
fn certify(
    f: &dyn Fn(f64) -> f64,
    approx: &UnivariateApproximator,
    act: &Activation,
    r_eff: f64,
    l: f64,
    delta: f64,
    budget: f64,
) -> Result<f64> {
    let spacing = if l > 0.0 { delta / (10.0 * l) } else { r_eff.max(1.0) / 100.0 };
    let lo = -r_eff - 2.0 * spacing;
    let hi = r_eff + 2.0 * spacing;
    let steps = (((hi - lo) / spacing).ceil() as usize).clamp(16, 40_000_000);
    let mut worst = 0.0f64;
    for k in 0..=steps {
        let x = lo + (hi - lo) * k as f64 / steps as f64;
        let err = (f(x) - approx.value(act, x)).abs();
        worst = worst.max(err);
    }
    if worst > budget {
        return Err(Error::Verification(format!(
            "builder missed its target: measured sup error {worst} > {budget}"
        )));
    }
    Ok(worst)
}

/// The constructive ReLU builder: for L-Lipschitz f constant outside
/// [−R, R], a piecewise-linear interpolant at knots iδ/L (R rounded up to
/// a knot multiple, at most doubling it) with width ≤ 3RL/δ for RL ≥ 3δ
/// and |α_i| ≤ 2L always. The trivial case 2RL < δ returns the constant
/// f(−R) with width 0.
pub fn build_univariate_relu(
    f: &dyn Fn(f64) -> f64,
    l: f64,
    r: f64,
    delta: f64,
) -> Result<UnivariateApproximator> {
    check_inputs(l, r, delta)?;
    let act = Activation::relu();
    let clamped = |x: f64| f(x.clamp(-r, r));
    if 2.0 * r * l < delta {
        let approx = UnivariateApproximator { a: clamped(-r), terms: vec![] };
        certify(&clamped, &approx, &act, r, l, delta, delta)?;
        return Ok(approx);
    }
    let m = (r * l / delta).ceil() as i64;
    let h = delta / l;
    let knots: Vec<f64> = (-m..=m).map(|i| i as f64 * h).collect();
    let values: Vec<f64> = knots.iter().map(|k| clamped(*k)).collect();
    let approx = pl_from_knots(&knots, &values)?;
    debug_assert!(approx.terms.iter().all(|t| t.alpha.abs() <= 2.0 * l * (1.0 + 1e-12)));
    certify(&clamped, &approx, &act, m as f64 * h, l, delta, delta)?;
    Ok(approx)
}

/// The threshold staircase: values sampled at knots iδ/L, one step per
/// value change, so width ≤ 2·ceil(RL/δ) and |α_i| ≤ δ. Sup error ≤ δ
/// one-sidedly (the staircase lags f by at most one knot spacing).
pub fn build_univariate_threshold(
    f: &dyn Fn(f64) -> f64,
    l: f64,
    r: f64,
    delta: f64,
) -> Result<UnivariateApproximator> {
    check_inputs(l, r, delta)?;
    let act = Activation::threshold();
    let clamped = |x: f64| f(x.clamp(-r, r));
    if 2.0 * r * l < delta {
        let approx = UnivariateApproximator { a: clamped(-r), terms: vec![] };
        certify(&clamped, &approx, &act, r, l, delta, delta)?;
        return Ok(approx);
    }
    let m = (r * l / delta).ceil() as i64;
    let h = delta / l;
    let knots: Vec<f64> = (-m..=m).map(|i| i as f64 * h).collect();
    let values: Vec<f64> = knots.iter().map(|k| clamped(*k)).collect();
    let approx = staircase_from_knots(&knots, &values)?;
    // the lag error is tight at δ exactly; allow the grid to see it
    certify(&clamped, &approx, &act, m as f64 * h, l, delta, delta * (1.0 + 1e-9))?;
    Ok(approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn zero_function_gives_width_zero() {
        let approx = build_univariate_relu(&|_| 0.0, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(approx.width(), 0);
        assert_eq!(approx.a, 0.0);
    }

    #[test]
    fn trivial_case_small_variation() {
        // 2RL < δ → the constant approximator at f(−R)
        let approx = build_univariate_relu(&|x| 5.0 + 0.01 * x, 0.01, 1.0, 0.1).unwrap();
        assert_eq!(approx.width(), 0);
        assert!((approx.a - 4.99).abs() < 1e-12);
    }

    #[test]
    fn clipped_square_example() {
        // f(x) = min(x², 1), L = 2, R = 1, δ = 0.5: knots at multiples of
        // 0.25, width ≤ 12, sup error ≤ 0.5 on a dense grid.
        let f = |x: f64| (x * x).min(1.0);
        let approx = build_univariate_relu(&f, 2.0, 1.0, 0.5).unwrap();
        assert!(approx.width() <= 12);
        let act = Activation::relu();
        let mut worst = 0.0f64;
        for k in 0..=10_000 {
            let x = -2.0 + 4.0 * k as f64 / 10_000.0;
            worst = worst.max((f(x.clamp(-1.0, 1.0)) - approx.value(&act, x)).abs());
        }
        assert!(worst <= 0.5, "sup error {worst}");
        for t in &approx.terms {
            assert!(t.alpha.abs() <= 4.0 + 1e-12, "|alpha| must be <= 2L");
            assert!((t.gamma / 0.25).round() * 0.25 - t.gamma == 0.0, "knots at multiples of δ/L");
        }
    }

    #[test]
    fn random_lipschitz_functions_meet_contract() {
        // randomized piecewise-linear L-Lipschitz targets
        let act = Activation::relu();
        let mut rng = stream_rng(2024, 0);
        for _ in 0..60 {
            let l: f64 = rng.gen_range(0.2..8.0);
            let r: f64 = rng.gen_range(0.3..4.0);
            let ratio: f64 = 10f64.powf(rng.gen_range(0.55..2.2)); // RL/δ ∈ [3.5, ~160]
            let delta = r * l / ratio;
            // random PL target with slopes in [−L, L], constant outside [−R, R]
            let kink_count = rng.gen_range(2..8);
            let mut kinks: Vec<f64> = (0..kink_count).map(|_| rng.gen_range(-r..r)).collect();
            kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            kinks.dedup();
            let mut vals = vec![rng.gen_range(-1.0..1.0)];
            for w in kinks.windows(2) {
                let span = w[1] - w[0];
                let slope: f64 = rng.gen_range(-l..l);
                let prev = *vals.last().unwrap();
                vals.push(prev + slope * span);
            }
            let kinks2 = kinks.clone();
            let target = move |x: f64| -> f64 {
                if kinks2.is_empty() {
                    return 0.0;
                }
                if x <= kinks2[0] {
                    return vals[0];
                }
                if x >= *kinks2.last().unwrap() {
                    return *vals.last().unwrap();
                }
                let i = kinks2.partition_point(|k| *k <= x) - 1;
                let t = (x - kinks2[i]) / (kinks2[i + 1] - kinks2[i]);
                vals[i] + t * (vals[i + 1] - vals[i])
            };
            let approx = build_univariate_relu(&target, l, r, delta).unwrap();
            assert!(
                (approx.width() as f64) <= 3.0 * r * l / delta,
                "width {} > 3RL/δ = {}",
                approx.width(),
                3.0 * r * l / delta
            );
            let mut worst = 0.0f64;
            for k in 0..=4000 {
                let x = -1.5 * r + 3.0 * r * k as f64 / 4000.0;
                worst = worst.max((target(x.clamp(-r, r)) - approx.value(&act, x)).abs());
            }
            assert!(worst <= delta, "sup error {worst} > {delta}");
            assert!(approx.terms.iter().all(|t| t.alpha.abs() <= 2.0 * l * (1.0 + 1e-9)));
        }
    }

    #[test]
    fn threshold_constant_and_staircase() {
        // constant target: the offset a carries it, width stays ≤ 1
        let approx = build_univariate_threshold(&|_| 3.25, 1.0, 1.0, 0.5).unwrap();
        assert!(approx.width() <= 1);
        let act = Activation::threshold();
        assert_eq!(approx.value(&act, -10.0), 3.25);
        assert_eq!(approx.value(&act, 10.0), 3.25);

        // clipped identity: ≤ 8 steps at δ = 0.25, sup error ≤ 0.25
        let f = |x: f64| x.clamp(-1.0, 1.0);
        let approx = build_univariate_threshold(&f, 1.0, 1.0, 0.25).unwrap();
        assert!(approx.width() <= 8, "width {}", approx.width());
        let mut worst = 0.0f64;
        for k in 0..=8000 {
            let x = -2.0 + 4.0 * k as f64 / 8000.0;
            worst = worst.max((f(x) - approx.value(&act, x)).abs());
        }
        assert!(worst <= 0.25 * (1.0 + 1e-9), "sup error {worst}");
        // width formula: ≤ 2RL/δ + 1
        assert!((approx.width() as f64) <= 2.0 * 1.0 * 1.0 / 0.25 + 1.0);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(build_univariate_relu(&|x| x, 1.0, 1.0, 0.0).is_err());
        assert!(build_univariate_relu(&|x| x, 1.0, 1.0, -0.5).is_err());
        assert!(build_univariate_threshold(&|x| x, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn pl_helper_reproduces_knot_values() {
        let knots = [-1.0, -0.25, 0.5, 2.0];
        let values = [2.0, -1.0, 0.5, 0.5];
        let approx = pl_from_knots(&knots, &values).unwrap();
        let act = Activation::relu();
        for (k, v) in knots.iter().zip(&values) {
            assert!((approx.value(&act, *k) - v).abs() < 1e-12);
        }
        // constant outside
        assert!((approx.value(&act, -50.0) - 2.0).abs() < 1e-12);
        assert!((approx.value(&act, 50.0) - 0.5).abs() < 1e-12);
        // midpoint linearity
        assert!((approx.value(&act, 0.125) - (-0.25)).abs() < 1e-12);
    }
}
