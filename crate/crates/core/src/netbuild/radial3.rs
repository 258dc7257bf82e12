//! Compiling a Lipschitz radial function into a 3-layer network.
//!
//! The pipeline follows the clipped-square construction: approximate
//! l(t) = min{t², R²} per coordinate so the first layer computes
//! ℓ̃(x) ≈ Σ min{x_i², R²}, then approximate s(z) = f(√z) in the second
//! layer and compose. Knot placement is curvature-aware (the generic
//! uniform δ/L spacing would cost billions of neurons at the scales the
//! verification suite runs at), but every kit still certifies the sup-error and
//! width contracts of the Assumption interface.

use super::univariate::{pl_from_knots, staircase_from_knots};
use super::{
    Activation, ActivationKind, Coupling, InnerUnit, OuterUnit, ThreeLayerNet,
    UnivariateApproximator,
};
use crate::error::{Error, Result};
use crate::hardfn::HardFunction;
use crate::radial::RadialProfile;
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::StandardNormal;

/// Hard cap on univariate kit sizes; beyond this the requested accuracy
/// is declared unreachable for the activation.
const MAX_KIT_KNOTS: usize = 3_000_000;
/// Random points used by the post-build sup-error verification.
const VERIFY_POINTS: usize = 2000;

/// Result of compiling a radial profile.
#[derive(Debug, Clone)]
pub struct RadialNetBuild {
    pub net: ThreeLayerNet,
    pub fast: FastRadialEval,
    /// max(first layer, second layer) unit count.
    pub width: usize,
    pub inner_width: usize,
    pub outer_width: usize,
    /// Per-coordinate accuracy √r·δ/(dL) used for the clipped square.
    pub coord_accuracy: f64,
    /// Largest |net − f(‖x‖)| seen on the verification sample.
    pub measured_sup_error: f64,
}

/// Sorted-knot prefix tables for O(log n) evaluation of a compiled net.
/// This is the same function as the unit-by-unit formula, just summed in
/// knot order.
#[derive(Debug, Clone)]
pub struct FastRadialEval {
    d: u32,
    kind: ActivationKind,
    coord: Vec<PrefixTable>,
    outer: PrefixTable,
    fold_const: f64,
}

/// Piecewise evaluation table for Σ α_j σ(t − γ_j): sorted knots with the
/// cumulative slope and the function value at each knot. Anchoring each
/// segment at its own knot value keeps the evaluation well-conditioned
/// (the naive `t·Σα − Σαγ` form cancels catastrophically once knots and
/// slopes get large).
#[derive(Debug, Clone)]
struct PrefixTable {
    knots: Vec<f64>,
    /// cumulative slope right of knot i (ReLU) or cumulative level at and
    /// right of knot i (threshold)
    cum: Vec<f64>,
    /// function value at knot i (ReLU only)
    value_at: Vec<f64>,
}

impl PrefixTable {
    fn build(mut pairs: Vec<(f64, f64)>, relu: bool) -> Self {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let n = pairs.len();
        let mut cum = Vec::with_capacity(n);
        let mut value_at = Vec::with_capacity(n);
        let mut slope = 0.0;
        let mut value = 0.0;
        for (i, (g, al)) in pairs.iter().enumerate() {
            if relu {
                if i > 0 {
                    value += slope * (g - pairs[i - 1].0);
                }
                value_at.push(value);
            }
            slope += al;
            cum.push(slope);
        }
        PrefixTable { knots: pairs.into_iter().map(|p| p.0).collect(), cum, value_at }
    }

    /// Σ α_j σ(t − γ_j) for the stored kind.
    fn value(&self, t: f64, kind: ActivationKind) -> f64 {
        match kind {
            ActivationKind::Relu => {
                // zero left of every knot; σ(0) = 0 makes the boundary free
                if self.knots.is_empty() || t <= self.knots[0] {
                    return 0.0;
                }
                let idx = self.knots.partition_point(|g| *g < t) - 1;
                self.value_at[idx] + self.cum[idx] * (t - self.knots[idx])
            }
            ActivationKind::Threshold => {
                let idx = self.knots.partition_point(|g| *g <= t);
                if idx == 0 {
                    0.0
                } else {
                    self.cum[idx - 1]
                }
            }
            ActivationKind::Custom => unreachable!("fast eval is never built for custom kinds"),
        }
    }

    fn max_abs_slope(&self) -> f64 {
        self.cum.iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }
}

impl FastRadialEval {
    /// Build the prefix tables from a net in compiled radial form:
    /// scaled coupling, axis-aligned unit-scale inner units, outer gains
    /// all 1 (function units) or 0 (folded constants).
    pub fn from_net(net: &ThreeLayerNet) -> Result<Self> {
        net.validate()?;
        if net.activation == ActivationKind::Custom {
            return Err(Error::Config("fast eval supports relu/threshold only".into()));
        }
        let relu = net.activation == ActivationKind::Relu;
        let (col, row_gain) = match &net.coupling {
            Coupling::Scaled { col, row_gain } => (col, row_gain),
            Coupling::Dense(_) => {
                return Err(Error::Config("fast eval needs the scaled coupling form".into()))
            }
        };
        let mut per_coord: Vec<Vec<(f64, f64)>> = vec![Vec::new(); net.d as usize];
        for (unit, alpha) in net.inner.iter().zip(col) {
            let mut axis = None;
            for (c, w) in unit.w.iter().enumerate() {
                if *w == 1.0 && axis.is_none() {
                    axis = Some(c);
                } else if *w != 0.0 {
                    return Err(Error::Config(
                        "inner units must be axis-aligned with unit scale".into(),
                    ));
                }
            }
            let axis = axis
                .ok_or_else(|| Error::Config("inner unit with all-zero weights".into()))?;
            per_coord[axis].push((-unit.b, *alpha)); // σ(x_c + b) = σ(x_c − γ), γ = −b
        }
        let mut outer_pairs = Vec::new();
        let mut fold_const = 0.0;
        let act = Activation::from_kind(net.activation)?;
        for (unit, gain) in net.outer.iter().zip(row_gain) {
            if *gain == 1.0 {
                outer_pairs.push((-unit.c, unit.u)); // σ(z + c) = σ(z − γ), γ = −c
            } else if *gain == 0.0 {
                fold_const += unit.u * act.value(unit.c);
            } else {
                return Err(Error::Config("outer gains must be 0 or 1 for fast eval".into()));
            }
        }
        Ok(FastRadialEval {
            d: net.d,
            kind: net.activation,
            coord: per_coord.into_iter().map(|p| PrefixTable::build(p, relu)).collect(),
            outer: PrefixTable::build(outer_pairs, relu),
            fold_const,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d as usize);
        let mut combo = 0.0;
        for (table, xi) in self.coord.iter().zip(x) {
            combo += table.value(*xi, self.kind);
        }
        self.outer.value(combo, self.kind) + self.fold_const
    }
}

fn kit_beta_is_one(kit: &UnivariateApproximator) -> bool {
    kit.terms.iter().all(|t| t.beta == 1.0)
}

/// Clipped-square kit for one coordinate: approximate min{t², R²} on
/// [−R, R] to absolute accuracy `eps`.
fn clipped_square_kit(r_outer: f64, eps: f64, kind: ActivationKind) -> Result<UnivariateApproximator> {
    match kind {
        ActivationKind::Relu => {
            // PL interpolation error for t² at spacing h is h²/4
            let h = 2.0 * (0.9 * eps).sqrt();
            let panels = ((2.0 * r_outer / h).ceil() as usize).max(1);
            if panels + 1 > MAX_KIT_KNOTS {
                return Err(Error::Config(format!(
                    "clipped-square kit needs {panels} knots; accuracy {eps} unreachable"
                )));
            }
            let knots: Vec<f64> = (0..=panels)
                .map(|j| -r_outer + 2.0 * r_outer * j as f64 / panels as f64)
                .collect();
            let values: Vec<f64> = knots.iter().map(|t| (t * t).min(r_outer * r_outer)).collect();
            pl_from_knots(&knots, &values)
        }
        ActivationKind::Threshold => {
            // staircase lag error is (2R)·h
            let h = eps / (2.0 * r_outer);
            let steps = ((2.0 * r_outer / h).ceil() as usize).max(1);
            if steps + 1 > MAX_KIT_KNOTS {
                return Err(Error::Config(format!(
                    "threshold clipped-square kit needs {steps} steps; accuracy {eps} unreachable"
                )));
            }
            let knots: Vec<f64> = (0..=steps)
                .map(|j| -r_outer + 2.0 * r_outer * j as f64 / steps as f64)
                .collect();
            // sample at panel midpoints so the error is two-sided
            let values: Vec<f64> = knots
                .iter()
                .enumerate()
                .map(|(j, t)| {
                    let mid = if j + 1 <= steps { t + r_outer / steps as f64 } else { *t };
                    (mid * mid).min(r_outer * r_outer)
                })
                .collect();
            staircase_from_knots(&knots, &values)
        }
        ActivationKind::Custom => {
            Err(Error::Config("custom activations must supply their own builder".into()))
        }
    }
}

/// Knot set for s(z) = f(√z) on [r², R²] meeting |s̃ − s| ≤ eps.
fn norm_square_knots(
    profile: &RadialProfile,
    l_lip: f64,
    eps: f64,
    kind: ActivationKind,
) -> Result<Vec<f64>> {
    let (r0, r1) = profile.support();
    let mut base: Vec<f64> = Vec::new();
    base.push(r0 * r0);
    for b in profile.breakpoints() {
        base.push(b * b);
    }
    base.push(r1 * r1);
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    base.dedup();

    let mut knots = Vec::new();
    let lip_s = l_lip / (2.0 * r0.max(1e-12)); // true bound; r0 ≥ 1 at call sites
    for win in base.windows(2) {
        let (za, zb) = (win[0], win[1]);
        knots.push(za);
        let n_sub = if profile.piecewise_linear {
            // piece is linear in r with slope m: s'' = −m/(4 z^{3/2})
            let (ra, rb) = (za.sqrt(), zb.sqrt());
            let m = if rb > ra {
                (profile.value(rb.min(r1) * (1.0 - 1e-12))
                    - profile.value(ra.max(r0) * (1.0 + 1e-12)))
                    / (rb - ra)
            } else {
                0.0
            };
            match kind {
                ActivationKind::Relu => {
                    let curv = m.abs() / (4.0 * za.max(1e-12).powf(1.5));
                    if curv == 0.0 {
                        1
                    } else {
                        ((zb - za) / (8.0 * 0.9 * eps / curv).sqrt()).ceil().max(1.0) as usize
                    }
                }
                ActivationKind::Threshold => {
                    let slope_s = m.abs() / (2.0 * za.max(1e-12).sqrt());
                    if slope_s == 0.0 {
                        1
                    } else {
                        ((zb - za) * slope_s / eps).ceil().max(1.0) as usize
                    }
                }
                ActivationKind::Custom => return Err(Error::Config("custom builder".into())),
            }
        } else {
            match kind {
                ActivationKind::Relu => ((zb - za) * lip_s / (1.8 * eps)).ceil().max(1.0) as usize,
                ActivationKind::Threshold => {
                    ((zb - za) * lip_s / eps).ceil().max(1.0) as usize
                }
                ActivationKind::Custom => return Err(Error::Config("custom builder".into())),
            }
        };
        for j in 1..n_sub {
            knots.push(za + (zb - za) * j as f64 / n_sub as f64);
        }
        if knots.len() > MAX_KIT_KNOTS {
            return Err(Error::Config(format!(
                "norm-square kit exceeds {MAX_KIT_KNOTS} knots; accuracy unreachable"
            )));
        }
    }
    knots.push(*base.last().unwrap());
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| *a == *b);
    Ok(knots)
}

/// Compile an L-Lipschitz radial profile supported on [r, R], r ≥ 1, into
/// a 3-layer network with sup_{x ∈ R^d} |g(x) − f(‖x‖)| ≤ δ, verified on
/// random points before returning.
pub fn build_radial_3layer(
    profile: &RadialProfile,
    l_lip: f64,
    delta: f64,
    act: &Activation,
    d: u32,
) -> Result<RadialNetBuild> {
    act.validate()?;
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be > 0, got {delta}")));
    }
    if !(l_lip > 0.0) {
        return Err(Error::Domain(format!("Lipschitz bound must be > 0, got {l_lip}")));
    }
    let (r0, r1) = profile.support();
    if r0 < 1.0 {
        return Err(Error::Domain(format!(
            "support must start at r >= 1 (got {r0}); the norm-square composition needs it"
        )));
    }

    let eps_l = r0.sqrt() * delta / (d as f64 * l_lip);
    let square_kit = clipped_square_kit(r1, eps_l, act.kind)?;
    if !kit_beta_is_one(&square_kit) {
        return Err(Error::Verification("kits must use unit input scale".into()));
    }

    // s(z) = f(√z), approximated to just under δ/2
    let eps_s = 0.45 * delta;
    let z_knots = norm_square_knots(profile, l_lip, eps_s, act.kind)?;
    let s_values: Vec<f64> = z_knots.iter().map(|z| profile.value(z.sqrt())).collect();
    let s_kit = match act.kind {
        ActivationKind::Relu => pl_from_knots(&z_knots, &s_values)?,
        ActivationKind::Threshold => staircase_from_knots(&z_knots, &s_values)?,
        ActivationKind::Custom => unreachable!("rejected above"),
    };

    // assemble: first layer = d copies of the square kit
    let dd = d as usize;
    let mut inner = Vec::with_capacity(dd * square_kit.terms.len());
    let mut col = Vec::with_capacity(dd * square_kit.terms.len());
    for c in 0..dd {
        for t in &square_kit.terms {
            let mut w = vec![0.0; dd];
            w[c] = 1.0;
            inner.push(InnerUnit { w, b: -t.gamma });
            col.push(t.alpha);
        }
    }
    let inner_const = d as f64 * square_kit.a;

    let mut outer = Vec::with_capacity(s_kit.terms.len() + 1);
    let mut row_gain = Vec::with_capacity(s_kit.terms.len() + 1);
    for t in &s_kit.terms {
        outer.push(OuterUnit { u: t.alpha, c: inner_const - t.gamma });
        row_gain.push(1.0);
    }
    if s_kit.a != 0.0 {
        // simulate the constant with one extra neuron: σ(σ(0)·0 + 1) = 1
        // for both supported activations
        outer.push(OuterUnit { u: s_kit.a, c: 1.0 });
        row_gain.push(0.0);
    }

    let net = ThreeLayerNet {
        d,
        activation: act.kind,
        inner,
        coupling: Coupling::Scaled { col, row_gain },
        outer,
    };
    net.validate()?;
    let fast = FastRadialEval::from_net(&net)?;

    // sup-error verification on random points (plus the origin and a few
    // radii beyond the support)
    let mut rng = stream_rng(0x7a31_55e1, d as u64);
    let mut worst = 0.0f64;
    let mut check = |x: &[f64]| {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let err = (fast.eval(x) - profile.value(r)).abs();
        if err > worst {
            worst = err;
        }
    };
    check(&vec![0.0; dd]);
    for k in 0..VERIFY_POINTS {
        let radius = if k % 8 == 7 {
            rng.gen_range(r1..2.0 * r1) // outside the support: net must stay ≈ 0
        } else {
            rng.gen_range(0.0..1.2 * r1)
        };
        let mut x: Vec<f64> = (0..dd).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
        for c in x.iter_mut() {
            *c *= radius / norm;
        }
        check(&x);
    }
    if worst > delta * (1.0 + 1e-9) {
        return Err(Error::Verification(format!(
            "compiled net misses its sup-error target: {worst} > {delta}"
        )));
    }

    // formula path and table path must be the same function; the
    // agreement tolerance scales with the summation conditioning
    // (outer slope times the norm-square magnitude)
    let outer_slope = fast.outer.max_abs_slope();
    let agree_tol = 1e-12 * (1.0 + outer_slope * d as f64 * r1 * r1).max(1.0);
    let act_check = act.clone();
    for k in 0..6 {
        let radius = r0 + (r1 - r0) * k as f64 / 5.0;
        let mut x: Vec<f64> = (0..dd).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
        for c in x.iter_mut() {
            *c *= radius / norm;
        }
        let by_formula = net.eval(&act_check, &x)?;
        let by_table = fast.eval(&x);
        if (by_formula - by_table).abs() > agree_tol * by_formula.abs().max(1.0) {
            return Err(Error::Verification(format!(
                "fast path diverges from the formula: {by_table} vs {by_formula} (tol {agree_tol:.2e})"
            )));
        }
    }

    let inner_width = net.inner.len();
    let outer_width = net.outer.len();
    Ok(RadialNetBuild {
        width: inner_width.max(outer_width),
        inner_width,
        outer_width,
        coord_accuracy: eps_l,
        measured_sup_error: worst,
        net,
        fast,
    })
}

/// The convenience constructor for the hard-function target: compile the
/// surrogate with R = 2α√d, r = α√d, L = the surrogate's slope.
pub fn build_prop_approx_net(
    hard: &HardFunction,
    delta: f64,
    act: &Activation,
) -> Result<RadialNetBuild> {
    build_radial_3layer(
        &hard.surrogate_profile(),
        hard.surrogate_lipschitz,
        delta,
        act,
        hard.family.d,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardfn::{build_family, select_signs, HardFunction};
    use crate::radial::QuadratureSpec;

    fn trapezoid_profile() -> RadialProfile {
        // a single trapezoid on [2, 4]: ramps of width 0.5
        RadialProfile::new((2.0, 4.0), |r| {
            let up = (r - 2.0) / 0.5;
            let down = (4.0 - r) / 0.5;
            up.min(down).min(1.0).max(0.0)
        })
        .unwrap()
        .with_breakpoints(vec![2.5, 3.5])
        .with_lipschitz(2.0)
        .piecewise_linear()
    }

    #[test]
    fn zero_profile_compiles_to_near_zero_net() {
        let p = RadialProfile::new((1.5, 3.0), |_| 0.0).unwrap().piecewise_linear();
        let act = Activation::relu();
        let built = build_radial_3layer(&p, 1.0, 0.05, &act, 3).unwrap();
        let mut rng = stream_rng(5, 0);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            assert!(built.fast.eval(&x).abs() <= 0.05);
        }
    }

    #[test]
    fn trapezoid_relu_compile_meets_sup_error() {
        let p = trapezoid_profile();
        let act = Activation::relu();
        let built = build_radial_3layer(&p, 2.0, 0.05, &act, 4).unwrap();
        assert!(built.measured_sup_error <= 0.05);
        // direct check on fresh random points
        let mut rng = stream_rng(17, 1);
        let mut worst = 0.0f64;
        for _ in 0..3000 {
            let radius: f64 = rng.gen_range(0.0..6.0);
            let mut x: Vec<f64> =
                (0..4).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let n = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
            for c in x.iter_mut() {
                *c *= radius / n;
            }
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            worst = worst.max((built.fast.eval(&x) - p.value(r)).abs());
        }
        assert!(worst <= 0.05 * (1.0 + 1e-6), "sup error {worst}");
        // width respects the compiler's bound 2 c_σ d² R² L/(√r δ) + 1
        let bound = 2.0 * 3.0 * 16.0 * 16.0 * 2.0 / (2.0f64.sqrt() * 0.05) + 1.0;
        assert!((built.width as f64) <= bound, "width {} > {bound}", built.width);
    }

    #[test]
    fn trapezoid_threshold_compile_meets_sup_error() {
        let p = trapezoid_profile();
        let act = Activation::threshold();
        let built = build_radial_3layer(&p, 2.0, 0.1, &act, 2).unwrap();
        let mut rng = stream_rng(23, 1);
        let mut worst = 0.0f64;
        for _ in 0..2000 {
            let radius: f64 = rng.gen_range(0.0..5.0);
            let mut x: Vec<f64> =
                (0..2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let n = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
            for c in x.iter_mut() {
                *c *= radius / n;
            }
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            worst = worst.max((built.fast.eval(&x) - p.value(r)).abs());
        }
        assert!(worst <= 0.1 * (1.0 + 1e-6), "threshold sup error {worst}");
    }

    #[test]
    fn net_equals_defining_composition() {
        // the assembled 3-layer net is literally s̃(Σ_i l̃(x_i))
        let p = trapezoid_profile();
        let act = Activation::relu();
        let built = build_radial_3layer(&p, 2.0, 0.1, &act, 3).unwrap();
        let eps_l = built.coord_accuracy;
        let square = clipped_square_kit(4.0, eps_l, ActivationKind::Relu).unwrap();
        let z_knots = norm_square_knots(&p, 2.0, 0.045, ActivationKind::Relu).unwrap();
        let s_vals: Vec<f64> = z_knots.iter().map(|z| p.value(z.sqrt())).collect();
        let s_kit = pl_from_knots(&z_knots, &s_vals).unwrap();
        let mut rng = stream_rng(31, 2);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.5..4.5)).collect();
            let ell: f64 = x.iter().map(|xi| square.value(&act, *xi)).sum();
            let composed = s_kit.value(&act, ell);
            let direct = built.net.eval(&act, &x).unwrap();
            assert!(
                (composed - direct).abs() <= 1e-12 * composed.abs().max(1.0),
                "composition {composed} vs net {direct}"
            );
        }
    }

    #[test]
    fn radial_symmetry_up_to_delta() {
        let p = trapezoid_profile();
        let act = Activation::relu();
        let delta = 0.05;
        let built = build_radial_3layer(&p, 2.0, delta, &act, 4).unwrap();
        let mut rng = stream_rng(41, 0);
        for _ in 0..500 {
            let radius: f64 = rng.gen_range(0.0..5.0);
            let mut pts = Vec::new();
            for _ in 0..2 {
                let mut x: Vec<f64> =
                    (0..4).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let n = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
                for c in x.iter_mut() {
                    *c *= radius / n;
                }
                pts.push(built.fast.eval(&x));
            }
            assert!((pts[0] - pts[1]).abs() <= 2.0 * delta);
        }
    }

    #[test]
    fn rejects_support_below_one() {
        let p = RadialProfile::new((0.5, 2.0), |_| 0.0).unwrap();
        let act = Activation::relu();
        assert!(build_radial_3layer(&p, 1.0, 0.1, &act, 2).is_err());
    }

    #[test]
    fn prop_approx_net_small_config() {
        // small hard function end to end
        let fam = build_family(3, 2.0, 40).unwrap();
        let signs = select_signs(&fam, 2, &QuadratureSpec::default(), 3).unwrap();
        let h = HardFunction::new(fam, signs).unwrap();
        let act = Activation::relu();
        let delta = 0.1;
        let built = build_prop_approx_net(&h, delta, &act).unwrap();
        // net close to surrogate everywhere; surrogate equals g̃ except on ramps
        let mut rng = stream_rng(55, 9);
        for _ in 0..500 {
            let radius: f64 = rng.gen_range(0.0..1.3 * h.family.support().1);
            let mut x: Vec<f64> =
                (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let n = x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
            for c in x.iter_mut() {
                *c *= radius / n;
            }
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let err = (built.fast.eval(&x) - h.eval_surrogate(r)).abs();
            assert!(err <= delta * (1.0 + 1e-6), "net vs surrogate error {err}");
            // range stays within [−1−δ, 1+δ]
            assert!(built.fast.eval(&x).abs() <= 1.0 + delta + 1e-9);
        }
        // width bound of the convenience constructor: 8 c_σ α^{3/2} N d^{11/4} / δ + 1
        let (d, alpha, n) = (3.0f64, 2.0f64, 40.0f64);
        let bound = 8.0 * 3.0 * alpha.powf(1.5) * n * d.powf(2.75) / delta + 1.0;
        assert!((built.width as f64) <= bound);
    }
}
