//! One-dimensional panel quadrature with a two-level refinement estimate.
//!
//! Panels are laid out inside caller-supplied segments so integrand
//! breakpoints (interval edges, ramp corners) always coincide with panel
//! boundaries. The error estimate is the difference between two
//! refinement levels; callers decide whether to treat a miss as fatal.

use crate::error::{Error, Result};

/// Outcome of an adaptive panel integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// |I_fine − I_coarse| from the last two refinement levels.
    pub error_estimate: f64,
    /// Total integrand evaluations spent.
    pub nodes: usize,
}

/// Per-panel rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelRule {
    CompositeSimpson,
    GaussLegendre { order: usize },
}

impl Default for PanelRule {
    fn default() -> Self {
        PanelRule::GaussLegendre { order: 8 }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs n >= 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn panel_integral(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rule: PanelRule,
    gl: Option<&(Vec<f64>, Vec<f64>)>,
    nodes_spent: &mut usize,
) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    match rule {
        PanelRule::CompositeSimpson => {
            *nodes_spent += 3;
            (b - a) / 6.0 * (f(a) + 4.0 * f(mid) + f(b))
        }
        PanelRule::GaussLegendre { .. } => {
            let (xs, ws) = gl.expect("gl table");
            *nodes_spent += xs.len();
            let mut acc = 0.0;
            for (x, w) in xs.iter().zip(ws) {
                acc += w * f(mid + half * x);
            }
            acc * half
        }
    }
}

fn level_integral(
    f: &mut dyn FnMut(f64) -> f64,
    segments: &[(f64, f64)],
    panels_per_unit: f64,
    rule: PanelRule,
    gl: Option<&(Vec<f64>, Vec<f64>)>,
    nodes_spent: &mut usize,
) -> f64 {
    let mut acc = 0.0;
    for &(a, b) in segments {
        if b <= a {
            continue;
        }
        let n = ((b - a) * panels_per_unit).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == n { b } else { lo + h };
            acc += panel_integral(f, lo, hi, rule, gl, nodes_spent);
        }
    }
    acc
}

/// Integrate `f` over the union of `segments`, starting from
/// `panels_per_unit` panels per unit length and doubling until two
/// consecutive levels agree to `rel_tol` (relative to the finer value,
/// with `abs_floor` guarding genuinely tiny integrals).
pub fn integrate_segments(
    mut f: impl FnMut(f64) -> f64,
    segments: &[(f64, f64)],
    panels_per_unit: f64,
    rule: PanelRule,
    rel_tol: f64,
    abs_floor: f64,
    max_doublings: usize,
) -> Result<QuadResult> {
    let gl = match rule {
        PanelRule::GaussLegendre { order } => Some(gauss_legendre(order.clamp(2, 64))),
        PanelRule::CompositeSimpson => None,
    };
    let mut nodes = 0usize;
    let mut density = panels_per_unit.max(1e-12);
    let mut coarse = level_integral(&mut f, segments, density, rule, gl.as_ref(), &mut nodes);
    for _ in 0..max_doublings {
        density *= 2.0;
        let fine = level_integral(&mut f, segments, density, rule, gl.as_ref(), &mut nodes);
        let err = (fine - coarse).abs();
        if err <= rel_tol * fine.abs().max(abs_floor) {
            return Ok(QuadResult { value: fine, error_estimate: err, nodes });
        }
        coarse = fine;
    }
    let fine = level_integral(&mut f, segments, density * 2.0, rule, gl.as_ref(), &mut nodes);
    let err = (fine - coarse).abs();
    if err <= rel_tol * fine.abs().max(abs_floor) {
        return Ok(QuadResult { value: fine, error_estimate: err, nodes });
    }
    Err(Error::ToleranceNotMet { coarse, fine, rel_tol })
}

/// Explicit node/weight list for a composite rule over [a, b], for callers
/// that scan nodes themselves instead of passing a closure.
pub fn panel_nodes(a: f64, b: f64, panels: usize, rule: PanelRule) -> (Vec<f64>, Vec<f64>) {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match rule {
        PanelRule::CompositeSimpson => {
            for k in 0..panels {
                let lo = a + k as f64 * h;
                nodes.extend_from_slice(&[lo, lo + 0.5 * h, lo + h]);
                weights.extend_from_slice(&[h / 6.0, 4.0 * h / 6.0, h / 6.0]);
            }
        }
        PanelRule::GaussLegendre { order } => {
            let (xs, ws) = gauss_legendre(order.clamp(2, 64));
            for k in 0..panels {
                let mid = a + (k as f64 + 0.5) * h;
                let half = 0.5 * h;
                for (x, w) in xs.iter().zip(&ws) {
                    nodes.push(mid + half * x);
                    weights.push(w * half);
                }
            }
        }
    }
    (nodes, weights)
}

/// Split [a, b] at the interior members of `cuts`, producing segments for
/// [`integrate_segments`].
pub fn segments_with_cuts(a: f64, b: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|c| *c > a && *c < b).collect();
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup();
    let mut segs = Vec::with_capacity(pts.len() + 1);
    let mut lo = a;
    for c in pts {
        segs.push((lo, c));
        lo = c;
    }
    segs.push((lo, b));
    segs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // order-n GL is exact for degree 2n−1
        let (xs, ws) = gauss_legendre(8);
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            acc += w * x.powi(14);
        }
        assert!((acc - 2.0 / 15.0).abs() < 1e-14);
        let sum_w: f64 = ws.iter().sum();
        assert!((sum_w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_smooth_function() {
        let r = integrate_segments(
            |x: f64| x.sin(),
            &[(0.0, std::f64::consts::PI)],
            0.5,
            PanelRule::default(),
            1e-12,
            1e-300,
            8,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn simpson_rule_works_too() {
        let r = integrate_segments(
            |x: f64| x * x,
            &[(0.0, 1.0)],
            4.0,
            PanelRule::CompositeSimpson,
            1e-10,
            1e-300,
            10,
        )
        .unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integral_converges() {
        // ∫_0^10 cos(40 x) dx = sin(400)/40
        let r = integrate_segments(
            |x: f64| (40.0 * x).cos(),
            &[(0.0, 10.0)],
            2.0,
            PanelRule::default(),
            1e-9,
            1e-300,
            12,
        )
        .unwrap();
        assert!((r.value - 400.0_f64.sin() / 40.0).abs() < 1e-9);
    }

    #[test]
    fn zero_function_is_fine() {
        let r = integrate_segments(
            |_| 0.0,
            &[(0.0, 5.0)],
            1.0,
            PanelRule::default(),
            1e-6,
            1e-300,
            3,
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn reports_tolerance_failure_with_both_estimates() {
        // A step function can't be resolved without the cut.
        let res = integrate_segments(
            |x: f64| if x < 0.333_333_333 { 1.0 } else { 0.0 },
            &[(0.0, 1.0)],
            1.0,
            PanelRule::default(),
            1e-14,
            1e-300,
            2,
        );
        match res {
            Err(Error::ToleranceNotMet { coarse, fine, .. }) => {
                assert!(coarse.is_finite() && fine.is_finite());
            }
            other => panic!("expected tolerance failure, got {other:?}"),
        }
    }

    #[test]
    fn cuts_split_and_align() {
        let segs = segments_with_cuts(0.0, 1.0, &[0.5, 0.25, 0.5, 2.0, -1.0]);
        assert_eq!(segs, vec![(0.0, 0.25), (0.25, 0.5), (0.5, 1.0)]);
        // the step function from above now integrates exactly
        let r = integrate_segments(
            |x: f64| if x < 0.25 { 1.0 } else { 0.0 },
            &segments_with_cuts(0.0, 1.0, &[0.25]),
            1.0,
            PanelRule::default(),
            1e-12,
            1e-300,
            3,
        )
        .unwrap();
        assert!((r.value - 0.25).abs() < 1e-13);
    }
}
