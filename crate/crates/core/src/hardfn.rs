//! The hard radial target: the Δ_i partition of [α√d, 2α√d], the good/bad
//! classification, signed shell indicators, the Lipschitz trapezoid
//! surrogate, and random sign selection maximizing high-frequency mass.

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, panel_nodes};
use crate::radial::{QuadratureSpec, RadialProfile};
use crate::rng::stream_rng;
use crate::specfun::{
    bessel_j, bessel_j_over_pow, unit_ball_radius, unit_sphere_area, DEFAULT_SPECFUN,
};
use rand::Rng;
use rayon::prelude::*;

/// Grid points per interval used by the good/bad classification.
const CLASS_GRID: usize = 24;
/// Gauss-Legendre order for per-interval integrals in the batched scans.
const SHELL_GL_ORDER: usize = 6;

/// Default interval count: ceil(100 · α · d^{3/2}).
pub fn default_interval_count(d: u32, alpha: f64) -> usize {
    (100.0 * alpha * (d as f64).powf(1.5)).ceil() as usize
}

/// The Δ_i partition of [α√d, 2α√d] with per-interval good flags.
/// Δ_i is good iff J²_{d/2}(2π R_d x) ≥ 1/(80π R_d x) on the whole
/// interval (checked on a CLASS_GRID-point grid including endpoints).
#[derive(Debug, Clone)]
pub struct IntervalFamily {
    pub d: u32,
    pub alpha: f64,
    pub n: usize,
    pub r_d: f64,
    good: Vec<bool>,
}

impl IntervalFamily {
    pub fn support(&self) -> (f64, f64) {
        let a = self.alpha * (self.d as f64).sqrt();
        (a, 2.0 * a)
    }

    pub fn width(&self) -> f64 {
        self.alpha * (self.d as f64).sqrt() / self.n as f64
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        let a = self.alpha * (self.d as f64).sqrt();
        let w = self.width();
        (a + i as f64 * w, a + (i + 1) as f64 * w)
    }

    pub fn is_good(&self, i: usize) -> bool {
        self.good[i]
    }

    pub fn good_flags(&self) -> &[bool] {
        &self.good
    }

    pub fn good_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.good[i]).collect()
    }

    pub fn good_count(&self) -> usize {
        self.good.iter().filter(|g| **g).count()
    }

    pub fn good_fraction(&self) -> f64 {
        self.good_count() as f64 / self.n as f64
    }

    /// Index of the interval containing r under the half-open [lo, hi)
    /// convention; shared edges belong to the interval they open.
    pub fn interval_index(&self, r: f64) -> Option<usize> {
        let (a, b) = self.support();
        if r < a || r >= b {
            return None;
        }
        let k = ((r - a) / self.width()) as usize;
        Some(k.min(self.n - 1))
    }
}

/// Classify the partition. The inequality of the definition is evaluated
/// on the grid exactly as stated; zeros of J produce wide bad bands, so
/// grid classification is stable at the default resolutions.
pub fn build_family(d: u32, alpha: f64, n: usize) -> Result<IntervalFamily> {
    if d < 2 {
        return Err(Error::Domain(format!("build_family requires d >= 2, got {d}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!("build_family requires alpha >= 1, got {alpha}")));
    }
    if n < 1 {
        return Err(Error::Domain("build_family requires N >= 1".into()));
    }
    let r_d = unit_ball_radius(d)?;
    let nu = d as f64 / 2.0;
    let two_pi_rd = 2.0 * std::f64::consts::PI * r_d;
    let a = alpha * (d as f64).sqrt();
    let w = a / n as f64;
    let good: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lo = a + i as f64 * w;
            for k in 0..CLASS_GRID {
                let x = lo + w * k as f64 / (CLASS_GRID - 1) as f64;
                let j = bessel_j(nu, two_pi_rd * x, &DEFAULT_SPECFUN).expect("valid domain");
                if j * j * 80.0 * std::f64::consts::PI * r_d * x < 1.0 {
                    return false;
                }
            }
            true
        })
        .collect();
    Ok(IntervalFamily { d, alpha, n, r_d, good })
}

/// One choice of shell signs together with the high-frequency mass it
/// achieved.
#[derive(Debug, Clone)]
pub struct SignVector {
    /// ±1 per interval (entries at bad intervals are carried but unused).
    pub eps: Vec<i8>,
    /// Achieved ∫_{(2R_d B)^C} transform(Σ ε_i g_i φ)² — total minus
    /// low-frequency mass.
    pub high_freq_mass: f64,
    pub seed: u64,
}

/// The assembled hard function: family, signs, and the surrogate ramp
/// slope (per unit radius).
#[derive(Debug, Clone)]
pub struct HardFunction {
    pub family: IntervalFamily,
    pub signs: SignVector,
    pub surrogate_lipschitz: f64,
}

impl HardFunction {
    pub fn new(family: IntervalFamily, signs: SignVector) -> Result<Self> {
        if signs.eps.len() != family.n {
            return Err(Error::Config(format!(
                "sign vector length {} does not match N = {}",
                signs.eps.len(),
                family.n
            )));
        }
        if !signs.eps.iter().all(|e| *e == 1 || *e == -1) {
            return Err(Error::Config("sign entries must be ±1".into()));
        }
        let ramp = ramp_width(&family);
        Ok(Self { family, signs, surrogate_lipschitz: 1.0 / ramp })
    }

    /// g̃ at radius r: ε_i on good Δ_i, else 0.
    pub fn eval_gtilde(&self, r: f64) -> f64 {
        match self.family.interval_index(r) {
            Some(i) if self.family.is_good(i) => self.signs.eps[i] as f64,
            _ => 0.0,
        }
    }

    /// g̃ at a point of R^d.
    pub fn eval_gtilde_point(&self, x: &[f64]) -> f64 {
        self.eval_gtilde(norm(x))
    }

    /// The Lipschitz trapezoid surrogate: ε_i·min{1, slope·dist(r, Δ_i^C)}
    /// on good intervals, 0 elsewhere. Continuous, range in [−1, 1],
    /// supported on [α√d, 2α√d].
    pub fn eval_surrogate(&self, r: f64) -> f64 {
        match self.family.interval_index(r) {
            Some(i) if self.family.is_good(i) => {
                let (lo, hi) = self.family.interval(i);
                let dist = (r - lo).min(hi - r).max(0.0);
                self.signs.eps[i] as f64 * (self.surrogate_lipschitz * dist).min(1.0)
            }
            _ => 0.0,
        }
    }

    pub fn eval_surrogate_point(&self, x: &[f64]) -> f64 {
        self.eval_surrogate(norm(x))
    }

    /// g̃ as a radial profile (jumps at every interval edge).
    pub fn gtilde_profile(&self) -> RadialProfile {
        let me = self.clone();
        let (a, b) = self.family.support();
        let edges: Vec<f64> = (1..self.family.n).map(|i| self.family.interval(i).0).collect();
        RadialProfile::new((a, b), move |r| me.eval_gtilde(r))
            .expect("valid support")
            .with_breakpoints(edges)
    }

    /// The surrogate as a piecewise-linear radial profile with kinks at
    /// interval edges and ramp corners.
    pub fn surrogate_profile(&self) -> RadialProfile {
        let me = self.clone();
        let (a, b) = self.family.support();
        let ramp = 1.0 / self.surrogate_lipschitz;
        let mut pts = Vec::with_capacity(4 * self.family.n);
        for i in 0..self.family.n {
            let (lo, hi) = self.family.interval(i);
            pts.push(lo);
            if self.family.is_good(i) {
                pts.push(lo + ramp);
                pts.push(hi - ramp);
            }
        }
        RadialProfile::new((a, b), move |r| me.eval_surrogate(r))
            .expect("valid support")
            .with_breakpoints(pts)
            .with_lipschitz(self.surrogate_lipschitz)
            .piecewise_linear()
    }

    /// The ramp sub-intervals where surrogate and g̃ differ.
    pub fn ramp_segments(&self) -> Vec<(f64, f64)> {
        let ramp = 1.0 / self.surrogate_lipschitz;
        let mut segs = Vec::new();
        for i in self.family.good_indices() {
            let (lo, hi) = self.family.interval(i);
            segs.push((lo, lo + ramp));
            segs.push((hi - ramp, hi));
        }
        segs
    }

    /// Plain-text record: exact reproduction of the build.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# depthsep hard function v1\n");
        s.push_str(&format!("d {}\n", self.family.d));
        s.push_str(&format!("alpha {:016x}\n", self.family.alpha.to_bits()));
        s.push_str(&format!("n {}\n", self.family.n));
        s.push_str(&format!("seed {}\n", self.signs.seed));
        s.push_str(&format!("high_freq_mass {:016x}\n", self.signs.high_freq_mass.to_bits()));
        s.push_str("good ");
        s.extend(self.family.good_flags().iter().map(|g| if *g { '1' } else { '0' }));
        s.push('\n');
        s.push_str("signs ");
        s.extend(self.signs.eps.iter().map(|e| if *e > 0 { '1' } else { '0' }));
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut d = None;
        let mut alpha = None;
        let mut n = None;
        let mut seed = None;
        let mut mass = None;
        let mut good: Option<Vec<bool>> = None;
        let mut signs: Option<Vec<i8>> = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("malformed line: {line}")))?;
            match key {
                "d" => d = Some(value.parse::<u32>().map_err(bad_num)?),
                "alpha" => alpha = Some(f64::from_bits(
                    u64::from_str_radix(value, 16).map_err(bad_num)?,
                )),
                "n" => n = Some(value.parse::<usize>().map_err(bad_num)?),
                "seed" => seed = Some(value.parse::<u64>().map_err(bad_num)?),
                "high_freq_mass" => {
                    mass = Some(f64::from_bits(u64::from_str_radix(value, 16).map_err(bad_num)?))
                }
                "good" => good = Some(value.chars().map(|c| c == '1').collect()),
                "signs" => {
                    signs = Some(value.chars().map(|c| if c == '1' { 1 } else { -1 }).collect())
                }
                other => return Err(Error::Parse(format!("unknown key: {other}"))),
            }
        }
        let (d, alpha, n) = match (d, alpha, n) {
            (Some(d), Some(a), Some(n)) => (d, a, n),
            _ => return Err(Error::Parse("missing d/alpha/n".into())),
        };
        let good = good.ok_or_else(|| Error::Parse("missing good flags".into()))?;
        let eps = signs.ok_or_else(|| Error::Parse("missing signs".into()))?;
        if good.len() != n || eps.len() != n {
            return Err(Error::Parse("flag/sign length does not match n".into()));
        }
        let family = IntervalFamily { d, alpha, n, r_d: unit_ball_radius(d)?, good };
        let signs = SignVector {
            eps,
            high_freq_mass: mass.unwrap_or(f64::NAN),
            seed: seed.unwrap_or(0),
        };
        HardFunction::new(family, signs)
    }
}

fn bad_num<E: std::fmt::Display>(e: E) -> Error {
    Error::Parse(format!("bad number: {e}"))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Ramp width of the surrogate: 1/N, capped at half the interval width so
/// the trapezoid always reaches its plateau (or degenerates to a triangle
/// peaking at exactly ±1).
fn ramp_width(family: &IntervalFamily) -> f64 {
    (1.0 / family.n as f64).min(0.5 * family.width())
}

/// Per-interval masses m_i = d·∫_{Δ_i} J²_{d/2}(2π R_d r)/r dr for good
/// intervals (zeros at bad ones), each with a GL-8 vs GL-16 refinement
/// check.
pub fn per_interval_mass(family: &IntervalFamily, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let nu = family.d as f64 / 2.0;
    let two_pi_rd = 2.0 * std::f64::consts::PI * family.r_d;
    let d = family.d as f64;
    let (n8, w8) = gauss_legendre(8);
    let (n16, w16) = gauss_legendre(16);
    let eval = |i: usize, nodes: &[f64], weights: &[f64]| -> f64 {
        let (lo, hi) = family.interval(i);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let r = mid + half * x;
            let j = bessel_j(nu, two_pi_rd * r, &DEFAULT_SPECFUN).expect("valid domain");
            acc += w * d * j * j / r;
        }
        acc * half
    };
    let masses: Vec<(f64, f64)> = (0..family.n)
        .into_par_iter()
        .map(|i| {
            if family.is_good(i) {
                (eval(i, &n16, &w16), (eval(i, &n8, &w8) - eval(i, &n16, &w16)).abs())
            } else {
                (0.0, 0.0)
            }
        })
        .collect();
    let total: f64 = masses.iter().map(|m| m.0).sum();
    let err: f64 = masses.iter().map(|m| m.1).sum();
    if err > spec.rel_tol * total.abs().max(1e-12) {
        return Err(Error::ToleranceNotMet { coarse: total + err, fine: total, rel_tol: spec.rel_tol });
    }
    Ok(masses.into_iter().map(|m| m.0).collect())
}

/// ∫ (Σ ε_i g_i)² φ² = Σ_good m_i. Sign-independent because the shells
/// have disjoint supports.
pub fn mass_report(family: &IntervalFamily, spec: &QuadratureSpec) -> Result<f64> {
    Ok(per_interval_mass(family, spec)?.iter().sum())
}

/// One scan level over the w-grid: for every node, the transforms of all
/// good-interval profiles (g_i or g_i·φ), handed to the visitor in node
/// order with the combined weight qw = gl_weight · A_d · w^(d−1).
///
/// Rows are computed in parallel chunks; the visitor runs sequentially so
/// accumulation stays deterministic.
pub(crate) fn shell_transform_scan(
    family: &IntervalFamily,
    include_phi: bool,
    cutoff: f64,
    spec: &QuadratureSpec,
    level: u32,
    mut visit: impl FnMut(f64, f64, &[f64]),
) -> Result<()> {
    spec.validate()?;
    let d = family.d;
    if d < 2 {
        return Err(Error::Domain("shell transforms require d >= 2".into()));
    }
    let area = unit_sphere_area(d)?;
    let nu_t = d as f64 / 2.0 - 1.0; // transform kernel order
    let nu_phi = d as f64 / 2.0;
    let two_pi = 2.0 * std::f64::consts::PI;
    let front = two_pi * two_pi.powf(nu_t);
    let rd = family.r_d;
    let phi_scale = (two_pi * rd * rd).powf(nu_phi);
    let good_idx = family.good_indices();

    // Per-interval GL nodes; interval widths are far below both
    // oscillation scales at every supported configuration.
    let (gx, gw) = gauss_legendre(SHELL_GL_ORDER);
    let sub = {
        // subdivide if an interval spans a nontrivial fraction of the
        // fastest oscillation (1/cutoff in s from the kernel, 1/(2R_d)
        // from φ)
        let osc = cutoff.max(2.0 * rd);
        (family.width() * osc * spec.nodes_per_wavelength as f64 / SHELL_GL_ORDER as f64)
            .ceil()
            .max(1.0) as usize
    };

    // Everything except the kernel K(2πsw) is independent of w; bake the
    // s-nodes and their combined coefficients once.
    let nodes_per_interval = sub * SHELL_GL_ORDER;
    let mut s_nodes = Vec::with_capacity(good_idx.len() * nodes_per_interval);
    let mut s_coeffs = Vec::with_capacity(good_idx.len() * nodes_per_interval);
    for &i in &good_idx {
        let (lo, hi) = family.interval(i);
        let h = (hi - lo) / sub as f64;
        for pnl in 0..sub {
            let mid = lo + (pnl as f64 + 0.5) * h;
            let half = 0.5 * h;
            for (x, wt) in gx.iter().zip(&gw) {
                let s = mid + half * x;
                let mut coeff = front * wt * half * s.powi(d as i32 - 1);
                if include_phi {
                    coeff *= phi_scale
                        * bessel_j_over_pow(nu_phi, two_pi * rd * s, &DEFAULT_SPECFUN)
                            .expect("valid domain");
                }
                s_nodes.push(s);
                s_coeffs.push(coeff);
            }
        }
    }

    // w-grid: transforms oscillate like J(2π s_max w), wavelength 1/s_max.
    let s_max = family.support().1;
    let panels = ((spec.panel_density(s_max) * cutoff).ceil() as usize).max(8) * level as usize;
    let (w_nodes, w_weights) = panel_nodes(0.0, cutoff, panels, spec.panel_rule);

    let row_for = |w: f64| -> Vec<f64> {
        let mut row = Vec::with_capacity(good_idx.len());
        let mut k = 0usize;
        for _ in 0..good_idx.len() {
            let mut acc = 0.0;
            for _ in 0..nodes_per_interval {
                acc += s_coeffs[k]
                    * bessel_j_over_pow(nu_t, two_pi * s_nodes[k] * w, &DEFAULT_SPECFUN)
                        .expect("valid domain");
                k += 1;
            }
            row.push(acc);
        }
        row
    };

    const CHUNK: usize = 256;
    let mut start = 0;
    while start < w_nodes.len() {
        let end = (start + CHUNK).min(w_nodes.len());
        let rows: Vec<Vec<f64>> =
            w_nodes[start..end].par_iter().map(|&w| row_for(w)).collect();
        for (k, row) in rows.iter().enumerate() {
            let w = w_nodes[start + k];
            let qw = w_weights[start + k] * area * w.powi(d as i32 - 1);
            visit(w, qw, row);
        }
        start = end;
    }
    Ok(())
}

/// Low-frequency mass (‖w‖ ≤ cutoff) of each good shell profile, indexed
/// like the family (zeros at bad intervals). `include_phi` selects g_i·φ
/// versus bare g_i.
pub(crate) fn per_interval_low_freq(
    family: &IntervalFamily,
    include_phi: bool,
    cutoff: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let good_idx = family.good_indices();
    let mut levels = [vec![0.0f64; good_idx.len()], vec![0.0f64; good_idx.len()]];
    for (lv, acc) in levels.iter_mut().enumerate() {
        shell_transform_scan(family, include_phi, cutoff, spec, 1 + lv as u32, |_w, qw, row| {
            for (a, t) in acc.iter_mut().zip(row) {
                *a += qw * t * t;
            }
        })?;
    }
    let [coarse, fine] = levels;
    let err: f64 = coarse.iter().zip(&fine).map(|(c, f)| (c - f).abs()).sum();
    let total: f64 = fine.iter().sum();
    if err > spec.rel_tol * total.max(1e-12) {
        return Err(Error::ToleranceNotMet { coarse: coarse.iter().sum(), fine: total, rel_tol: spec.rel_tol });
    }
    let mut out = vec![0.0; family.n];
    for (k, &i) in good_idx.iter().enumerate() {
        out[i] = fine[k];
    }
    Ok(out)
}

/// Draw `trials` uniform sign vectors and keep the one whose combination
/// Σ ε_i g_i φ puts the most transform mass outside the 2R_d ball. The
/// total mass is sign-independent (disjoint supports), so only the
/// low-frequency part is recomputed per trial.
pub fn select_signs(
    family: &IntervalFamily,
    trials: usize,
    spec: &QuadratureSpec,
    seed: u64,
) -> Result<SignVector> {
    if trials < 1 {
        return Err(Error::Config("select_signs requires trials >= 1".into()));
    }
    let total = mass_report(family, spec)?;
    let good_idx = family.good_indices();
    // Trial t draws from its own stream; the prefix property makes the
    // best-of-t sequence monotone in t under a fixed seed.
    let eps_rows: Vec<Vec<i8>> = (0..trials)
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64 + 1);
            (0..family.n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
        })
        .collect();
    let eps_good: Vec<Vec<f64>> = eps_rows
        .iter()
        .map(|row| good_idx.iter().map(|&i| row[i] as f64).collect())
        .collect();

    let mut low = [vec![0.0f64; trials], vec![0.0f64; trials]];
    for (lv, acc) in low.iter_mut().enumerate() {
        shell_transform_scan(family, true, 2.0 * family.r_d, spec, 1 + lv as u32, |_w, qw, row| {
            for (a, eps) in acc.iter_mut().zip(&eps_good) {
                let dot: f64 = eps.iter().zip(row).map(|(e, t)| e * t).sum();
                *a += qw * dot * dot;
            }
        })?;
    }
    let [coarse, fine] = low;
    let err = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (c - f).abs())
        .fold(0.0f64, f64::max);
    if err > spec.rel_tol * total.max(1e-12) {
        return Err(Error::ToleranceNotMet {
            coarse: coarse.iter().sum::<f64>() / trials as f64,
            fine: fine.iter().sum::<f64>() / trials as f64,
            rel_tol: spec.rel_tol,
        });
    }
    let mut best = 0usize;
    let mut best_mass = f64::NEG_INFINITY;
    for (t, lf) in fine.iter().enumerate() {
        let mass = total - lf;
        if mass > best_mass {
            best_mass = mass;
            best = t;
        }
    }
    Ok(SignVector { eps: eps_rows.into_iter().nth(best).unwrap(), high_freq_mass: best_mass, seed })
}

/// Mean high-frequency mass over sign draws, for the expectation check
/// `E[highfreq] ≥ ¼ Σ‖g_i‖²`: returns (average, ¼·Σ m_i).
pub fn sign_expectation(
    family: &IntervalFamily,
    trials: usize,
    spec: &QuadratureSpec,
    seed: u64,
) -> Result<(f64, f64)> {
    let per = per_interval_mass(family, spec)?;
    let total: f64 = per.iter().sum();
    let good_idx = family.good_indices();
    let eps_good: Vec<Vec<f64>> = (0..trials)
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64 + 1);
            let row: Vec<i8> =
                (0..family.n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            good_idx.iter().map(|&i| row[i] as f64).collect()
        })
        .collect();
    let mut low = vec![0.0f64; trials];
    shell_transform_scan(family, true, 2.0 * family.r_d, spec, 2, |_w, qw, row| {
        for (a, eps) in low.iter_mut().zip(&eps_good) {
            let dot: f64 = eps.iter().zip(row).map(|(e, t)| e * t).sum();
            *a += qw * dot * dot;
        }
    })?;
    let avg_high = low.iter().map(|lf| total - lf).sum::<f64>() / trials as f64;
    Ok((avg_high, 0.25 * total))
}
