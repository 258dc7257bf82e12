//! Radial machinery: the density φ² of the measure μ, oscillation-aware
//! radial quadrature, the radial Fourier (Hankel) transform, and an
//! inverse-CDF sampler for μ.
//!
//! All radii are Euclidean norms; profiles are scalar functions of the
//! radius with compact support. The radial weight of μ is
//! A_d r^(d−1) φ²(r) = d · J²_{d/2}(2π R_d r) / r.

use crate::error::{Error, Result};
use crate::quad::{integrate_segments, segments_with_cuts, PanelRule, QuadResult};
use crate::specfun::{bessel_j_over_pow, unit_ball_radius, unit_sphere_area, DEFAULT_SPECFUN};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::Write as _;
use std::sync::Arc;

const SPECFUN: crate::specfun::SpecFunConfig = DEFAULT_SPECFUN;

/// Quadrature controls shared by every radial integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Sampling density relative to the Bessel oscillation wavelength.
    pub nodes_per_wavelength: usize,
    pub panel_rule: PanelRule,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes_per_wavelength: 24, panel_rule: PanelRule::default(), rel_tol: 1e-4 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_wavelength < 20 {
            return Err(Error::Config(format!(
                "nodes_per_wavelength must be >= 20, got {}",
                self.nodes_per_wavelength
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::Config(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }

    /// Tighter copy for inner integrals of nested transforms.
    pub fn tighter(&self, factor: f64) -> Self {
        Self { rel_tol: (self.rel_tol * factor).max(1e-13), ..*self }
    }

    fn nodes_per_panel(&self) -> f64 {
        match self.panel_rule {
            PanelRule::CompositeSimpson => 3.0,
            PanelRule::GaussLegendre { order } => order as f64,
        }
    }

    /// Panels per unit length needed so `osc_per_unit` oscillations per
    /// unit length get `nodes_per_wavelength` nodes each.
    pub fn panel_density(&self, osc_per_unit: f64) -> f64 {
        (self.nodes_per_wavelength as f64 * osc_per_unit.max(1e-9) / self.nodes_per_panel())
            .max(1e-9)
    }
}

/// Weight against which radial profiles are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialWeight {
    /// A_d r^(d−1) — plain Lebesgue measure in polar form.
    LebesgueRadial,
    /// A_d r^(d−1) φ²(r) — the radial density of μ.
    PhiSquared,
}

/// A compactly supported scalar function of the radius. Evaluation is
/// clamped to zero outside the support; `breakpoints` mark interior
/// kinks/jumps so quadrature panels can align with them.
#[derive(Clone)]
pub struct RadialProfile {
    support: (f64, f64),
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lipschitz_hint: Option<f64>,
    breakpoints: Arc<Vec<f64>>,
    /// True when the profile is exactly piecewise linear with kinks only
    /// at the breakpoints; downstream compilers exploit this.
    pub piecewise_linear: bool,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints.len())
            .finish()
    }
}

impl RadialProfile {
    pub fn new(
        support: (f64, f64),
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(support.0 >= 0.0 && support.0 < support.1 && support.1.is_finite()) {
            return Err(Error::Domain(format!(
                "profile support must satisfy 0 <= a < b < inf, got {support:?}"
            )));
        }
        Ok(Self {
            support,
            eval: Arc::new(eval),
            lipschitz_hint: None,
            breakpoints: Arc::new(Vec::new()),
            piecewise_linear: false,
        })
    }

    pub fn piecewise_linear(mut self) -> Self {
        self.piecewise_linear = true;
        self
    }

    pub fn with_breakpoints(mut self, mut pts: Vec<f64>) -> Self {
        pts.retain(|p| *p > self.support.0 && *p < self.support.1);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        self.breakpoints = Arc::new(pts);
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz_hint = Some(l);
        self
    }

    /// Indicator of [a, b].
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new((a, b), |_| 1.0)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Value at radius r; zero outside the support by contract.
    pub fn value(&self, r: f64) -> f64 {
        if r < self.support.0 || r > self.support.1 {
            0.0
        } else {
            (self.eval)(r)
        }
    }
}

/// φ(r) = (R_d / r)^{d/2} J_{d/2}(2π R_d r), the Fourier transform of the
/// unit-volume ball indicator, evaluated through the J(z)/z^ν kernel so
/// the limit φ(0) = 1 comes out exactly.
pub fn phi(d: u32, r: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("phi requires d >= 1".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("phi requires r >= 0, got {r}")));
    }
    if r == 0.0 {
        // exact limit: the transform at the origin is the ball volume
        return Ok(1.0);
    }
    let rd = unit_ball_radius(d)?;
    let nu = d as f64 / 2.0;
    let z = 2.0 * std::f64::consts::PI * rd * r;
    let kernel = bessel_j_over_pow(nu, z, &SPECFUN)?;
    // (R/r)^{ν} (2πRr)^{ν} = (2πR²)^{ν}
    Ok((2.0 * std::f64::consts::PI * rd * rd).powf(nu) * kernel)
}

/// Radial density of μ: A_d r^(d−1) φ²(r) = d·J²_{d/2}(2π R_d r)/r,
/// computed in the kernel form that is smooth through r = 0.
pub fn mu_radial_density(d: u32, r: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("mu_radial_density requires d >= 1".into()));
    }
    let rd = unit_ball_radius(d)?;
    let nu = d as f64 / 2.0;
    let two_pi_rd = 2.0 * std::f64::consts::PI * rd;
    let kernel = bessel_j_over_pow(nu, two_pi_rd * r, &SPECFUN)?;
    // d · K² · (2πR)^d · r^(d−1)
    Ok(d as f64 * kernel * kernel * two_pi_rd.powi(d as i32) * r.powi(d as i32 - 1))
}

fn weight_fn(d: u32, weight: RadialWeight) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let area = unit_sphere_area(d)?;
    match weight {
        RadialWeight::LebesgueRadial => {
            Ok(Box::new(move |r: f64| area * r.powi(d as i32 - 1)))
        }
        RadialWeight::PhiSquared => {
            let rd = unit_ball_radius(d)?;
            let nu = d as f64 / 2.0;
            let two_pi_rd = 2.0 * std::f64::consts::PI * rd;
            let scale = two_pi_rd.powi(d as i32);
            Ok(Box::new(move |r: f64| {
                let kernel = bessel_j_over_pow(nu, two_pi_rd * r, &SPECFUN)
                    .expect("kernel eval on validated domain");
                d as f64 * kernel * kernel * scale * r.powi(d as i32 - 1)
            }))
        }
    }
}

/// ∫ p(r)·w(r) dr over the profile's support, with panels aligned to the
/// profile's breakpoints and sized to the Bessel oscillation scale.
pub fn radial_integrate(
    p: &RadialProfile,
    weight: RadialWeight,
    d: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(radial_integrate_detailed(p, weight, d, spec)?.value)
}

/// Same as [`radial_integrate`] but exposing the refinement error
/// estimate and node count.
pub fn radial_integrate_detailed(
    p: &RadialProfile,
    weight: RadialWeight,
    d: u32,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    let w = weight_fn(d, weight)?;
    let (a, b) = p.support;
    let segments = segments_with_cuts(a, b, p.breakpoints());
    // J²(2π R_d r) oscillates with wavelength 1/(2 R_d) in r.
    let osc = 2.0 * unit_ball_radius(d)?;
    integrate_segments(
        |r| p.value(r) * w(r),
        &segments,
        spec.panel_density(osc),
        spec.panel_rule,
        spec.rel_tol,
        f64::MIN_POSITIVE,
        7,
    )
}

/// Radial Fourier transform of a radial profile:
/// ĝ(w) = 2π ∫ p(s) (s/w)^{d/2−1} J_{d/2−1}(2π s w) s ds,
/// evaluated in kernel form 2π(2π)^{d/2−1} ∫ p(s) s^{d−1} K_ν(2πsw) ds
/// (ν = d/2−1, K_ν(z) = J_ν(z)/z^ν), which handles w = 0 without a
/// separate branch and returns the plain volume integral there.
pub fn hankel_transform(
    p: &RadialProfile,
    d: u32,
    w: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if d < 2 {
        return Err(Error::Domain("hankel_transform requires d >= 2".into()));
    }
    if !(w >= 0.0) {
        return Err(Error::Domain(format!("hankel_transform requires w >= 0, got {w}")));
    }
    let nu = d as f64 / 2.0 - 1.0;
    let two_pi = 2.0 * std::f64::consts::PI;
    let front = two_pi * two_pi.powf(nu);
    let (a, b) = p.support;
    let segments = segments_with_cuts(a, b, p.breakpoints());

    // Magnitude scale for the absolute tolerance floor (the transform has
    // genuine zeros where a purely relative target is unreachable).
    let k0 = bessel_j_over_pow(nu, 0.0, &SPECFUN)?;
    let mut peak = 0.0_f64;
    for k in 0..=32 {
        let s = a + (b - a) * k as f64 / 32.0;
        peak = peak.max(p.value(s).abs() * s.powi(d as i32 - 1));
    }
    let scale = front * (b - a) * peak * k0;

    // Oscillation scales: J(2πsw) has wavelength 1/w in s; a φ-bearing
    // profile additionally oscillates at 1/(2 R_d).
    let osc = w.max(2.0 * unit_ball_radius(d)?);
    let result = integrate_segments(
        |s| {
            p.value(s)
                * s.powi(d as i32 - 1)
                * bessel_j_over_pow(nu, two_pi * s * w, &SPECFUN).expect("kernel eval")
        },
        &segments,
        spec.panel_density(osc),
        spec.panel_rule,
        spec.rel_tol,
        (scale * spec.rel_tol).max(f64::MIN_POSITIVE),
        7,
    )?;
    Ok(front * result.value)
}

/// ∫_{‖w‖ ≤ cutoff} ĝ²(w) dw = ∫_0^cutoff A_d w^(d−1) ĝ(w)² dw.
pub fn low_freq_mass(
    p: &RadialProfile,
    d: u32,
    cutoff: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff must be > 0, got {cutoff}")));
    }
    let area = unit_sphere_area(d)?;
    let inner_spec = spec.tighter(0.25);
    // ĝ(w) oscillates on the scale 1/(support end) in w.
    let osc = p.support.1;
    let result = integrate_segments(
        |w| {
            let g = hankel_transform(p, d, w, &inner_spec).expect("inner hankel");
            area * w.powi(d as i32 - 1) * g * g
        },
        &[(0.0, cutoff)],
        spec.panel_density(osc),
        spec.panel_rule,
        spec.rel_tol,
        f64::MIN_POSITIVE,
        4,
    )?;
    Ok(result.value)
}

/// The measure μ in radial form: truncation radius with a certified tail
/// bound, and the tabulated radial CDF used by the sampler.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    pub d: u32,
    pub r_d: f64,
    pub r_max: f64,
    /// Certified upper bound on μ{‖x‖ > r_max}.
    pub tail_bound: f64,
    /// Monotone table (r_j, F(r_j)) of the radial CDF.
    pub cdf_grid: Vec<(f64, f64)>,
}

/// Envelope bound on d·∫_{X}^∞ J²_{d/2}(x)/x dx from the Krasikov form:
/// J² ≤ 2/(π c x) + 2·sqrt(2/(π c))·x^{-2} + x^{-3} with c evaluated at
/// the left end (c increases in x).
fn tail_envelope(d: u32, x_cut: f64) -> f64 {
    let dd = d as f64;
    let c_min = if d >= 2 {
        (1.0 - (dd * dd - 1.0) / (4.0 * x_cut * x_cut)).sqrt()
    } else {
        1.0 // J_{1/2}² = (2/(πx))·sin² ≤ 2/(πx) exactly
    };
    let pc = std::f64::consts::PI * c_min;
    dd * (2.0 / (pc * x_cut)
        + (2.0 / pc).sqrt() / (x_cut * x_cut)
        + 1.0 / (3.0 * x_cut * x_cut * x_cut))
}

/// Build the truncated radial CDF of μ with a certified tail bound.
pub fn build_density(d: u32, tail_tol: f64, spec: &QuadratureSpec) -> Result<RadialDensity> {
    spec.validate()?;
    if d == 0 {
        return Err(Error::Domain("build_density requires d >= 1".into()));
    }
    if !(tail_tol > 0.0 && tail_tol <= 0.01) {
        return Err(Error::Config(format!("tail_tol must lie in (0, 0.01], got {tail_tol}")));
    }
    let rd = unit_ball_radius(d)?;
    let two_pi_rd = 2.0 * std::f64::consts::PI * rd;

    // Smallest cut X with certified tail <= tail_tol (envelope decreases in X).
    let mut lo = (d as f64).max(2.0);
    if tail_envelope(d, lo) <= tail_tol {
        // already below at the envelope's domain edge; keep lo as the cut
    } else {
        let mut hi = lo * 2.0;
        while tail_envelope(d, hi) > tail_tol {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Config("tail_tol unreachable".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tail_envelope(d, mid) > tail_tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo = hi;
    }
    let x_cut = lo;
    let r_max = x_cut / two_pi_rd;
    let tail_bound = tail_envelope(d, x_cut);

    // Tabulate F on a grid with at least nodes_per_wavelength · R_d · r_max
    // entries (>= nodes_per_wavelength per oscillation of J²).
    let min_entries = (spec.nodes_per_wavelength as f64 * rd * r_max).ceil() as usize;
    let cells = (2 * min_entries).clamp(1024, 20_000_000);
    if cells >= 20_000_000 {
        return Err(Error::Config("tail_tol unreachable within the node budget".into()));
    }
    let density_fn = weight_fn(d, RadialWeight::PhiSquared)?;
    let (gl_nodes, gl_weights) = crate::quad::gauss_legendre(8);
    let h = r_max / cells as f64;
    let mut grid = Vec::with_capacity(cells + 1);
    grid.push((0.0, 0.0));
    let mut acc = 0.0;
    for k in 0..cells {
        let a = k as f64 * h;
        let b = a + h;
        let mid = 0.5 * (a + b);
        let half = 0.5 * h;
        let mut cell = 0.0;
        for (x, w) in gl_nodes.iter().zip(&gl_weights) {
            cell += w * density_fn(mid + half * x);
        }
        acc += cell * half;
        grid.push((b, acc));
    }

    // Validate the total against an independently refined pass.
    let profile = RadialProfile::indicator(0.0, r_max)?;
    let check = radial_integrate_detailed(&profile, RadialWeight::PhiSquared, d, spec)?;
    let f_end = grid.last().unwrap().1;
    if (f_end - check.value).abs() > 10.0 * spec.rel_tol * check.value.abs().max(1e-3) {
        return Err(Error::Verification(format!(
            "CDF tabulation ({f_end}) disagrees with adaptive quadrature ({})",
            check.value
        )));
    }
    let density = RadialDensity { d, r_d: rd, r_max, tail_bound, cdf_grid: grid };
    density.validate()?;
    Ok(density)
}

impl RadialDensity {
    pub fn validate(&self) -> Result<()> {
        let f_end = self.cdf_grid.last().map(|p| p.1).unwrap_or(0.0);
        if !self.cdf_grid.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].0 > w[0].0) {
            return Err(Error::Verification("cdf_grid must be monotone".into()));
        }
        if self.cdf_grid.first().map(|p| (p.0, p.1)) != Some((0.0, 0.0)) {
            return Err(Error::Verification("cdf_grid must start at (0, 0)".into()));
        }
        if f_end > 1.0 + 1e-6 {
            return Err(Error::Verification(format!("F(r_max) = {f_end} exceeds 1")));
        }
        if f_end + self.tail_bound < 1.0 - 1e-6 {
            return Err(Error::Verification(format!(
                "F(r_max) + tail_bound = {} < 1: tail bound not actually covering",
                f_end + self.tail_bound
            )));
        }
        Ok(())
    }

    /// Total tabulated mass F(r_max) ≤ 1.
    pub fn total_mass(&self) -> f64 {
        self.cdf_grid.last().map(|p| p.1).unwrap_or(0.0)
    }

    /// Linearly interpolated CDF value F(r).
    pub fn cdf_at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.r_max {
            return self.total_mass();
        }
        let idx = self.cdf_grid.partition_point(|&(rr, _)| rr <= r);
        let (r1, f1) = self.cdf_grid[idx.min(self.cdf_grid.len() - 1)];
        let (r0, f0) = self.cdf_grid[idx - 1];
        if r1 > r0 {
            f0 + (r - r0) / (r1 - r0) * (f1 - f0)
        } else {
            f1
        }
    }

    /// Inverse-CDF draw of a radius, conditioned on r ≤ r_max.
    pub fn sample_radius(&self, rng: &mut impl Rng) -> f64 {
        let target = rng.gen::<f64>() * self.total_mass();
        let idx = self.cdf_grid.partition_point(|&(_, f)| f < target);
        if idx == 0 {
            return self.cdf_grid[0].0;
        }
        if idx >= self.cdf_grid.len() {
            return self.r_max;
        }
        let (r0, f0) = self.cdf_grid[idx - 1];
        let (r1, f1) = self.cdf_grid[idx];
        if f1 > f0 {
            r0 + (target - f0) / (f1 - f0) * (r1 - r0)
        } else {
            r1
        }
    }

    /// One point x ~ μ (truncated at r_max): inverse-CDF radius times a
    /// uniform direction from a normalized Gaussian vector.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vec<f64> {
        let r = self.sample_radius(rng);
        let mut v = vec![0.0; self.d as usize];
        loop {
            let mut norm2 = 0.0_f64;
            for c in v.iter_mut() {
                *c = rng.sample(StandardNormal);
                norm2 += *c * *c;
            }
            if norm2 > 1e-24 {
                let scale = r / norm2.sqrt();
                for c in v.iter_mut() {
                    *c *= scale;
                }
                return v;
            }
        }
    }

    /// Write the CDF table as CSV (columns: r, F).
    pub fn write_cdf_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "r,F")?;
        for (r, f) in &self.cdf_grid {
            writeln!(out, "{r:.17e},{f:.17e}")?;
        }
        Ok(())
    }
}

/// Alias matching the operation vocabulary: sample one point from μ.
pub fn sample_mu(density: &RadialDensity, rng: &mut impl Rng) -> Vec<f64> {
    density.sample_point(rng)
}
