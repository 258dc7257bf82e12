//! Empirical probe: train width-swept 2-layer networks on samples of μ
//! against a fixed target and report L2(μ) error curves.
//!
//! Training finds local minima only, so these curves upper-bound what
//! 2-layer nets of each width can do; they never verify a lower bound.
//! Everything is seeded and the emitted CSV is byte-reproducible.

use crate::error::{Error, Result};
use crate::netbuild::{Activation, ActivationKind, TwoLayerNet, TwoLayerUnit};
use crate::radial::RadialDensity;
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::Write as _;

/// Stream offsets so samples, inits and batches never collide.
const STREAM_TRAIN: u64 = 1_000_001;
const STREAM_EVAL: u64 = 1_000_002;
const STREAM_RESTART_BASE: u64 = 2_000_000;
/// Gradient 2-norm cap per step.
const GRAD_CLIP: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub d: u32,
    pub width: usize,
    pub n_train: usize,
    pub n_eval: usize,
    pub steps: usize,
    /// Constant phase-1 step size; phase 2 decays as 1/√t.
    pub lr: f64,
    pub restarts: usize,
    pub batch: usize,
    pub seed: u64,
    pub activation: ActivationKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            d: 3,
            width: 8,
            n_train: 8192,
            n_eval: 10_000,
            steps: 4000,
            lr: 0.05,
            restarts: 8,
            batch: 64,
            seed: 1,
            activation: ActivationKind::Relu,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0
            || self.n_train == 0
            || self.steps == 0
            || self.restarts == 0
            || self.batch == 0
            || self.d == 0
        {
            return Err(Error::Config("all training counts must be positive".into()));
        }
        if self.n_eval < 10_000 {
            return Err(Error::Config(format!(
                "n_eval must be at least 10^4, got {}",
                self.n_eval
            )));
        }
        if !(self.lr > 0.0) {
            return Err(Error::Config("step size must be positive".into()));
        }
        Ok(())
    }
}

/// One sweep result row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub width: usize,
    pub best_train_loss: f64,
    pub eval_l2mu_error: f64,
    pub eval_std_error: f64,
    pub restarts_used: usize,
    pub wall_time: f64,
}

/// Monte Carlo estimate of E_μ(f−g)² with its standard error.
pub fn l2mu_error(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    n_eval: usize,
    seed: u64,
    density: &RadialDensity,
) -> (f64, f64) {
    let mut rng = stream_rng(seed, STREAM_EVAL);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_eval {
        let x = density.sample_point(&mut rng);
        let diff = f(&x) - g(&x);
        sum += diff * diff;
        sum_sq += diff * diff * diff * diff;
    }
    let mean = sum / n_eval as f64;
    let var = (sum_sq / n_eval as f64 - mean * mean).max(0.0);
    (mean, (var / n_eval as f64).sqrt())
}

struct RestartOutcome {
    units: Vec<TwoLayerUnit>, // in preconditioned coordinates
    final_train_loss: f64,
    heldout_loss: f64,
    best_so_far: Vec<f64>,
    diverged: bool,
}

fn forward(units: &[TwoLayerUnit], act: &Activation, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for u in units {
        let z: f64 = u.w.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + u.b;
        acc += u.v * act.value(z);
    }
    acc
}

fn full_loss(units: &[TwoLayerUnit], act: &Activation, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = forward(units, act, x) - y;
        acc += r * r;
    }
    acc / xs.len() as f64
}

#[allow(clippy::too_many_arguments)]
fn run_restart(
    cfg: &TrainConfig,
    act: &Activation,
    xs: &[Vec<f64>],
    ys: &[f64],
    eval_xs: &[Vec<f64>],
    eval_ys: &[f64],
    restart: usize,
) -> RestartOutcome {
    let dd = cfg.d as usize;
    let mut rng = stream_rng(cfg.seed, STREAM_RESTART_BASE + restart as u64);
    let mut units: Vec<TwoLayerUnit> = (0..cfg.width)
        .map(|_| TwoLayerUnit {
            v: rng.sample::<f64, _>(StandardNormal) / (cfg.width as f64).sqrt(),
            w: (0..dd)
                .map(|_| rng.sample::<f64, _>(StandardNormal) / (dd as f64).sqrt())
                .collect(),
            b: 0.2 * rng.sample::<f64, _>(StandardNormal),
        })
        .collect();

    let relu_grad = cfg.activation == ActivationKind::Relu;
    let half = cfg.steps / 2;
    let mut best_so_far = Vec::new();
    let mut best = f64::INFINITY;
    let probe_every = (cfg.steps / 50).max(1);
    let mut diverged = false;

    let mut grad_v = vec![0.0f64; cfg.width];
    let mut grad_w = vec![0.0f64; cfg.width * dd];
    let mut grad_b = vec![0.0f64; cfg.width];
    for step in 0..cfg.steps {
        let lr = if step < half {
            cfg.lr
        } else {
            cfg.lr * ((half.max(1) as f64) / (step as f64 + 1.0)).sqrt()
        };
        grad_v.iter_mut().for_each(|g| *g = 0.0);
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        grad_b.iter_mut().for_each(|g| *g = 0.0);
        for _ in 0..cfg.batch {
            let idx = rng.gen_range(0..xs.len());
            let x = &xs[idx];
            let mut pred = 0.0;
            for u in units.iter() {
                let z: f64 = u.w.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + u.b;
                pred += u.v * act.value(z);
            }
            let resid = 2.0 * (pred - ys[idx]) / cfg.batch as f64;
            for (k, u) in units.iter().enumerate() {
                let z: f64 = u.w.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + u.b;
                let s = act.value(z);
                grad_v[k] += resid * s;
                if relu_grad && z > 0.0 {
                    for (c, xi) in x.iter().enumerate() {
                        grad_w[k * dd + c] += resid * u.v * xi;
                    }
                    grad_b[k] += resid * u.v;
                }
            }
        }
        // μ's radial tail makes raw batch gradients occasionally enormous
        // (one far sample dominates); a fixed norm clip keeps the step
        // bounded without touching the hypothesis class
        let gnorm = (grad_v.iter().map(|g| g * g).sum::<f64>()
            + grad_w.iter().map(|g| g * g).sum::<f64>()
            + grad_b.iter().map(|g| g * g).sum::<f64>())
        .sqrt();
        let clip = if gnorm > GRAD_CLIP { GRAD_CLIP / gnorm } else { 1.0 };
        for (k, u) in units.iter_mut().enumerate() {
            u.v -= lr * clip * grad_v[k];
            for (c, w) in u.w.iter_mut().enumerate() {
                *w -= lr * clip * grad_w[k * dd + c];
            }
            u.b -= lr * clip * grad_b[k];
        }
        if step % probe_every == 0 || step + 1 == cfg.steps {
            let loss = full_loss(&units, act, xs, ys);
            if !loss.is_finite() {
                diverged = true;
                break;
            }
            best = best.min(loss);
            best_so_far.push(best);
        }
    }
    let final_train_loss = if diverged { f64::INFINITY } else { full_loss(&units, act, xs, ys) };
    let heldout_loss =
        if diverged { f64::INFINITY } else { full_loss(&units, act, eval_xs, eval_ys) };
    RestartOutcome { units, final_train_loss, heldout_loss, best_so_far, diverged }
}

/// Train one 2-layer network: best of `restarts` random initializations
/// by held-out loss on the supplied eval sample. Inputs are rescaled by
/// the median radius internally; returned weights are mapped back, so
/// the hypothesis class is unchanged.
pub fn train_two_layer(
    target: &(dyn Fn(&[f64]) -> f64 + Sync),
    cfg: &TrainConfig,
    density: &RadialDensity,
    eval_sample: Option<&[Vec<f64>]>,
) -> Result<(TwoLayerNet, SweepRow)> {
    cfg.validate()?;
    if cfg.d != density.d {
        return Err(Error::Config("config dimension does not match density".into()));
    }
    let act = Activation::from_kind(cfg.activation)?;
    let started = std::time::Instant::now();

    // preconditioning scale: the median radius spread over coordinates
    let median_r = {
        let target_mass = 0.5 * density.total_mass();
        let idx = density.cdf_grid.partition_point(|&(_, f)| f < target_mass);
        density.cdf_grid[idx.min(density.cdf_grid.len() - 1)].0.max(1e-6)
    };
    let sigma_x = median_r / (cfg.d as f64).sqrt();

    let mut rng = stream_rng(cfg.seed, STREAM_TRAIN);
    let mut xs = Vec::with_capacity(cfg.n_train);
    let mut ys = Vec::with_capacity(cfg.n_train);
    for _ in 0..cfg.n_train {
        let x = density.sample_point(&mut rng);
        ys.push(target(&x));
        xs.push(x.iter().map(|c| c / sigma_x).collect::<Vec<f64>>());
    }
    let owned_eval: Vec<Vec<f64>>;
    let eval_points: &[Vec<f64>] = match eval_sample {
        Some(s) => s,
        None => {
            let mut erng = stream_rng(cfg.seed, STREAM_EVAL);
            owned_eval = (0..cfg.n_eval).map(|_| density.sample_point(&mut erng)).collect();
            &owned_eval
        }
    };
    let eval_ys: Vec<f64> = eval_points.iter().map(|x| target(x)).collect();
    let eval_scaled: Vec<Vec<f64>> =
        eval_points.iter().map(|x| x.iter().map(|c| c / sigma_x).collect()).collect();

    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(cfg, &act, &xs, &ys, &eval_scaled, &eval_ys, r))
        .collect();
    // best-so-far training curves are non-increasing by construction
    for o in &outcomes {
        debug_assert!(o.best_so_far.windows(2).all(|w| w[1] <= w[0]));
    }
    let best_idx = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.heldout_loss.partial_cmp(&b.1.heldout_loss).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let best = &outcomes[best_idx];
    if best.diverged {
        return Err(Error::Verification("every restart diverged".into()));
    }

    // map weights back to the original coordinates
    let units: Vec<TwoLayerUnit> = best
        .units
        .iter()
        .map(|u| TwoLayerUnit {
            v: u.v,
            w: u.w.iter().map(|w| w / sigma_x).collect(),
            b: u.b,
        })
        .collect();
    let net = TwoLayerNet { d: cfg.d, activation: cfg.activation, units };

    // final evaluation in original coordinates
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (x, y) in eval_points.iter().zip(&eval_ys) {
        let diff = net.eval(&act, x)? - y;
        sum += diff * diff;
        sum_sq += diff * diff * diff * diff;
    }
    let mean = sum / eval_points.len() as f64;
    let var = (sum_sq / eval_points.len() as f64 - mean * mean).max(0.0);
    let best_train = outcomes
        .iter()
        .map(|o| o.final_train_loss)
        .fold(f64::INFINITY, f64::min);
    Ok((
        net,
        SweepRow {
            width: cfg.width,
            best_train_loss: best_train,
            eval_l2mu_error: mean,
            eval_std_error: (var / eval_points.len() as f64).sqrt(),
            restarts_used: cfg.restarts,
            wall_time: started.elapsed().as_secs_f64(),
        },
    ))
}

/// FNV-style checksum of the eval sample bits, recorded in the CSV header
/// so sample reuse is auditable.
pub fn sample_checksum(points: &[Vec<f64>]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in points {
        for c in p {
            h ^= c.to_bits();
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    }
    h
}

/// One train per width, all scored on one shared eval sample.
pub fn width_sweep(
    target: &(dyn Fn(&[f64]) -> f64 + Sync),
    widths: &[usize],
    base_cfg: &TrainConfig,
    density: &RadialDensity,
) -> Result<(Vec<SweepRow>, u64)> {
    base_cfg.validate()?;
    let mut erng = stream_rng(base_cfg.seed, STREAM_EVAL);
    let eval_points: Vec<Vec<f64>> =
        (0..base_cfg.n_eval).map(|_| density.sample_point(&mut erng)).collect();
    let checksum = sample_checksum(&eval_points);
    let mut rows = Vec::with_capacity(widths.len());
    for (i, w) in widths.iter().enumerate() {
        let cfg = TrainConfig {
            width: *w,
            seed: base_cfg.seed.wrapping_add(i as u64),
            ..base_cfg.clone()
        };
        let (_, row) = train_two_layer(target, &cfg, density, Some(&eval_points))?;
        rows.push(row);
    }
    Ok((rows, checksum))
}

/// CSV schema: `# key=value` header lines, then
/// `width,train_loss,eval_error,std_err,restarts,seconds`. With
/// `record_timing` off (the default for reproducible runs) the seconds
/// column is written as zero so identical configurations produce
/// identical bytes.
pub fn render_sweep_csv(
    header: &[(String, String)],
    rows: &[SweepRow],
    record_timing: bool,
) -> String {
    let mut out = String::new();
    for (k, v) in header {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("width,train_loss,eval_error,std_err,restarts,seconds\n");
    for r in rows {
        let secs = if record_timing { r.wall_time } else { 0.0 };
        out.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{},{:.3}\n",
            r.width, r.best_train_loss, r.eval_l2mu_error, r.eval_std_error, r.restarts_used, secs
        ));
    }
    out
}

pub fn write_sweep_csv(
    path: &std::path::Path,
    header: &[(String, String)],
    rows: &[SweepRow],
    record_timing: bool,
) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(render_sweep_csv(header, rows, record_timing).as_bytes())?;
    Ok(())
}

/// Minimal SVG line chart: width (log2 scale) against eval error.
pub fn write_sweep_svg(path: &std::path::Path, rows: &[SweepRow]) -> Result<()> {
    let (w, h, ml, mb) = (640.0, 420.0, 70.0, 50.0);
    let plot_w = w - ml - 20.0;
    let plot_h = h - mb - 20.0;
    let xs: Vec<f64> = rows.iter().map(|r| (r.width.max(1) as f64).log2()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.eval_l2mu_error.max(1e-12)).collect();
    let (x_lo, x_hi) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(1.0),
    );
    let (y_lo, y_hi) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min),
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let x_of = |x: f64| ml + (x - x_lo) / (x_hi - x_lo).max(1e-12) * plot_w;
    let y_of = |y: f64| 20.0 + (1.0 - (y - y_lo) / (y_hi - y_lo).max(1e-300)) * plot_h;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb,
        w - 20.0,
        h - mb
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"20\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    let pts: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| format!("{:.2},{:.2}", x_of(*x), y_of(*y)))
        .collect();
    if pts.len() > 1 {
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n",
            pts.join(" ")
        ));
    }
    for (p, r) in pts.iter().zip(rows) {
        let (px, py) = p.split_once(',').unwrap();
        svg.push_str(&format!(
            "<circle cx=\"{px}\" cy=\"{py}\" r=\"3\" fill=\"steelblue\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            h - mb + 16.0,
            r.width
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">width (log scale)</text>\n",
        ml + plot_w / 2.0,
        h - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">E(f-g)^2</text>\n",
        20.0 + plot_h / 2.0,
        20.0 + plot_h / 2.0
    ));
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{build_density, QuadratureSpec};

    fn density2() -> RadialDensity {
        build_density(2, 1e-3, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.n_eval = 500;
        assert!(cfg.validate().is_err());
        cfg.n_eval = 10_000;
        cfg.width = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_target_trains_to_tiny_error() {
        let density = density2();
        let cfg = TrainConfig {
            d: 2,
            width: 2,
            n_train: 2048,
            steps: 1500,
            lr: 0.05,
            restarts: 2,
            seed: 3,
            ..TrainConfig::default()
        };
        let (_, row) = train_two_layer(&|_| 0.0, &cfg, &density, None).unwrap();
        assert!(row.eval_l2mu_error <= 1e-4, "error {}", row.eval_l2mu_error);
    }

    #[test]
    fn l2mu_error_zero_for_identical_functions() {
        let density = density2();
        let f = |x: &[f64]| x[0] + 0.1 * x[1];
        let (m, s) = l2mu_error(&f, &f, 10_000, 5, &density);
        assert_eq!(m, 0.0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn l2mu_error_seed_consistency() {
        let density = density2();
        let f = |x: &[f64]| x[0].max(0.0).min(1.0);
        let g = |_: &[f64]| 0.25;
        let (m1, s1) = l2mu_error(&f, &g, 10_000, 5, &density);
        let (m2, _) = l2mu_error(&f, &g, 10_000, 99, &density);
        assert!((m1 - m2).abs() <= 3.0 * s1 * 2.0, "estimates differ beyond MC noise");
    }

    #[test]
    fn shell_indicator_error_matches_quadrature_mass() {
        // E_μ of the good-shell indicator equals the quadrature mass of
        // the shells, up to MC noise and the truncation allowance
        use crate::hardfn::{build_family, mass_report};
        let density = build_density(3, 1e-3, &QuadratureSpec::default()).unwrap();
        let fam = build_family(3, 2.0, 40).unwrap();
        let mass = mass_report(&fam, &QuadratureSpec::default()).unwrap();
        let fam2 = fam.clone();
        let f = move |x: &[f64]| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            match fam2.interval_index(r) {
                Some(i) if fam2.is_good(i) => 1.0,
                _ => 0.0,
            }
        };
        let g = |_: &[f64]| 0.0;
        let (mean, se) = l2mu_error(&f, &g, 60_000, 9, &density);
        let allowance = 3.0 * se + 1e-3 * 1.0 + 1e-4 * mass;
        assert!(
            (mean * density.total_mass() - mass).abs() <= allowance,
            "MC {mean} vs quadrature {mass} (allowance {allowance})"
        );
    }

    #[test]
    fn sweep_rows_and_determinism() {
        let density = density2();
        let cfg = TrainConfig {
            d: 2,
            n_train: 1024,
            steps: 400,
            restarts: 2,
            seed: 11,
            ..TrainConfig::default()
        };
        let target = |x: &[f64]| (1.0 - x.iter().map(|c| c * c).sum::<f64>()).max(0.0);
        let (rows_a, ck_a) = width_sweep(&target, &[1, 2], &cfg, &density).unwrap();
        let (rows_b, ck_b) = width_sweep(&target, &[1, 2], &cfg, &density).unwrap();
        assert_eq!(ck_a, ck_b);
        let csv_a = render_sweep_csv(&[("seed".into(), "11".into())], &rows_a, false);
        let csv_b = render_sweep_csv(&[("seed".into(), "11".into())], &rows_b, false);
        assert_eq!(csv_a, csv_b, "sweep must be byte-reproducible");
        assert_eq!(rows_a.len(), 2);
        // empty width list → empty output
        let (rows_e, _) = width_sweep(&target, &[], &cfg, &density).unwrap();
        assert!(rows_e.is_empty());
    }

    #[test]
    fn csv_schema_shape() {
        let rows = vec![SweepRow {
            width: 4,
            best_train_loss: 0.5,
            eval_l2mu_error: 0.25,
            eval_std_error: 0.01,
            restarts_used: 8,
            wall_time: 12.5,
        }];
        let csv = render_sweep_csv(&[("target".into(), "gtilde".into())], &rows, false);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# target=gtilde");
        assert_eq!(lines.next().unwrap(), "width,train_loss,eval_error,std_err,restarts,seconds");
        let row = lines.next().unwrap();
        assert!(row.starts_with("4,"));
        assert!(row.ends_with(",8,0.000"));
        // timing on: the wall time shows up
        let csv_t = render_sweep_csv(&[], &rows, true);
        assert!(csv_t.contains(",12.500"));
    }

    #[test]
    fn svg_emission() {
        let rows: Vec<SweepRow> = [1usize, 4, 16]
            .iter()
            .enumerate()
            .map(|(i, w)| SweepRow {
                width: *w,
                best_train_loss: 0.5,
                eval_l2mu_error: 0.5 / (i + 1) as f64,
                eval_std_error: 0.01,
                restarts_used: 2,
                wall_time: 1.0,
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.svg");
        write_sweep_svg(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("polyline"));
    }
}
