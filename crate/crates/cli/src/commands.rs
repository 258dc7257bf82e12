//! Subcommand implementations. Every artifact lands under the configured
//! output directory and nothing else is written.

use crate::config::{RunConfig, TargetKind};
use depthsep_core::error::{Error, Result};
use depthsep_core::experiment::{width_sweep, write_sweep_csv, write_sweep_svg, TrainConfig};
use depthsep_core::hardfn::{build_family, select_signs, HardFunction};
use depthsep_core::netbuild::{build_prop_approx_net, Activation, FastRadialEval, ThreeLayerNet};
use depthsep_core::radial::{build_density, sample_mu};
use depthsep_core::rng::stream_rng;
use depthsep_core::verify::{any_hard_failure, run_suite, summarize, write_reports_csv};
use std::io::Write as _;

pub fn cmd_verify(cfg: &RunConfig, only: Option<&str>) -> Result<u8> {
    // accept both the bare lemma id and the check_-prefixed operation name
    let only = only.map(|o| o.strip_prefix("check_").unwrap_or(o));
    let reports = run_suite(&cfg.verify_config(), only)?;
    if reports.is_empty() {
        return Err(Error::Config(format!(
            "no checks selected (unknown --only {only:?}?)"
        )));
    }
    let path = cfg.out.join("reports.csv");
    write_reports_csv(&path, &reports)?;
    print!("{}", summarize(&reports));
    println!("wrote {}", path.display());
    if any_hard_failure(&reports) {
        println!("HARD CHECK FAILURE");
        Ok(1)
    } else {
        println!("all hard checks passed");
        Ok(0)
    }
}

pub fn cmd_build(cfg: &RunConfig) -> Result<u8> {
    let family = build_family(cfg.d, cfg.alpha, cfg.interval_count())?;
    println!(
        "family: d={} alpha={} N={} good={} ({:.1}%)",
        cfg.d,
        cfg.alpha,
        family.n,
        family.good_count(),
        100.0 * family.good_fraction()
    );
    let signs = select_signs(&family, cfg.trials, &cfg.nested_quad_spec(), cfg.seed)?;
    println!("signs: trials={} high-frequency mass={:.6e}", cfg.trials, signs.high_freq_mass);
    let hard = HardFunction::new(family, signs)?;
    let hard_path = cfg.out.join("hardfn.txt");
    std::fs::write(&hard_path, hard.to_text())?;

    let act = Activation::from_kind(cfg.activation)?;
    let built = build_prop_approx_net(&hard, cfg.delta, &act)?;
    println!(
        "net: width={} (inner {}, outer {}), measured sup error {:.3e} (target {})",
        built.width, built.inner_width, built.outer_width, built.measured_sup_error, cfg.delta
    );
    let net_path = cfg.out.join("net3.txt");
    std::fs::write(&net_path, built.net.to_text())?;

    let density = build_density(cfg.d, cfg.tail_tol, &cfg.quad_spec())?;
    let cdf_path = cfg.out.join("density_cdf.csv");
    density.write_cdf_csv(&cdf_path)?;
    println!(
        "density: r_max={:.3} tail bound={:.3e} grid={} rows",
        density.r_max,
        density.tail_bound,
        density.cdf_grid.len()
    );
    println!(
        "wrote {}, {}, {}",
        hard_path.display(),
        net_path.display(),
        cdf_path.display()
    );
    Ok(0)
}

fn load_built_target(
    cfg: &RunConfig,
) -> Result<(HardFunction, Option<FastRadialEval>)> {
    let hard_path = cfg.out.join("hardfn.txt");
    let text = std::fs::read_to_string(&hard_path).map_err(|e| {
        Error::Config(format!(
            "missing built hard function at {} (run `depthsep build` first): {e}",
            hard_path.display()
        ))
    })?;
    let hard = HardFunction::from_text(&text)?;
    let fast = if cfg.target == TargetKind::Net {
        let net_path = cfg.out.join("net3.txt");
        let text = std::fs::read_to_string(&net_path).map_err(|e| {
            Error::Config(format!(
                "missing built network at {} (run `depthsep build` first): {e}",
                net_path.display()
            ))
        })?;
        let net = ThreeLayerNet::from_text(&text)?;
        Some(FastRadialEval::from_net(&net)?)
    } else {
        None
    };
    Ok((hard, fast))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<u8> {
    let (hard, fast) = load_built_target(cfg)?;
    if hard.family.d != cfg.d {
        return Err(Error::Config(format!(
            "built target has d={} but the config says d={}",
            hard.family.d, cfg.d
        )));
    }
    let density = build_density(cfg.d, cfg.tail_tol, &cfg.quad_spec())?;
    let base = TrainConfig {
        d: cfg.d,
        width: 1,
        n_train: cfg.n_train,
        n_eval: cfg.n_eval,
        steps: cfg.steps,
        lr: cfg.lr,
        restarts: cfg.restarts,
        batch: cfg.batch,
        seed: cfg.seed,
        activation: cfg.activation,
    };
    let target_fn: Box<dyn Fn(&[f64]) -> f64 + Sync> = match (cfg.target, fast) {
        (TargetKind::Net, Some(f)) => Box::new(move |x: &[f64]| f.eval(x)),
        (TargetKind::Gtilde, _) => {
            let h = hard.clone();
            Box::new(move |x: &[f64]| h.eval_gtilde_point(x))
        }
        (TargetKind::Surrogate, _) => {
            let h = hard.clone();
            Box::new(move |x: &[f64]| h.eval_surrogate_point(x))
        }
        (TargetKind::Net, None) => unreachable!("loader supplies the net"),
    };
    let (rows, checksum) = width_sweep(&*target_fn, &cfg.widths, &base, &density)?;
    let header = vec![
        ("d".to_string(), cfg.d.to_string()),
        ("alpha".to_string(), cfg.alpha.to_string()),
        ("n".to_string(), cfg.interval_count().to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("tail_tol".to_string(), cfg.tail_tol.to_string()),
        ("target".to_string(), cfg.target.as_str().to_string()),
        ("n_train".to_string(), cfg.n_train.to_string()),
        ("n_eval".to_string(), cfg.n_eval.to_string()),
        ("steps".to_string(), cfg.steps.to_string()),
        ("lr".to_string(), cfg.lr.to_string()),
        ("restarts".to_string(), cfg.restarts.to_string()),
        ("batch".to_string(), cfg.batch.to_string()),
        ("activation".to_string(), cfg.activation.as_str().to_string()),
        ("eval_checksum".to_string(), format!("{checksum:016x}")),
    ];
    let csv_path = cfg.out.join("sweep.csv");
    write_sweep_csv(&csv_path, &header, &rows, cfg.timing)?;
    let svg_path = cfg.out.join("sweep.svg");
    write_sweep_svg(&svg_path, &rows)?;
    for r in &rows {
        println!(
            "width {:>6}: eval {:.6e} ± {:.2e} (train {:.6e})",
            r.width, r.eval_l2mu_error, r.eval_std_error, r.best_train_loss
        );
    }
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(0)
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<u8> {
    let density = build_density(cfg.d, cfg.tail_tol, &cfg.quad_spec())?;
    let mut rng = stream_rng(cfg.seed, 0);
    let path = cfg.out.join("samples.csv");
    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
    write!(out, "r")?;
    for c in 0..cfg.d {
        write!(out, ",x{c}")?;
    }
    writeln!(out)?;
    for _ in 0..cfg.sample_count {
        let x = sample_mu(&density, &mut rng);
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        write!(out, "{r:.17e}")?;
        for c in &x {
            write!(out, ",{c:.17e}")?;
        }
        writeln!(out)?;
    }
    drop(out);
    println!("wrote {} samples to {}", cfg.sample_count, path.display());
    Ok(0)
}

pub fn cmd_eval(cfg: &RunConfig) -> Result<u8> {
    let hard_path = cfg.out.join("hardfn.txt");
    let net_path = cfg.out.join("net3.txt");
    let hard = HardFunction::from_text(&std::fs::read_to_string(&hard_path).map_err(|e| {
        Error::Config(format!("missing {}: {e}", hard_path.display()))
    })?)?;
    let net = ThreeLayerNet::from_text(&std::fs::read_to_string(&net_path).map_err(|e| {
        Error::Config(format!("missing {}: {e}", net_path.display()))
    })?)?;
    let fast = FastRadialEval::from_net(&net)?;
    let density = build_density(hard.family.d, cfg.tail_tol, &cfg.quad_spec())?;
    let mut rng = stream_rng(cfg.seed, 17);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut max_abs = 0.0f64;
    for _ in 0..cfg.n_mc {
        let x = density.sample_point(&mut rng);
        let out = fast.eval(&x);
        max_abs = max_abs.max(out.abs());
        let diff = out - hard.eval_gtilde_point(&x);
        sum += diff * diff;
        sum_sq += diff * diff * diff * diff;
    }
    let mean = sum / cfg.n_mc as f64;
    let se = ((sum_sq / cfg.n_mc as f64 - mean * mean).max(0.0) / cfg.n_mc as f64).sqrt();
    println!(
        "net width {} | L2(mu) distance to gtilde: {:.6e} (squared {:.6e} ± {:.2e}) | max |out| {:.4}",
        net.width(),
        mean.sqrt(),
        mean,
        se,
        max_abs
    );
    Ok(0)
}
