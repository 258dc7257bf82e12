//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `--nocapture`). The default configuration is
//! d = 4, α = 25, N = ceil(100 α d^{3/2}) = 20000, seed 1.
//!
//! Heavy shared artifacts (the default interval family, signs, density)
//! are built once and reused across criteria.

use depthsep_core::experiment::{render_sweep_csv, width_sweep, TrainConfig};
use depthsep_core::hardfn::{
    build_family, default_interval_count, select_signs, HardFunction, IntervalFamily,
};
use depthsep_core::netbuild::{
    build_prop_approx_net, build_univariate_relu, Activation, ActivationKind, TwoLayerNet,
    TwoLayerUnit,
};
use depthsep_core::radial::{
    build_density, radial_integrate, QuadratureSpec, RadialDensity, RadialProfile, RadialWeight,
};
use depthsep_core::rng::stream_rng;
use depthsep_core::specfun::{
    bessel_j, bessel_j_krasikov, unit_ball_radius, DEFAULT_SPECFUN,
};
use depthsep_core::verify::{
    check_besbound, check_besind, check_bigmass, check_fgg_identity, check_flat, check_lipapprox,
    check_lipmag, check_nothinsh, check_nothinsh2, check_prop_approx, check_rd_bounds,
    check_sign_expectation, write_reports_csv, Verdict,
};
use rand::Rng;
use std::sync::OnceLock;
use std::time::Instant;

const D: u32 = 4;
const ALPHA: f64 = 25.0;
const SEED: u64 = 1;
const DELTA: f64 = 0.05;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default() // rel_tol 1e-4
}

fn nested_quad() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-3, ..QuadratureSpec::default() }
}

fn default_family() -> &'static IntervalFamily {
    static FAMILY: OnceLock<IntervalFamily> = OnceLock::new();
    FAMILY.get_or_init(|| {
        build_family(D, ALPHA, default_interval_count(D, ALPHA)).expect("family build")
    })
}

fn default_hard() -> &'static HardFunction {
    static HARD: OnceLock<HardFunction> = OnceLock::new();
    HARD.get_or_init(|| {
        let signs = select_signs(default_family(), 64, &nested_quad(), SEED).expect("signs");
        HardFunction::new(default_family().clone(), signs).expect("hard function")
    })
}

fn default_density() -> &'static RadialDensity {
    static DENSITY: OnceLock<RadialDensity> = OnceLock::new();
    DENSITY.get_or_init(|| build_density(D, 1e-3, &quad()).expect("density"))
}

fn report(criterion: &str, pass: bool, detail: &str, elapsed: f64, budget: f64) {
    println!(
        "acceptance {criterion}: {} — {detail} [{elapsed:.1}s of {budget:.0}s budget]",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
    assert!(elapsed <= budget, "{criterion} exceeded its runtime budget: {elapsed:.1}s");
}

#[test]
fn criterion_01_rd_bounds() {
    let t = Instant::now();
    let rep = check_rd_bounds(200).unwrap();
    report(
        "01 R_d bounds",
        rep.verdict == Verdict::HardPass,
        &format!("sqrt(d)/5 <= R_d <= sqrt(d)/2 for d=1..200; worst violation {:.2e}", rep.measured),
        t.elapsed().as_secs_f64(),
        1.0,
    );
}

#[test]
fn criterion_02_bessel_magnitude_and_lipschitz() {
    let t = Instant::now();
    let rep = check_lipmag(40, 100.0, 0.01).unwrap();
    report(
        "02 Bessel magnitude/Lipschitz",
        rep.verdict == Verdict::HardPass,
        &rep.notes,
        t.elapsed().as_secs_f64(),
        30.0,
    );
}

#[test]
fn criterion_03_krasikov_envelope() {
    let t = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for d in 2..=20u32 {
        let lo = (d as f64).max(30.0);
        let hi = 10.0 * d as f64;
        if hi <= lo {
            continue;
        }
        for k in 0..=400 {
            let x = lo + (hi - lo) * k as f64 / 400.0;
            let accurate = bessel_j(d as f64 / 2.0, x, &DEFAULT_SPECFUN).unwrap();
            let approx = bessel_j_krasikov(d, x).unwrap();
            let excess = (accurate - approx).abs() - (x.powf(-1.5) + 1e-9);
            worst = worst.max(excess);
            if excess > 0.0 {
                ok = false;
            }
        }
    }
    report(
        "03 Krasikov envelope",
        ok,
        &format!("|J − asymptotic| − (x^-1.5 + 1e-9) worst {worst:.2e}"),
        t.elapsed().as_secs_f64(),
        30.0,
    );
}

#[test]
fn criterion_04_besbound() {
    let t = Instant::now();
    let rep = check_besbound(10, 2000).unwrap();
    report(
        "04 besbound envelope",
        rep.verdict == Verdict::HardPass,
        &format!("zero violations of J² <= 1.3/(r sqrt d); {}", rep.notes),
        t.elapsed().as_secs_f64(),
        10.0,
    );
}

#[test]
fn criterion_05_besind() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for (d, beta) in [(2u32, 64.0), (4, 32.0), (2, 128.0)] {
        let rep = check_besind(d, beta, 1e-4).unwrap();
        ok &= rep.verdict == Verdict::HardPass;
        detail.push_str(&format!("(d={d},β={beta}): {:.3e}≥{:.3e}; ", rep.measured, rep.bound));
    }
    report("05 besind threshold integral", ok, &detail, t.elapsed().as_secs_f64(), 30.0);
}

#[test]
fn criterion_06_density_normalization() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for d in [2u32, 3, 4, 6] {
        let density = build_density(d, 1e-3, &quad()).unwrap();
        let profile = RadialProfile::indicator(0.0, density.r_max).unwrap();
        let mass = radial_integrate(&profile, RadialWeight::PhiSquared, d, &quad()).unwrap();
        let total = mass + density.tail_bound;
        ok &= (0.999..=1.001).contains(&total);
        detail.push_str(&format!("d={d}: {total:.6}; "));
    }
    report("06 density normalization", ok, &detail, t.elapsed().as_secs_f64(), 60.0);
}

#[test]
fn criterion_07_nothinsh_hard() {
    let t = Instant::now();
    let rep = check_nothinsh(default_family(), &nested_quad()).unwrap();
    report(
        "07 nothinsh low-frequency",
        rep.verdict == Verdict::HardPass,
        &format!(
            "max low-frequency fraction over {} good intervals: {:.4e} <= 0.5",
            default_family().good_count(),
            rep.measured
        ),
        t.elapsed().as_secs_f64(),
        900.0,
    );
}

#[test]
fn criterion_08_lipapprox_hard() {
    let t = Instant::now();
    let rep = check_lipapprox(default_hard(), &quad()).unwrap();
    report(
        "08 lipapprox surrogate gap",
        rep.verdict == Verdict::HardPass,
        &format!("gap {:.4e} <= 3/(α²√d) = {:.4e}", rep.measured, rep.bound),
        t.elapsed().as_secs_f64(),
        300.0,
    );
}

#[test]
fn criterion_09_relu_builder_randomized() {
    let t = Instant::now();
    let act = Activation::relu();
    let mut rng = stream_rng(902, 0);
    let mut failures = 0usize;
    for _ in 0..100 {
        let l: f64 = rng.gen_range(0.1..10.0);
        let r: f64 = rng.gen_range(0.2..5.0);
        let ratio: f64 = 10f64.powf(rng.gen_range(0.5..2.5));
        let delta = r * l / ratio;
        // random piecewise-linear L-Lipschitz target, constant outside [−R, R]
        let kink_count = rng.gen_range(2..10);
        let mut kinks: Vec<f64> = (0..kink_count).map(|_| rng.gen_range(-r..r)).collect();
        kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        kinks.dedup();
        let mut vals = vec![rng.gen_range(-2.0..2.0)];
        for w in kinks.windows(2) {
            let slope: f64 = rng.gen_range(-l..l);
            let prev = *vals.last().unwrap();
            vals.push(prev + slope * (w[1] - w[0]));
        }
        let kinks_c = kinks.clone();
        let vals_c = vals.clone();
        let f = move |x: f64| -> f64 {
            if x <= kinks_c[0] {
                return vals_c[0];
            }
            if x >= *kinks_c.last().unwrap() {
                return *vals_c.last().unwrap();
            }
            let i = kinks_c.partition_point(|k| *k <= x) - 1;
            let t = (x - kinks_c[i]) / (kinks_c[i + 1] - kinks_c[i]);
            vals_c[i] + t * (vals_c[i + 1] - vals_c[i])
        };
        let approx = match build_univariate_relu(&f, l, r, delta) {
            Ok(a) => a,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        // sup error on a 10^4-point grid
        let mut sup = 0.0f64;
        for k in 0..=10_000 {
            let x = -1.5 * r + 3.0 * r * k as f64 / 10_000.0;
            sup = sup.max((f(x.clamp(-r, r)) - approx.value(&act, x)).abs());
        }
        let width_ok = (approx.width() as f64) <= 3.0 * r * l / delta;
        let alpha_ok =
            approx.terms.iter().all(|t| t.alpha.abs() <= 2.0 * l * (1.0 + 1e-9));
        if sup > delta || !width_ok || !alpha_ok {
            failures += 1;
        }
    }
    report(
        "09 ReLU builder",
        failures == 0,
        &format!("100 randomized cases, {failures} failures"),
        t.elapsed().as_secs_f64(),
        60.0,
    );
}

#[test]
fn criterion_10_three_layer_end_to_end() {
    let t = Instant::now();
    let rep = check_prop_approx(
        default_hard(),
        &Activation::relu(),
        DELTA,
        100_000,
        SEED,
        default_density(),
        &quad(),
    )
    .unwrap();
    report(
        "10 three-layer end-to-end",
        rep.verdict == Verdict::HardPass,
        &format!("L2(μ) distance {:.4e} <= {:.4e}; {}", rep.measured, rep.bound, rep.notes),
        t.elapsed().as_secs_f64(),
        600.0,
    );
}

#[test]
fn criterion_11_fgg_identity() {
    let t = Instant::now();
    let hard = default_hard();
    let density = default_density();
    let surrogate = hard.surrogate_profile();
    let zero = RadialProfile::new(surrogate.support(), |_| 0.0).unwrap();
    let gtilde = hard.gtilde_profile();
    let (slo, shi) = surrogate.support();
    let smooth = RadialProfile::new((slo, shi), move |r| {
        ((r - slo) / (shi - slo) * std::f64::consts::PI).sin()
    })
    .unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for (i, (f, g, label)) in [
        (&surrogate, &zero, "surrogate_vs_zero"),
        (&surrogate, &gtilde, "surrogate_vs_gtilde"),
        (&smooth, &zero, "smooth_vs_zero"),
    ]
    .into_iter()
    .enumerate()
    {
        let rep = check_fgg_identity(
            f,
            g,
            100_000,
            SEED + i as u64,
            density,
            &quad(),
            label,
        )
        .unwrap();
        ok &= rep.verdict == Verdict::HardPass;
        detail.push_str(&format!("{label}: |Δ|={:.2e}<= {:.2e}; ", rep.measured, rep.bound));
    }
    report("11 measure identity MC vs quadrature", ok, &detail, t.elapsed().as_secs_f64(), 120.0);
}

#[test]
fn criterion_12_informational_margins_recorded() {
    let t = Instant::now();
    let family = default_family();
    let reports = vec![
        check_flat(family).unwrap(),
        check_nothinsh2(family, &nested_quad()).unwrap(),
        check_bigmass(family, &quad()).unwrap(),
        check_sign_expectation(family, 32, &nested_quad(), SEED).unwrap(),
    ];
    let dir = std::env::temp_dir().join("depthsep_acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("informational_reports.csv");
    write_reports_csv(&path, &reports).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut ok = text.lines().count() == 5;
    let mut detail = String::new();
    for rep in &reports {
        ok &= rep.margin.is_finite();
        ok &= text.contains(&rep.lemma_id);
        detail.push_str(&format!("{}: margin {:+.3e}; ", rep.lemma_id, rep.margin));
    }
    report("12 informational margins", ok, &detail, t.elapsed().as_secs_f64(), 900.0);
}

#[test]
fn criterion_13_experiment_determinism_and_sanity() {
    let t = Instant::now();
    // built target at d=3 defaults
    let d3 = 3u32;
    let n3 = default_interval_count(d3, ALPHA);
    let family = build_family(d3, ALPHA, n3).unwrap();
    let signs = select_signs(&family, 8, &nested_quad(), SEED).unwrap();
    let hard = HardFunction::new(family, signs).unwrap();
    let built = build_prop_approx_net(&hard, DELTA, &Activation::relu()).unwrap();
    let density3 = build_density(d3, 1e-3, &quad()).unwrap();
    let fast = built.fast;
    let target = move |x: &[f64]| fast.eval(x);

    let base = TrainConfig {
        d: d3,
        width: 1,
        n_train: 8192,
        n_eval: 10_000,
        steps: 4000,
        lr: 0.02,
        restarts: 8,
        batch: 64,
        seed: SEED,
        activation: ActivationKind::Relu,
    };
    let widths = [1usize, 2, 4, 8, 16];
    let (rows_a, ck_a) = width_sweep(&target, &widths, &base, &density3).unwrap();
    let (rows_b, ck_b) = width_sweep(&target, &widths, &base, &density3).unwrap();
    let header = vec![
        ("seed".to_string(), SEED.to_string()),
        ("tail_tol".to_string(), "0.001".to_string()),
        ("target".to_string(), "net".to_string()),
        ("eval_checksum".to_string(), format!("{ck_a:016x}")),
    ];
    let csv_a = render_sweep_csv(&header, &rows_a, false);
    let csv_b = render_sweep_csv(&header, &rows_b, false);
    let deterministic = csv_a == csv_b && ck_a == ck_b;

    // schema conformance
    let mut lines = csv_a.lines().skip_while(|l| l.starts_with('#'));
    let schema_ok = lines.next() == Some("width,train_loss,eval_error,std_err,restarts,seconds")
        && csv_a.lines().filter(|l| !l.starts_with('#')).count() == widths.len() + 1;

    // more capacity never statistically hurts best-of-restarts: errors are
    // non-increasing within 2 joint standard errors along the sweep
    let monotone_ok = rows_a.windows(2).all(|w| {
        let joint = (w[0].eval_std_error.powi(2) + w[1].eval_std_error.powi(2)).sqrt();
        w[1].eval_l2mu_error <= w[0].eval_l2mu_error + 2.0 * joint
    });

    // realizable target: a single ReLU unit is learnable to 1e-3
    let act = Activation::relu();
    let target_net = TwoLayerNet {
        d: 2,
        activation: ActivationKind::Relu,
        units: vec![TwoLayerUnit { v: 1.0, w: vec![1.0, 0.0], b: 0.0 }],
    };
    let realizable = move |x: &[f64]| target_net.eval(&act, x).unwrap();
    let density2 = build_density(2, 1e-3, &quad()).unwrap();
    let cfg2 = TrainConfig {
        d: 2,
        width: 1,
        n_train: 8192,
        n_eval: 10_000,
        steps: 30_000,
        lr: 0.02,
        restarts: 8,
        batch: 64,
        seed: 42,
        activation: ActivationKind::Relu,
    };
    let (_, row) = depthsep_core::experiment::train_two_layer(
        &realizable,
        &cfg2,
        &density2,
        None,
    )
    .unwrap();
    let realizable_ok = row.eval_l2mu_error <= 1e-3;

    report(
        "13 experiment determinism/sanity",
        deterministic && schema_ok && realizable_ok && monotone_ok,
        &format!(
            "byte-identical: {deterministic}; schema: {schema_ok}; capacity monotone within noise: {monotone_ok}; realizable eval error {:.2e} <= 1e-3; sweep errors {:?}",
            row.eval_l2mu_error,
            rows_a.iter().map(|r| r.eval_l2mu_error).collect::<Vec<_>>()
        ),
        t.elapsed().as_secs_f64(),
        1800.0,
    );
}
