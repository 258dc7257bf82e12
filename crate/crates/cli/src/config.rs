//! Run configuration: a plain `key = value` file plus command-line
//! overrides. Every field is validated before any computation; unknown
//! keys are rejected.

use depthsep_core::error::{Error, Result};
use depthsep_core::hardfn::default_interval_count;
use depthsep_core::netbuild::ActivationKind;
use depthsep_core::quad::PanelRule;
use depthsep_core::radial::QuadratureSpec;
use depthsep_core::verify::VerifyConfig;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub d: u32,
    pub alpha: f64,
    pub n: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub delta: f64,
    pub n_mc: usize,
    pub tail_tol: f64,
    pub rel_tol: f64,
    pub nested_rel_tol: f64,
    pub nodes_per_wavelength: usize,
    pub panel_rule: PanelRule,
    pub out: PathBuf,
    pub threads: usize,
    pub widths: Vec<usize>,
    pub n_train: usize,
    pub n_eval: usize,
    pub steps: usize,
    pub lr: f64,
    pub restarts: usize,
    pub batch: usize,
    pub activation: ActivationKind,
    pub target: TargetKind,
    pub timing: bool,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// The compiled 3-layer network.
    Net,
    /// The discontinuous signed-shell function itself.
    Gtilde,
    /// The Lipschitz surrogate.
    Surrogate,
}

impl TargetKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "net" => Ok(TargetKind::Net),
            "gtilde" => Ok(TargetKind::Gtilde),
            "surrogate" => Ok(TargetKind::Surrogate),
            other => Err(Error::Config(format!(
                "target must be net|gtilde|surrogate, got '{other}'"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TargetKind::Net => "net",
            TargetKind::Gtilde => "gtilde",
            TargetKind::Surrogate => "surrogate",
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 4,
            alpha: 25.0,
            n: None,
            seed: 1,
            trials: 64,
            delta: 0.05,
            n_mc: 100_000,
            tail_tol: 1e-3,
            rel_tol: 1e-4,
            nested_rel_tol: 1e-3,
            nodes_per_wavelength: 24,
            panel_rule: PanelRule::default(),
            out: PathBuf::from("out"),
            threads: 0,
            widths: vec![1, 2, 4, 8, 16],
            n_train: 8192,
            n_eval: 10_000,
            steps: 4000,
            lr: 0.02,
            restarts: 8,
            batch: 64,
            activation: ActivationKind::Relu,
            target: TargetKind::Net,
            timing: false,
            sample_count: 1000,
        }
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("expected a boolean, got '{other}'"))),
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::Config(format!("bad value for '{key}': {e}")))
}

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "d" => self.d = num(key, v)?,
            "alpha" => self.alpha = num(key, v)?,
            "n" => self.n = Some(num(key, v)?),
            "seed" => self.seed = num(key, v)?,
            "trials" => self.trials = num(key, v)?,
            "delta" => self.delta = num(key, v)?,
            "n_mc" => self.n_mc = num(key, v)?,
            "tail_tol" => self.tail_tol = num(key, v)?,
            "rel_tol" => self.rel_tol = num(key, v)?,
            "nested_rel_tol" => self.nested_rel_tol = num(key, v)?,
            "nodes_per_wavelength" => self.nodes_per_wavelength = num(key, v)?,
            "panel_rule" => {
                self.panel_rule = match v {
                    "simpson" => PanelRule::CompositeSimpson,
                    other => {
                        if let Some(order) = other.strip_prefix("gauss:") {
                            PanelRule::GaussLegendre { order: num(key, order)? }
                        } else {
                            return Err(Error::Config(format!(
                                "panel_rule must be 'simpson' or 'gauss:<order>', got '{other}'"
                            )));
                        }
                    }
                }
            }
            "out" => self.out = PathBuf::from(v),
            "threads" => self.threads = num(key, v)?,
            "widths" => {
                self.widths = v
                    .split(',')
                    .map(|s| num::<usize>(key, s.trim()))
                    .collect::<Result<Vec<_>>>()?;
            }
            "n_train" => self.n_train = num(key, v)?,
            "n_eval" => self.n_eval = num(key, v)?,
            "steps" => self.steps = num(key, v)?,
            "lr" => self.lr = num(key, v)?,
            "restarts" => self.restarts = num(key, v)?,
            "batch" => self.batch = num(key, v)?,
            "activation" => self.activation = ActivationKind::parse(v)?,
            "target" => self.target = TargetKind::parse(v)?,
            "timing" => self.timing = parse_bool(v)?,
            "sample_count" => self.sample_count = num(key, v)?,
            other => return Err(Error::Config(format!("unknown config key: '{other}'"))),
        }
        Ok(())
    }

    /// Parse a config file: one `key = value` per line, `#` comments.
    pub fn load_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config("d must be >= 2".into()));
        }
        if !(self.alpha >= 1.0) {
            return Err(Error::Config("alpha must be >= 1".into()));
        }
        if self.interval_count() == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if self.trials == 0 || self.restarts == 0 || self.batch == 0 || self.steps == 0 {
            return Err(Error::Config("counts must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config("delta must lie in (0, 1)".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol <= 0.01) {
            return Err(Error::Config("tail_tol must lie in (0, 0.01]".into()));
        }
        self.quad_spec().validate()?;
        self.nested_quad_spec().validate()?;
        Ok(())
    }

    pub fn interval_count(&self) -> usize {
        self.n.unwrap_or_else(|| default_interval_count(self.d, self.alpha))
    }

    pub fn quad_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            nodes_per_wavelength: self.nodes_per_wavelength,
            panel_rule: self.panel_rule,
            rel_tol: self.rel_tol,
        }
    }

    pub fn nested_quad_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            nodes_per_wavelength: self.nodes_per_wavelength,
            panel_rule: self.panel_rule,
            rel_tol: self.nested_rel_tol,
        }
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            d: self.d,
            alpha: self.alpha,
            n: self.n,
            seed: self.seed,
            trials: self.trials,
            delta: self.delta,
            n_mc: self.n_mc,
            tail_tol: self.tail_tol,
            quad: self.quad_spec(),
            nested_quad: self.nested_quad_spec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("frobnicate", "1").is_err());
        assert!(cfg.set("d", "two").is_err());
        assert!(cfg.set("target", "banana").is_err());
        assert!(cfg.set("panel_rule", "lobatto").is_err());
    }

    #[test]
    fn parses_file_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\n d = 3 \nalpha = 2.5 # inline\nwidths = 1, 2, 4\n")
            .unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(&path).unwrap();
        assert_eq!(cfg.d, 3);
        assert_eq!(cfg.alpha, 2.5);
        assert_eq!(cfg.widths, vec![1, 2, 4]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn validation_catches_bad_combinations() {
        let mut cfg = RunConfig::default();
        cfg.d = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.alpha = 0.2;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.tail_tol = 0.5;
        assert!(cfg.validate().is_err());
    }
}
