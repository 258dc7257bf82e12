//! Network construction: the Assumption-style univariate approximators
//! (ReLU and threshold), evaluable 2-layer and 3-layer network types, and
//! the 3-layer compiler for Lipschitz radial functions.

mod radial3;
mod univariate;

pub use radial3::{build_prop_approx_net, build_radial_3layer, FastRadialEval, RadialNetBuild};
pub use univariate::{
    build_univariate_relu, build_univariate_threshold, pl_from_knots, staircase_from_knots,
};

use crate::error::{Error, Result};
use std::sync::Arc;

/// Scalar nonlinearity together with its approximation constant c_σ and
/// the polynomial growth certificate |σ(x)| ≤ C(1+|x|^α).
#[derive(Clone)]
pub struct Activation {
    pub kind: ActivationKind,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub c_sigma: f64,
    pub growth: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    Relu,
    Threshold,
    Custom,
}

impl ActivationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ActivationKind::Relu => "relu",
            ActivationKind::Threshold => "threshold",
            ActivationKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(ActivationKind::Relu),
            "threshold" => Ok(ActivationKind::Threshold),
            "custom" => Ok(ActivationKind::Custom),
            other => Err(Error::Parse(format!("unknown activation kind: {other}"))),
        }
    }
}

impl std::fmt::Debug for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Activation")
            .field("kind", &self.kind)
            .field("c_sigma", &self.c_sigma)
            .finish()
    }
}

impl Activation {
    /// max(0, x); the constructive builder certifies width ≤ 3RL/δ.
    pub fn relu() -> Self {
        Self {
            kind: ActivationKind::Relu,
            eval: Arc::new(|x: f64| x.max(0.0)),
            c_sigma: 3.0,
            growth: (1.0, 1.0),
        }
    }

    /// 1{x ≥ 0}; a staircase gets width ≤ 2RL/δ + 1, so c_σ = 2.
    pub fn threshold() -> Self {
        Self {
            kind: ActivationKind::Threshold,
            eval: Arc::new(|x: f64| if x >= 0.0 { 1.0 } else { 0.0 }),
            c_sigma: 2.0,
            growth: (1.0, 1.0),
        }
    }

    /// A caller-supplied activation. The univariate builders reject it;
    /// it exists so hand-built nets with other nonlinearities can still
    /// be evaluated.
    pub fn custom(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        c_sigma: f64,
        growth: (f64, f64),
    ) -> Self {
        Self { kind: ActivationKind::Custom, eval: Arc::new(eval), c_sigma, growth }
    }

    pub fn from_kind(kind: ActivationKind) -> Result<Self> {
        match kind {
            ActivationKind::Relu => Ok(Self::relu()),
            ActivationKind::Threshold => Ok(Self::threshold()),
            ActivationKind::Custom => {
                Err(Error::Config("custom activations must be supplied explicitly".into()))
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Spot-check the declared growth bound on a grid |x| ≤ 1e6.
    pub fn validate(&self) -> Result<()> {
        if self.c_sigma < 1.0 {
            return Err(Error::Config(format!("c_sigma must be >= 1, got {}", self.c_sigma)));
        }
        let (c, alpha) = self.growth;
        if !(c > 0.0 && alpha > 0.0) {
            return Err(Error::Config("growth constants must be positive".into()));
        }
        let mut x = -1e6;
        while x <= 1e6 {
            let v = self.value(x).abs();
            if v > c * (1.0 + x.abs().powf(alpha)) {
                return Err(Error::Verification(format!(
                    "activation violates its growth bound at x={x}: |σ| = {v}"
                )));
            }
            x += 4.0e4 + 1.7; // irregular stride, 50 probes
        }
        Ok(())
    }
}

/// One term α·σ(β x − γ) of the Assumption form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateTerm {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// h(x) = a + Σ α_i σ(β_i x − γ_i).
#[derive(Debug, Clone, Default)]
pub struct UnivariateApproximator {
    pub a: f64,
    pub terms: Vec<UnivariateTerm>,
}

impl UnivariateApproximator {
    pub fn width(&self) -> usize {
        self.terms.len()
    }

    pub fn value(&self, act: &Activation, x: f64) -> f64 {
        let mut acc = self.a;
        for t in &self.terms {
            acc += t.alpha * act.value(t.beta * x - t.gamma);
        }
        acc
    }
}

/// Σ v_i σ(⟨w_i, x⟩ + b_i).
#[derive(Debug, Clone)]
pub struct TwoLayerNet {
    pub d: u32,
    pub activation: ActivationKind,
    pub units: Vec<TwoLayerUnit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerUnit {
    pub v: f64,
    pub w: Vec<f64>,
    pub b: f64,
}

impl TwoLayerNet {
    pub fn width(&self) -> usize {
        self.units.len()
    }

    pub fn eval(&self, act: &Activation, x: &[f64]) -> Result<f64> {
        if x.len() != self.d as usize {
            return Err(Error::Domain(format!(
                "input dimension {} does not match net dimension {}",
                x.len(),
                self.d
            )));
        }
        let mut acc = 0.0;
        for u in &self.units {
            let z: f64 = u.w.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + u.b;
            acc += u.v * act.value(z);
        }
        Ok(acc)
    }
}

/// First-layer unit σ(⟨w, x⟩ + b), shared across all second-layer units.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerUnit {
    pub w: Vec<f64>,
    pub b: f64,
}

/// Second-layer unit u·σ(Σ_j v_j h_j + c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterUnit {
    pub u: f64,
    pub c: f64,
}

/// The v_{i,j} matrix between the layers. Compiled radial nets share one
/// inner combination across all outer units, so their coupling is rank
/// one and stays O(inner + outer) in memory.
#[derive(Debug, Clone)]
pub enum Coupling {
    /// `v[i][j]`, one row per outer unit.
    Dense(Vec<Vec<f64>>),
    /// `v[i][j] = row_gain[i] · col[j]`.
    Scaled { col: Vec<f64>, row_gain: Vec<f64> },
}

/// Σ_i u_i σ(Σ_j v_{i,j} σ(⟨w_j, x⟩ + b_j) + c_i).
#[derive(Debug, Clone)]
pub struct ThreeLayerNet {
    pub d: u32,
    pub activation: ActivationKind,
    pub inner: Vec<InnerUnit>,
    pub coupling: Coupling,
    pub outer: Vec<OuterUnit>,
}

impl ThreeLayerNet {
    /// Width of the network: the larger of the two hidden layers.
    pub fn width(&self) -> usize {
        self.inner.len().max(self.outer.len())
    }

    pub fn validate(&self) -> Result<()> {
        for unit in &self.inner {
            if unit.w.len() != self.d as usize {
                return Err(Error::Config("inner unit dimension mismatch".into()));
            }
        }
        match &self.coupling {
            Coupling::Dense(rows) => {
                if rows.len() != self.outer.len()
                    || rows.iter().any(|r| r.len() != self.inner.len())
                {
                    return Err(Error::Config("dense coupling shape mismatch".into()));
                }
            }
            Coupling::Scaled { col, row_gain } => {
                if col.len() != self.inner.len() || row_gain.len() != self.outer.len() {
                    return Err(Error::Config("scaled coupling shape mismatch".into()));
                }
            }
        }
        Ok(())
    }

    /// Exact formula evaluation.
    pub fn eval(&self, act: &Activation, x: &[f64]) -> Result<f64> {
        if x.len() != self.d as usize {
            return Err(Error::Domain(format!(
                "input dimension {} does not match net dimension {}",
                x.len(),
                self.d
            )));
        }
        let hs: Vec<f64> = self
            .inner
            .iter()
            .map(|u| {
                let z: f64 = u.w.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + u.b;
                act.value(z)
            })
            .collect();
        let mut out = 0.0;
        match &self.coupling {
            Coupling::Dense(rows) => {
                for (unit, row) in self.outer.iter().zip(rows) {
                    let pre: f64 = row.iter().zip(&hs).map(|(v, h)| v * h).sum();
                    out += unit.u * act.value(pre + unit.c);
                }
            }
            Coupling::Scaled { col, row_gain } => {
                let combo: f64 = col.iter().zip(&hs).map(|(v, h)| v * h).sum();
                for (unit, gain) in self.outer.iter().zip(row_gain) {
                    out += unit.u * act.value(gain * combo + unit.c);
                }
            }
        }
        Ok(out)
    }

    /// Materialize the coupling as a dense matrix (small nets only).
    pub fn to_dense(&self) -> Result<ThreeLayerNet> {
        let rows = match &self.coupling {
            Coupling::Dense(rows) => rows.clone(),
            Coupling::Scaled { col, row_gain } => {
                if self.inner.len().saturating_mul(self.outer.len()) > 50_000_000 {
                    return Err(Error::Config("dense materialization too large".into()));
                }
                row_gain.iter().map(|g| col.iter().map(|v| g * v).collect()).collect()
            }
        };
        Ok(ThreeLayerNet { coupling: Coupling::Dense(rows), ..self.clone() })
    }
}

/// Evaluate a 2-layer net (free function form of the operation table).
pub fn eval_two_layer(net: &TwoLayerNet, act: &Activation, x: &[f64]) -> Result<f64> {
    net.eval(act, x)
}

/// Evaluate a 3-layer net (free function form of the operation table).
pub fn eval_three_layer(net: &ThreeLayerNet, act: &Activation, x: &[f64]) -> Result<f64> {
    net.eval(act, x)
}

// ---------------------------------------------------------------------------
// Serialization: flat plain text, one parameter row per unit, f64 values
// as 16-hex-digit bit patterns so round-trips are bit-exact.
// ---------------------------------------------------------------------------

fn hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn unhex(s: &str) -> Result<f64> {
    u64::from_str_radix(s, 16)
        .map(f64::from_bits)
        .map_err(|e| Error::Parse(format!("bad f64 hex '{s}': {e}")))
}

impl TwoLayerNet {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# depthsep network v1\n");
        out.push_str("layers 2\n");
        out.push_str(&format!("d {}\n", self.d));
        out.push_str(&format!("activation {}\n", self.activation.as_str()));
        out.push_str(&format!("units {}\n", self.units.len()));
        for u in &self.units {
            out.push_str(&hex(u.v));
            for w in &u.w {
                out.push(' ');
                out.push_str(&hex(*w));
            }
            out.push(' ');
            out.push_str(&hex(u.b));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        expect_kv(lines.next(), "layers", "2")?;
        let d: u32 = parse_kv(lines.next(), "d")?;
        let activation = ActivationKind::parse(&parse_kv::<String>(lines.next(), "activation")?)?;
        let count: usize = parse_kv(lines.next(), "units")?;
        let mut units = Vec::with_capacity(count);
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| Error::Parse("missing unit row".into()))?;
            let vals: Vec<f64> =
                line.split_whitespace().map(unhex).collect::<Result<_>>()?;
            if vals.len() != d as usize + 2 {
                return Err(Error::Parse("unit row arity mismatch".into()));
            }
            units.push(TwoLayerUnit {
                v: vals[0],
                w: vals[1..=d as usize].to_vec(),
                b: vals[d as usize + 1],
            });
        }
        Ok(TwoLayerNet { d, activation, units })
    }
}

impl ThreeLayerNet {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# depthsep network v1\n");
        out.push_str("layers 3\n");
        out.push_str(&format!("d {}\n", self.d));
        out.push_str(&format!("width {}\n", self.width()));
        out.push_str(&format!("activation {}\n", self.activation.as_str()));
        out.push_str(&format!("inner {}\n", self.inner.len()));
        for u in &self.inner {
            let mut first = true;
            for w in &u.w {
                if !first {
                    out.push(' ');
                }
                out.push_str(&hex(*w));
                first = false;
            }
            out.push(' ');
            out.push_str(&hex(u.b));
            out.push('\n');
        }
        match &self.coupling {
            Coupling::Scaled { col, row_gain: _ } => {
                out.push_str(&format!("coupling scaled {}\n", col.len()));
                for v in col {
                    out.push_str(&hex(*v));
                    out.push('\n');
                }
            }
            Coupling::Dense(rows) => {
                out.push_str(&format!("coupling dense {}\n", rows.len()));
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|v| hex(*v)).collect();
                    out.push_str(&cells.join(" "));
                    out.push('\n');
                }
            }
        }
        out.push_str(&format!("outer {}\n", self.outer.len()));
        let gains: Option<&Vec<f64>> = match &self.coupling {
            Coupling::Scaled { row_gain, .. } => Some(row_gain),
            Coupling::Dense(_) => None,
        };
        for (i, u) in self.outer.iter().enumerate() {
            out.push_str(&hex(u.u));
            out.push(' ');
            out.push_str(&hex(u.c));
            if let Some(g) = gains {
                out.push(' ');
                out.push_str(&hex(g[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        expect_kv(lines.next(), "layers", "3")?;
        let d: u32 = parse_kv(lines.next(), "d")?;
        let declared_width: usize = parse_kv(lines.next(), "width")?;
        let activation = ActivationKind::parse(&parse_kv::<String>(lines.next(), "activation")?)?;
        let inner_count: usize = parse_kv(lines.next(), "inner")?;
        let mut inner = Vec::with_capacity(inner_count);
        for _ in 0..inner_count {
            let line = lines.next().ok_or_else(|| Error::Parse("missing inner row".into()))?;
            let vals: Vec<f64> = line.split_whitespace().map(unhex).collect::<Result<_>>()?;
            if vals.len() != d as usize + 1 {
                return Err(Error::Parse("inner row arity mismatch".into()));
            }
            inner.push(InnerUnit { w: vals[..d as usize].to_vec(), b: vals[d as usize] });
        }
        let coupling_line =
            lines.next().ok_or_else(|| Error::Parse("missing coupling header".into()))?;
        let mut parts = coupling_line.split_whitespace();
        if parts.next() != Some("coupling") {
            return Err(Error::Parse("expected coupling header".into()));
        }
        let mode = parts.next().ok_or_else(|| Error::Parse("missing coupling mode".into()))?;
        let count: usize = parts
            .next()
            .ok_or_else(|| Error::Parse("missing coupling count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad coupling count: {e}")))?;
        let mut scaled_col = Vec::new();
        let mut dense_rows = Vec::new();
        match mode {
            "scaled" => {
                for _ in 0..count {
                    let line =
                        lines.next().ok_or_else(|| Error::Parse("missing col row".into()))?;
                    scaled_col.push(unhex(line.trim())?);
                }
            }
            "dense" => {
                for _ in 0..count {
                    let line =
                        lines.next().ok_or_else(|| Error::Parse("missing dense row".into()))?;
                    dense_rows
                        .push(line.split_whitespace().map(unhex).collect::<Result<Vec<f64>>>()?);
                }
            }
            other => return Err(Error::Parse(format!("unknown coupling mode: {other}"))),
        }
        let outer_count: usize = parse_kv(lines.next(), "outer")?;
        let mut outer = Vec::with_capacity(outer_count);
        let mut gains = Vec::with_capacity(outer_count);
        for _ in 0..outer_count {
            let line = lines.next().ok_or_else(|| Error::Parse("missing outer row".into()))?;
            let vals: Vec<f64> = line.split_whitespace().map(unhex).collect::<Result<_>>()?;
            match (mode, vals.len()) {
                ("scaled", 3) => {
                    outer.push(OuterUnit { u: vals[0], c: vals[1] });
                    gains.push(vals[2]);
                }
                ("dense", 2) => outer.push(OuterUnit { u: vals[0], c: vals[1] }),
                _ => return Err(Error::Parse("outer row arity mismatch".into())),
            }
        }
        let coupling = if mode == "scaled" {
            Coupling::Scaled { col: scaled_col, row_gain: gains }
        } else {
            Coupling::Dense(dense_rows)
        };
        let net = ThreeLayerNet { d, activation, inner, coupling, outer };
        net.validate()?;
        if net.width() != declared_width {
            return Err(Error::Parse(format!(
                "declared width {declared_width} does not match unit counts ({})",
                net.width()
            )));
        }
        Ok(net)
    }
}

fn parse_kv<T: std::str::FromStr>(line: Option<&str>, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let line = line.ok_or_else(|| Error::Parse(format!("missing '{key}' line")))?;
    let (k, v) = line
        .split_once(' ')
        .ok_or_else(|| Error::Parse(format!("malformed '{key}' line: {line}")))?;
    if k != key {
        return Err(Error::Parse(format!("expected key '{key}', got '{k}'")));
    }
    v.trim().parse::<T>().map_err(|e| Error::Parse(format!("bad value for '{key}': {e}")))
}

fn expect_kv(line: Option<&str>, key: &str, want: &str) -> Result<()> {
    let got: String = parse_kv(line, key)?;
    if got != want {
        return Err(Error::Parse(format!("expected {key} {want}, got {got}")));
    }
    Ok(())
}
