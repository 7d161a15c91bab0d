//! Run configuration: flat JSON with dotted keys.
//!
//! Nested objects are accepted too and flattened, so `{"sweep": {"axis1":
//! {"name": "delta"}}}` and `{"sweep.axis1.name": "delta"}` are the same.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use otto_core::engine::{Beta, EngineSpec, Mode};
use otto_core::qmath::{CMatrix, HermitianOperator, KrausChannel, UnitaryOperator};
use otto_core::qubit::{QubitParams, VChoice};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSel {
    Dephased,
    Undephased,
    Both,
}

impl ModeSel {
    pub fn modes(self) -> &'static [Mode] {
        match self {
            ModeSel::Dephased => &[Mode::Dephased],
            ModeSel::Undephased => &[Mode::Undephased],
            ModeSel::Both => &Mode::ALL,
        }
    }
}

impl FromStr for ModeSel {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "dephased" => Ok(ModeSel::Dephased),
            "undephased" => Ok(ModeSel::Undephased),
            "both" => Ok(ModeSel::Both),
            _ => Err(CliError::Config(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Work,
    Efficiency,
    ReliabilityW,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Work => "work",
            Target::Efficiency => "efficiency",
            Target::ReliabilityW => "reliability_w",
        }
    }
}

impl FromStr for Target {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "work" => Ok(Target::Work),
            "efficiency" => Ok(Target::Efficiency),
            "reliability_w" | "reliabilityw" | "reliability" => Ok(Target::ReliabilityW),
            _ => Err(CliError::Config(format!("unknown target {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            _ => Err(CliError::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Nu1,
    Nu2,
    Beta,
    Delta,
    Phi,
    Alpha,
    Chi,
    /// Sets `alpha` from `theta` with `chi = 0`.
    Theta,
}

impl AxisName {
    pub fn name(self) -> &'static str {
        match self {
            AxisName::Nu1 => "nu1",
            AxisName::Nu2 => "nu2",
            AxisName::Beta => "beta",
            AxisName::Delta => "delta",
            AxisName::Phi => "phi",
            AxisName::Alpha => "alpha",
            AxisName::Chi => "chi",
            AxisName::Theta => "theta",
        }
    }

    pub fn apply(self, p: &mut QubitParams, x: f64) -> Result<(), CliError> {
        match self {
            AxisName::Nu1 => p.nu1 = x,
            AxisName::Nu2 => p.nu2 = x,
            AxisName::Beta => p.beta = Beta::new(x)?,
            AxisName::Delta => p.delta = x,
            AxisName::Phi => p.phi = x,
            AxisName::Alpha => p.alpha = x,
            AxisName::Chi => p.chi = x,
            AxisName::Theta => {
                if !(0.0..=0.5).contains(&x) {
                    return Err(CliError::Param(format!("theta = {x} outside [0, 1/2]")));
                }
                *p = p.with_theta(x);
            }
        }
        Ok(())
    }
}

impl FromStr for AxisName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "nu1" => AxisName::Nu1,
            "nu2" => AxisName::Nu2,
            "beta" => AxisName::Beta,
            "delta" | "delta_p" => AxisName::Delta,
            "phi" => AxisName::Phi,
            "alpha" => AxisName::Alpha,
            "chi" => AxisName::Chi,
            "theta" => AxisName::Theta,
            _ => return Err(CliError::Config(format!("sweep axis {s:?} is not a parameter"))),
        })
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == n { self.to } else { self.from + (self.to - self.from) * i as f64 / n as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
}

impl Sweep {
    pub fn axes(&self) -> Vec<Axis> {
        std::iter::once(self.axis1).chain(self.axis2).collect()
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    Qubit { params: QubitParams, v: VChoice },
    SpecFile { path: PathBuf, spec: Box<EngineSpec> },
}

#[derive(Debug, Clone)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
    /// Columns drawn in SVG charts.
    pub columns: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Source,
    pub mode: ModeSel,
    pub sweep: Option<Sweep>,
    pub target: Option<Target>,
    pub output: OutputSpec,
    pub seed: u64,
    /// Fixed inverse temperature for `check`, if given.
    pub beta_override: Option<Beta>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_json_str("{}", None).expect("empty config is valid")
    }
}

pub const DEFAULT_PARAMS: QubitParams = QubitParams {
    nu1: 1.0,
    nu2: 2.0,
    beta: Beta::ZERO,
    delta: 0.0,
    phi: 0.0,
    alpha: 0.0,
    chi: 0.0,
};

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text, path.parent())
    }

    /// `base_dir` resolves a relative `spec_file`.
    pub fn from_json_str(text: &str, base_dir: Option<&Path>) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let Value::Object(_) = value else {
            return Err(CliError::Config("top level must be an object".into()));
        };
        let mut flat = BTreeMap::new();
        flatten("", &value, &mut flat);
        let mut keys = Keys(flat);

        let mut params = DEFAULT_PARAMS;
        params.beta = Beta::new(0.6)?;
        let beta_given = keys.0.contains_key("beta");
        for (key, slot) in [
            ("nu1", &mut params.nu1),
            ("nu2", &mut params.nu2),
            ("delta", &mut params.delta),
            ("phi", &mut params.phi),
            ("alpha", &mut params.alpha),
            ("chi", &mut params.chi),
        ] {
            if let Some(v) = keys.take(key) {
                *slot = number(key, &v)?;
            }
        }
        let beta = keys.take("beta").map(|v| beta_value(&v)).transpose()?;
        if let Some(b) = beta {
            params.beta = b;
        }
        if let Some(v) = keys.take("theta") {
            let theta = number("theta", &v)?;
            AxisName::Theta.apply(&mut params, theta)?;
        }
        let v_choice = match keys.take_str("v")?.as_deref() {
            None | Some("transpose") => VChoice::Transpose,
            Some("adjoint") => VChoice::Adjoint,
            Some(other) => return Err(CliError::Config(format!("unknown v choice {other:?}"))),
        };

        let spec_file = keys.take_str("spec_file")?;
        let mode = keys.take_str("mode")?.map(|s| s.parse()).transpose()?.unwrap_or(ModeSel::Both);
        let target = keys.take_str("target")?.map(|s| s.parse()).transpose()?;
        let seed = match keys.take("seed") {
            None => 0,
            Some(v) => v
                .as_u64()
                .ok_or_else(|| CliError::Config(format!("seed must be a non-negative integer, got {v}")))?,
        };
        let path = keys.take_str("output.path")?.map(PathBuf::from);
        let format = keys.take_str("output.format")?.map(|s| s.parse()).transpose()?.unwrap_or(Format::Csv);
        let columns = match keys.take("output.columns") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|c| c.as_str().map(String::from))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| CliError::Config("output.columns must be strings".into()))?,
            Some(other) => return Err(CliError::Config(format!("output.columns must be a list, got {other}"))),
        };

        let axis1 = take_axis(&mut keys, "sweep.axis1")?;
        let axis2 = take_axis(&mut keys, "sweep.axis2")?;
        let sweep = match (axis1, axis2) {
            (None, None) => None,
            (Some(a), b) => Some(Sweep { axis1: a, axis2: b }),
            (None, Some(_)) => return Err(CliError::Config("sweep.axis2 given without sweep.axis1".into())),
        };

        if let Some(k) = keys.0.keys().next() {
            return Err(CliError::Config(format!("unknown key {k:?}")));
        }

        let source = match spec_file {
            Some(file) => {
                if sweep.is_some() {
                    return Err(CliError::Config("sweeps need the qubit model, not a spec_file".into()));
                }
                let path = match base_dir {
                    Some(dir) if Path::new(&file).is_relative() => dir.join(&file),
                    _ => PathBuf::from(&file),
                };
                let spec = load_spec_file(&path, beta)?;
                Source::SpecFile { path, spec: Box::new(spec) }
            }
            None => {
                params.validate()?;
                Source::Qubit { params, v: v_choice }
            }
        };

        Ok(RunConfig {
            source,
            mode,
            sweep,
            target,
            output: OutputSpec { path, format, columns },
            seed,
            beta_override: if beta_given { beta } else { None },
        })
    }

    pub fn qubit(&self) -> Option<(QubitParams, VChoice)> {
        match &self.source {
            Source::Qubit { params, v } => Some((*params, *v)),
            Source::SpecFile { .. } => None,
        }
    }
}

struct Keys(BTreeMap<String, Value>);

impl Keys {
    /// Looks up `key`, also under the `params.` prefix.
    fn take(&mut self, key: &str) -> Option<Value> {
        self.0.remove(key).or_else(|| self.0.remove(&format!("params.{key}")))
    }

    fn take_str(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(CliError::Config(format!("{key} must be a string, got {other}"))),
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn take_axis(keys: &mut Keys, prefix: &str) -> Result<Option<Axis>, CliError> {
    let name = keys.take_str(&format!("{prefix}.name"))?;
    let from = keys.take(&format!("{prefix}.from"));
    let to = keys.take(&format!("{prefix}.to"));
    let steps = keys.take(&format!("{prefix}.steps"));
    let Some(name) = name else {
        if from.is_some() || to.is_some() || steps.is_some() {
            return Err(CliError::Config(format!("{prefix}.name is missing")));
        }
        return Ok(None);
    };
    let name: AxisName = name.parse()?;
    let need = |v: Option<Value>, field: &str| {
        v.ok_or_else(|| CliError::Config(format!("{prefix}.{field} is missing")))
    };
    let from = number("from", &need(from, "from")?)?;
    let to = number("to", &need(to, "to")?)?;
    let steps_v = need(steps, "steps")?;
    let steps = steps_v
        .as_u64()
        .ok_or_else(|| CliError::Config(format!("{prefix}.steps must be an integer, got {steps_v}")))?
        as usize;
    if steps < 2 {
        return Err(CliError::Param(format!("{prefix}.steps = {steps}, need at least 2")));
    }
    if from.is_nan() || to.is_nan() || from > to {
        return Err(CliError::Param(format!("{prefix}: from {from} > to {to}")));
    }
    Ok(Some(Axis { name, from, to, steps }))
}

fn number(key: &str, v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| CliError::Config(format!("{key}: bad number"))),
        Value::String(s) => parse_angle(s).ok_or_else(|| CliError::Config(format!("{key}: cannot parse {s:?}"))),
        other => Err(CliError::Config(format!("{key} must be a number, got {other}"))),
    }
}

fn beta_value(v: &Value) -> Result<Beta, CliError> {
    match v {
        Value::String(s) if s.trim().eq_ignore_ascii_case("inf") => Ok(Beta::INFINITE),
        other => Ok(Beta::new(number("beta", other)?)?),
    }
}

/// Reads `"pi"`, `"pi/4"`, `"3pi/4"`, `"3*pi/4"`, `"-pi/2"`, `"0.25"`,
/// `"1/3"`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.to_ascii_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t.as_str(), None),
    };
    let (neg, num) = match num.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, num.strip_prefix('+').unwrap_or(num)),
    };
    let value = if let Some(coef) = num.strip_suffix("pi").or_else(|| num.strip_suffix("π")) {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
        c * PI
    } else {
        num.parse::<f64>().ok()?
    };
    let value = match den {
        Some(d) => value / d.parse::<f64>().ok().filter(|x| *x != 0.0)?,
        None => value,
    };
    value.is_finite().then_some(if neg { -value } else { value })
}

/// General-dimension cycle: `{"h1": M, "h2": M, "u": M, "v": M,
/// "kraus": [M, ...], "beta": b}` where `M` is a list of rows and each
/// entry is a number or `[re, im]`.
fn load_spec_file(path: &Path, beta_override: Option<Beta>) -> Result<EngineSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read spec file {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("spec file: {e}")))?;
    let field = |k: &str| v.get(k).ok_or_else(|| CliError::Config(format!("spec file: missing {k:?}")));
    let h1 = HermitianOperator::new(matrix(field("h1")?)?).map_err(param)?;
    let h2 = HermitianOperator::new(matrix(field("h2")?)?).map_err(param)?;
    let u = UnitaryOperator::new(matrix(field("u")?)?).map_err(param)?;
    let vv = UnitaryOperator::new(matrix(field("v")?)?).map_err(param)?;
    let kraus = field("kraus")?
        .as_array()
        .ok_or_else(|| CliError::Config("spec file: kraus must be a list".into()))?
        .iter()
        .map(matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let channel = KrausChannel::new(kraus).map_err(param)?;
    let beta = match beta_override {
        Some(b) => b,
        None => beta_value(field("beta")?)?,
    };
    Ok(EngineSpec::new(h1, h2, u, vv, channel, beta)?)
}

fn param(e: impl fmt::Display) -> CliError {
    CliError::Param(e.to_string())
}

fn matrix(v: &Value) -> Result<CMatrix, CliError> {
    let bad = || CliError::Config(format!("spec file: not a matrix: {v}"));
    let rows = v.as_array().ok_or_else(bad)?;
    let rows = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(bad)?.iter().map(entry).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    CMatrix::from_rows(&rows).map_err(param)
}

fn entry(v: &Value) -> Result<Complex64, CliError> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(Complex64::new(number("re", &pair[0])?, number("im", &pair[1])?)),
        other => Ok(Complex64::new(number("entry", other)?, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4"), Some(PI / 4.0));
        assert_eq!(parse_angle("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_angle("3*pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_angle("-pi/2"), Some(-PI / 2.0));
        assert_eq!(parse_angle(" 2 pi "), Some(2.0 * PI));
        assert_eq!(parse_angle("0.25"), Some(0.25));
        assert_eq!(parse_angle("1/4"), Some(0.25));
        assert_eq!(parse_angle("pi/0"), None);
        assert_eq!(parse_angle("tau"), None);
    }

    #[test]
    fn nested_and_dotted_agree() {
        let a = RunConfig::from_json_str(
            r#"{"beta": "inf", "sweep": {"axis1": {"name": "delta", "from": 0, "to": 0.5, "steps": 3}}}"#,
            None,
        )
        .unwrap();
        let b = RunConfig::from_json_str(
            r#"{"beta": "inf", "sweep.axis1.name": "delta", "sweep.axis1.from": 0,
                "sweep.axis1.to": 0.5, "sweep.axis1.steps": 3}"#,
            None,
        )
        .unwrap();
        assert_eq!(a.sweep, b.sweep);
        assert_eq!(a.sweep.unwrap().axis1.values(), vec![0.0, 0.25, 0.5]);
        assert!(a.qubit().unwrap().0.beta.is_infinite());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(RunConfig::from_json_str("{", None).unwrap_err().exit_code(), 2);
        assert_eq!(RunConfig::from_json_str(r#"{"nu3": 1}"#, None).unwrap_err().exit_code(), 2);
        assert_eq!(RunConfig::from_json_str(r#"{"delta": 1.5}"#, None).unwrap_err().exit_code(), 3);
        assert_eq!(RunConfig::from_json_str(r#"{"beta": -1}"#, None).unwrap_err().exit_code(), 3);
        let bad_steps = r#"{"sweep.axis1.name": "delta", "sweep.axis1.from": 0, "sweep.axis1.to": 1, "sweep.axis1.steps": 1}"#;
        assert_eq!(RunConfig::from_json_str(bad_steps, None).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn theta_sets_measurement_angle() {
        let c = RunConfig::from_json_str(r#"{"theta": 0.5, "chi": 1.0}"#, None).unwrap();
        let (p, _) = c.qubit().unwrap();
        assert!(p.alpha.abs() < 1e-12 && p.chi == 0.0);
    }
}
