//! Scenario configuration: TOML with `[space]`, `[symbol]` and `[run]` tables.
//!
//! ```toml
//! scenario = "multiplier-check"
//!
//! [space]
//! family = "lpw"
//! p = 2.0
//! weight = { kind = "exp_abs", alpha = 0.5, window = 20000 }
//!
//! [symbol]
//! n_min = 0
//! coeffs = ["1,0", "0.5,-0.25"]
//!
//! [run]
//! radii = "auto"
//! window = 256
//! tolerance = 1e-6
//! ```

use crate::seq::FiniteSymbol;
use crate::spaces::SpaceSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Spectrum,
    MultiplierCheck,
    ToeplitzCheck,
    CesaroDemo,
    Counterexample,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Spectrum,
        Scenario::MultiplierCheck,
        Scenario::ToeplitzCheck,
        Scenario::CesaroDemo,
        Scenario::Counterexample,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::MultiplierCheck => "multiplier-check",
            Scenario::ToeplitzCheck => "toeplitz-check",
            Scenario::CesaroDemo => "cesaro-demo",
            Scenario::Counterexample => "counterexample",
        }
    }

    fn needs_symbol(self) -> bool {
        matches!(self, Scenario::MultiplierCheck | Scenario::ToeplitzCheck)
    }

    fn needs_space(self) -> bool {
        !matches!(self, Scenario::CesaroDemo | Scenario::Counterexample)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| format!("unknown scenario {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Radii {
    Auto,
    List(Vec<f64>),
}

/// Default weight window when a `[space]` weight omits `window`.
pub const DEFAULT_WEIGHT_WINDOW: usize = 20_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_POWER: usize = 32;
pub const DEFAULT_CESARO_KS: [u64; 5] = [20, 40, 80, 160, 20_000];
pub const DEFAULT_CESARO_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Required except for `cesaro-demo` (defaults to a fixed family of
    /// spaces) and `counterexample` (defaults to the remark1 weight).
    pub space: Option<SpaceSpec>,
    pub symbol: Option<FiniteSymbol>,
    pub radii: Radii,
    /// Section half-width `N`; derived from the symbol when absent.
    pub window: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    pub max_power: usize,
    pub ks: Vec<u64>,
    pub samples: usize,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },
}

/// Every problem found in a config, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigErrors(pub Vec<ConfigError>);

struct Collector(Vec<ConfigError>);

impl Collector {
    fn bad(&mut self, field: &str, reason: impl Into<String>) {
        self.0.push(ConfigError::Validation { field: field.into(), reason: reason.into() });
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn parse_complex(v: &Value) -> Result<Complex64, String> {
    if let Some(x) = as_f64(v) {
        return Ok(Complex64::new(x, 0.0));
    }
    let Value::String(s) = v else {
        return Err(format!("expected \"re,im\" string, got {v}"));
    };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number {t:?} in {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

/// Weight tables without `window` get [`DEFAULT_WEIGHT_WINDOW`].
fn fill_weight_windows(t: &mut Table) {
    for key in ["weight", "q"] {
        if let Some(Value::Table(w)) = t.get_mut(key) {
            let is_table = w.get("kind").and_then(Value::as_str) == Some("table");
            if !is_table && !w.contains_key("window") {
                w.insert("window".into(), Value::Integer(DEFAULT_WEIGHT_WINDOW as i64));
            }
        }
    }
    if let Some(Value::Array(members)) = t.get_mut("members") {
        for m in members {
            if let Value::Table(mt) = m {
                fill_weight_windows(mt);
            }
        }
    }
}

fn parse_space(v: &Value, c: &mut Collector) -> Option<SpaceSpec> {
    let Value::Table(t) = v else {
        c.bad("space", "must be a table");
        return None;
    };
    let mut t = t.clone();
    fill_weight_windows(&mut t);
    match Value::Table(t).try_into::<SpaceSpec>() {
        Ok(s) => match s.validate() {
            Ok(()) => Some(s),
            Err(e) => {
                c.bad("space", e.to_string());
                None
            }
        },
        Err(e) => {
            c.bad("space", e.message().to_string());
            None
        }
    }
}

fn parse_symbol(v: &Value, c: &mut Collector) -> Option<FiniteSymbol> {
    let Value::Table(t) = v else {
        c.bad("symbol", "must be a table");
        return None;
    };
    for k in t.keys() {
        if k != "n_min" && k != "coeffs" {
            c.bad(&format!("symbol.{k}"), "unknown key");
        }
    }
    let n_min = match t.get("n_min") {
        Some(Value::Integer(i)) => Some(*i),
        Some(_) => {
            c.bad("symbol.n_min", "must be an integer");
            None
        }
        None => {
            c.bad("symbol.n_min", "required");
            None
        }
    };
    let coeffs = match t.get("coeffs") {
        Some(Value::Array(a)) => {
            let mut out = Vec::with_capacity(a.len());
            let mut ok = true;
            for (i, v) in a.iter().enumerate() {
                match parse_complex(v) {
                    Ok(z) if z.re.is_finite() && z.im.is_finite() => out.push(z),
                    Ok(_) => {
                        c.bad(&format!("symbol.coeffs[{i}]"), "must be finite");
                        ok = false;
                    }
                    Err(e) => {
                        c.bad(&format!("symbol.coeffs[{i}]"), e);
                        ok = false;
                    }
                }
            }
            ok.then_some(out)
        }
        Some(_) => {
            c.bad("symbol.coeffs", "must be an array");
            None
        }
        None => {
            c.bad("symbol.coeffs", "required");
            None
        }
    };
    Some(FiniteSymbol::new(n_min?, coeffs?))
}

fn positive_int(t: &Table, key: &str, c: &mut Collector) -> Option<u64> {
    match t.get(key)? {
        Value::Integer(i) if *i >= 1 => Some(*i as u64),
        Value::Integer(_) => {
            c.bad(&format!("run.{key}"), "must be >= 1");
            None
        }
        _ => {
            c.bad(&format!("run.{key}"), "must be an integer");
            None
        }
    }
}

const RUN_KEYS: [&str; 8] = ["radii", "window", "tolerance", "seed", "max_power", "ks", "samples", "out_dir"];

/// Parse and validate a config. `cli_scenario` fills a missing `scenario`
/// key and must agree with it when both are present.
pub fn parse_config_for(text: &str, cli_scenario: Option<Scenario>) -> Result<ScenarioConfig, ConfigErrors> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0);
        ConfigErrors(vec![ConfigError::Parse { line, message: e.message().to_string() }])
    })?;
    let mut c = Collector(Vec::new());
    for k in root.keys() {
        if !["scenario", "space", "symbol", "run"].contains(&k.as_str()) {
            c.bad(k, "unknown key");
        }
    }
    let scenario = match (root.get("scenario"), cli_scenario) {
        (Some(Value::String(s)), cli) => match s.parse::<Scenario>() {
            Ok(sc) => {
                if let Some(cli) = cli.filter(|x| *x != sc) {
                    c.bad("scenario", format!("config says {sc}, command line says {cli}"));
                }
                Some(sc)
            }
            Err(e) => {
                c.bad("scenario", e);
                None
            }
        },
        (Some(_), _) => {
            c.bad("scenario", "must be a string");
            None
        }
        (None, Some(cli)) => Some(cli),
        (None, None) => {
            c.bad("scenario", "required");
            None
        }
    };
    let space = root.get("space").and_then(|v| parse_space(v, &mut c));
    let symbol = root.get("symbol").and_then(|v| parse_symbol(v, &mut c));
    if let Some(sc) = scenario {
        if sc.needs_space() && root.get("space").is_none() {
            c.bad("space", "required");
        }
        if sc.needs_symbol() && root.get("symbol").is_none() {
            c.bad("symbol", "symbol required");
        }
        if let (Some(s), Scenario::ToeplitzCheck) = (&space, sc) {
            if !s.half_line {
                c.bad("space.half_line", "toeplitz-check needs half_line = true");
            }
        }
        if let (Some(s), Scenario::MultiplierCheck | Scenario::Spectrum) = (&space, sc) {
            if s.half_line && sc == Scenario::MultiplierCheck {
                c.bad("space.half_line", "multiplier-check needs a two-sided space");
            }
        }
    }

    let empty = Table::new();
    let run = match root.get("run") {
        Some(Value::Table(t)) => t,
        Some(_) => {
            c.bad("run", "must be a table");
            &empty
        }
        None => &empty,
    };
    for k in run.keys() {
        if !RUN_KEYS.contains(&k.as_str()) {
            c.bad(&format!("run.{k}"), "unknown key");
        }
    }
    let radii = match run.get("radii") {
        None => Radii::Auto,
        Some(Value::String(s)) if s == "auto" => Radii::Auto,
        Some(Value::Array(a)) => {
            let mut out = Vec::new();
            for (i, v) in a.iter().enumerate() {
                match as_f64(v) {
                    Some(r) if r > 0.0 && r.is_finite() => out.push(r),
                    _ => c.bad(&format!("run.radii[{i}]"), "radii must be positive finite numbers"),
                }
            }
            if a.is_empty() {
                c.bad("run.radii", "must not be empty");
            }
            Radii::List(out)
        }
        Some(_) => {
            c.bad("run.radii", "expected \"auto\" or a list of numbers");
            Radii::Auto
        }
    };
    let window = positive_int(run, "window", &mut c).map(|v| v as usize);
    let tolerance = match run.get("tolerance") {
        None => DEFAULT_TOLERANCE,
        Some(v) => match as_f64(v) {
            Some(t) if t > 0.0 && t.is_finite() => t,
            _ => {
                c.bad("run.tolerance", "must be a positive number");
                DEFAULT_TOLERANCE
            }
        },
    };
    let seed = match run.get("seed") {
        None => 0,
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(_) => {
            c.bad("run.seed", "must be a nonnegative integer");
            0
        }
    };
    let max_power = positive_int(run, "max_power", &mut c).map(|v| v as usize).unwrap_or(DEFAULT_MAX_POWER);
    let samples = positive_int(run, "samples", &mut c).map(|v| v as usize).unwrap_or(DEFAULT_CESARO_SAMPLES);
    let ks = match run.get("ks") {
        None => DEFAULT_CESARO_KS.to_vec(),
        Some(Value::Array(a)) => {
            let mut out = Vec::new();
            for (i, v) in a.iter().enumerate() {
                match v {
                    Value::Integer(k) if *k >= 0 => out.push(*k as u64),
                    _ => c.bad(&format!("run.ks[{i}]"), "must be a nonnegative integer"),
                }
            }
            out
        }
        Some(_) => {
            c.bad("run.ks", "must be a list of integers");
            Vec::new()
        }
    };
    let out_dir = match run.get("out_dir") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => {
            c.bad("run.out_dir", "must be a string");
            None
        }
    };

    if !c.0.is_empty() {
        return Err(ConfigErrors(c.0));
    }
    Ok(ScenarioConfig {
        scenario: scenario.expect("checked"),
        space,
        symbol,
        radii,
        window,
        tolerance,
        seed,
        max_power,
        ks,
        samples,
        out_dir,
    })
}

/// Parse and validate a config that names its own scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigErrors> {
    parse_config_for(text, None)
}

fn complex_str(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

impl ScenarioConfig {
    /// Canonical TOML table; parsing its text gives back an equal config.
    pub fn to_toml_value(&self) -> Table {
        let mut root = Table::new();
        root.insert("scenario".into(), Value::String(self.scenario.as_str().into()));
        if let Some(s) = &self.space {
            let v = Value::try_from(s).expect("space specs serialize to TOML");
            root.insert("space".into(), v);
        }
        if let Some(phi) = &self.symbol {
            let mut t = Table::new();
            t.insert("n_min".into(), Value::Integer(phi.n_min()));
            t.insert(
                "coeffs".into(),
                Value::Array(phi.coeffs().iter().map(|z| Value::String(complex_str(*z))).collect()),
            );
            root.insert("symbol".into(), Value::Table(t));
        }
        let mut run = Table::new();
        run.insert(
            "radii".into(),
            match &self.radii {
                Radii::Auto => Value::String("auto".into()),
                Radii::List(v) => Value::Array(v.iter().map(|r| Value::Float(*r)).collect()),
            },
        );
        if let Some(w) = self.window {
            run.insert("window".into(), Value::Integer(w as i64));
        }
        run.insert("tolerance".into(), Value::Float(self.tolerance));
        run.insert("seed".into(), Value::Integer(self.seed as i64));
        run.insert("max_power".into(), Value::Integer(self.max_power as i64));
        run.insert("ks".into(), Value::Array(self.ks.iter().map(|k| Value::Integer(*k as i64)).collect()));
        run.insert("samples".into(), Value::Integer(self.samples as i64));
        if let Some(o) = &self.out_dir {
            run.insert("out_dir".into(), Value::String(o.display().to_string()));
        }
        root.insert("run".into(), Value::Table(run));
        root
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_toml_value()).expect("TOML tables serialize")
    }

    /// JSON echo of the canonical TOML form; non-finite floats become strings.
    pub fn to_json(&self) -> serde_json::Value {
        toml_to_json(&Value::Table(self.to_toml_value()))
    }
}

fn toml_to_json(v: &Value) -> serde_json::Value {
    use serde_json::Value as J;
    match v {
        Value::String(s) => J::String(s.clone()),
        Value::Integer(i) => J::from(*i),
        Value::Float(f) if f.is_finite() => J::from(*f),
        Value::Float(f) if f.is_nan() => J::String("nan".into()),
        Value::Float(f) => J::String(if *f > 0.0 { "inf" } else { "-inf" }.into()),
        Value::Boolean(b) => J::Bool(*b),
        Value::Datetime(d) => J::String(d.to_string()),
        Value::Array(a) => J::Array(a.iter().map(toml_to_json).collect()),
        Value::Table(t) => J::Object(t.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::WeightKind;

    const MINIMAL: &str = r#"
scenario = "spectrum"
[space]
family = "lpw"
p = 2.0
weight = { kind = "geometric", r0 = 2.0, window = 64 }
"#;

    #[test]
    fn minimal_spectrum_config() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.scenario, Scenario::Spectrum);
        assert_eq!(cfg.radii, Radii::Auto);
        let w = cfg.space.as_ref().unwrap().weight().unwrap();
        assert_eq!(w.kind(), &WeightKind::Geometric { r0: 2.0 });
        assert_eq!(w.hi(), 64);
    }

    #[test]
    fn round_trip() {
        let text = r#"
scenario = "multiplier-check"
[space]
family = "lpw"
p = 2.0
weight = { kind = "exp_abs", alpha = 0.5 }
[symbol]
n_min = -1
coeffs = ["1,0", "0.5,-0.25", 2]
[run]
radii = [0.5, 1.0]
window = 16
seed = 7
"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(cfg.symbol.as_ref().unwrap().get(0), Complex64::new(0.5, -0.25));
    }

    #[test]
    fn all_errors_are_reported() {
        let text = r#"
scenario = "multiplier-check"
[run]
radii = [1.0, -2.0]
tolerance = 0
window = 0
"#;
        let errs = parse_config(text).unwrap_err().0;
        let fields: Vec<String> = errs
            .iter()
            .map(|e| match e {
                ConfigError::Validation { field, .. } => field.clone(),
                other => panic!("{other:?}"),
            })
            .collect();
        for f in ["space", "symbol", "run.radii[1]", "run.window", "run.tolerance"] {
            assert!(fields.iter().any(|x| x == f), "missing {f} in {fields:?}");
        }
        assert!(errs.iter().any(|e| e.to_string().contains("symbol required")));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let errs = parse_config("scenario = \"spectrum\"\n[space\n").unwrap_err().0;
        assert!(matches!(errs[0], ConfigError::Parse { line: 2, .. }), "{errs:?}");
    }

    #[test]
    fn cli_scenario_must_agree() {
        assert!(parse_config_for(MINIMAL, Some(Scenario::CesaroDemo)).is_err());
        let no_scenario = MINIMAL.replace("scenario = \"spectrum\"", "");
        assert_eq!(parse_config_for(&no_scenario, Some(Scenario::Spectrum)).unwrap().scenario, Scenario::Spectrum);
    }

    #[test]
    fn infinite_p_echoes_as_string() {
        let text = MINIMAL.replace("p = 2.0", "p = inf");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.to_json()["space"]["p"], "inf");
        assert_eq!(parse_config(&cfg.to_toml_string()).unwrap(), cfg);
    }
}
