//! Run configuration: a small `[section]` / `key = value` file format merged
//! with command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use weingarten_core::phase::Sign;
use weingarten_core::wclass::{ClassOptions, EndValue};

/// Keys accepted in each section.
const SECTIONS: &[(&str, &[&str])] = &[
    (
        "class",
        &["preset", "g", "b_hint", "tail_exponent", "lambda_max", "domain_min", "blowup"],
    ),
    ("start", &["x0", "lambda0", "eps"]),
    ("integrator", &["tol_rk", "s_max"]),
    ("mesh", &["n_angular", "n_profile"]),
    ("output", &["out", "format"]),
    ("yau", &["c"]),
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Value { key: String, msg: String },
    #[error("give exactly one of `preset` and `g`")]
    ClassSource,
    #[error("could not read {path}: {msg}")]
    Io { path: String, msg: String },
}

/// Raw `key -> value` pairs; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    values: BTreeMap<String, String>,
}

impl Layer {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Applies `over` on top of `self`. A class source in `over` replaces
    /// both class sources of `self`.
    pub fn merged(mut self, over: &Layer) -> Layer {
        if over.get("preset").is_some() || over.get("g").is_some() {
            self.values.remove("preset");
            self.values.remove("g");
        }
        for (k, v) in &over.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }
}

fn strip_comment(line: &str) -> &str {
    // `#` starts a comment unless inside double quotes.
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_config(text: &str) -> Result<Layer, ConfigError> {
    let mut layer = Layer::default();
    let mut section: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| ConfigError::Syntax { line, msg };
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err("unterminated section header".into()))?
                .trim();
            let known = SECTIONS.iter().find(|(s, _)| *s == name);
            section = Some(known.ok_or_else(|| err(format!("unknown section [{name}]")))?.0);
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{body}`")))?;
        let key = key.trim();
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        let sec = section.ok_or_else(|| err(format!("`{key}` appears before any section header")))?;
        let keys = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !keys.contains(&key) {
            return Err(err(format!("unknown key `{key}` in [{sec}]")));
        }
        if layer.get(key).is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
        layer.set(key, value);
    }
    Ok(layer)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassSource {
    Preset { name: String, params: Vec<f64> },
    Expr(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Obj,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub class: Option<ClassSource>,
    pub class_opts: ClassOptions,
    pub x0: Option<f64>,
    pub lambda0: Option<f64>,
    pub eps: Sign,
    pub tol_rk: Option<f64>,
    pub s_max: Option<f64>,
    pub n_angular: usize,
    pub n_profile: usize,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub c: f64,
}

fn number(layer: &Layer, key: &str) -> Result<Option<f64>, ConfigError> {
    let Some(v) = layer.get(key) else { return Ok(None) };
    let x: f64 = v.trim().parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        msg: format!("`{v}` is not a number"),
    })?;
    if !x.is_finite() {
        return Err(ConfigError::Value {
            key: key.into(),
            msg: "must be finite".into(),
        });
    }
    Ok(Some(x))
}

fn positive(layer: &Layer, key: &str) -> Result<Option<f64>, ConfigError> {
    match number(layer, key)? {
        Some(x) if x <= 0.0 => Err(ConfigError::Value {
            key: key.into(),
            msg: format!("must be positive, got {x}"),
        }),
        v => Ok(v),
    }
}

fn count(layer: &Layer, key: &str, default: usize) -> Result<usize, ConfigError> {
    let Some(v) = layer.get(key) else { return Ok(default) };
    v.trim().parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        msg: format!("`{v}` is not a non-negative integer"),
    })
}

/// Parses `name` or `name:p1,p2,...`.
pub fn parse_preset(text: &str) -> Result<ClassSource, ConfigError> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut params = Vec::new();
    for p in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        params.push(parse_scalar(p).ok_or_else(|| ConfigError::Value {
            key: "preset".into(),
            msg: format!("`{p}` is not a number"),
        })?);
    }
    Ok(ClassSource::Preset {
        name: name.trim().to_string(),
        params,
    })
}

/// A number or a simple fraction such as `-1/2`.
fn parse_scalar(s: &str) -> Option<f64> {
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then_some(a / b);
    }
    s.parse().ok()
}

impl RunConfig {
    pub fn from_layer(layer: &Layer) -> Result<RunConfig, ConfigError> {
        let class = match (layer.get("preset"), layer.get("g")) {
            (Some(_), Some(_)) => return Err(ConfigError::ClassSource),
            (Some(p), None) => Some(parse_preset(p)?),
            (None, Some(g)) => Some(ClassSource::Expr(g.to_string())),
            (None, None) => None,
        };
        let b_hint = match layer.get("b_hint") {
            None => None,
            Some(v) if matches!(v.trim(), "-inf" | "-infinity") => Some(EndValue::NegInfinity),
            Some(_) => number(layer, "b_hint")?.map(EndValue::Finite),
        };
        let class_opts = ClassOptions {
            domain_min: number(layer, "domain_min")?,
            blowup: number(layer, "blowup")?,
            b_hint,
            tail_exponent: number(layer, "tail_exponent")?,
            lambda_max: positive(layer, "lambda_max")?,
        };
        let eps = match layer.get("eps").map(str::trim) {
            None | Some("+1") | Some("1") | Some("+") => Sign::Plus,
            Some("-1") | Some("-") => Sign::Minus,
            Some(v) => {
                return Err(ConfigError::Value {
                    key: "eps".into(),
                    msg: format!("expected +1 or -1, got `{v}`"),
                })
            }
        };
        let format = match layer.get("format").map(str::trim) {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some("obj") => Some(Format::Obj),
            Some(v) => {
                return Err(ConfigError::Value {
                    key: "format".into(),
                    msg: format!("expected csv, json or obj, got `{v}`"),
                })
            }
        };
        Ok(RunConfig {
            class,
            class_opts,
            x0: positive(layer, "x0")?,
            lambda0: number(layer, "lambda0")?,
            eps,
            tol_rk: positive(layer, "tol_rk")?,
            s_max: positive(layer, "s_max")?,
            n_angular: count(layer, "n_angular", 32)?,
            n_profile: count(layer, "n_profile", 200)?,
            out: layer.get("out").map(PathBuf::from),
            format,
            c: positive(layer, "c")?.unwrap_or(1.0),
        })
    }
}
