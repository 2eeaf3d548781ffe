//! Typed run configuration: `--key value` flags merged over an optional
//! `key = value` file, validated against a per-command schema.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

/// Output root override; every other setting comes from flags or files.
pub const OUTPUT_ROOT_ENV: &str = "WLAB_OUTPUT_ROOT";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown key \"{key}\" for command {command}")]
    UnknownKey { command: String, key: String },
    #[error("missing required key \"{0}\"")]
    MissingRequired(String),
    #[error("key \"{key}\": expected {expected}, got \"{found}\"")]
    TypeMismatch { key: String, expected: &'static str, found: String },
    #[error("unknown command \"{0}\" (expected one of: {list})", list = COMMANDS.join(", "))]
    UnknownCommand(String),
    #[error("no command given (expected one of: {list})", list = COMMANDS.join(", "))]
    NoCommand,
    #[error("malformed argument \"{0}\"")]
    Malformed(String),
    #[error("config file {path}: {message}")]
    File { path: String, message: String },
}

pub const COMMANDS: [&str; 10] =
    ["twist", "slide", "certify", "procrustes", "jets", "recurrence", "mrs", "expand", "conditions", "laguerre"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Str,
    FloatList,
    IntList,
    StrList,
    Path,
    /// `inf` or a float.
    Exponent,
}

impl Kind {
    fn expected(self) -> &'static str {
        match self {
            Kind::Float => "a number",
            Kind::Int => "a non-negative integer",
            Kind::Bool => "true or false",
            Kind::Str => "a string",
            Kind::FloatList => "a comma-separated list of numbers",
            Kind::IntList => "a comma-separated list of non-negative integers",
            Kind::StrList => "a comma-separated list of strings",
            Kind::Path => "a path",
            Kind::Exponent => "a number or inf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    FloatList(Vec<f64>),
    IntList(Vec<u64>),
    StrList(Vec<String>),
    Path(PathBuf),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(s),
            Value::FloatList(v) => f.write_str(&join(v.iter().map(f64::to_string).collect())),
            Value::IntList(v) => f.write_str(&join(v.iter().map(u64::to_string).collect())),
            Value::StrList(v) => f.write_str(&v.join(",")),
            Value::Path(p) => write!(f, "{}", p.display()),
        }
    }
}

fn parse_list<T: FromStr>(text: &str) -> Option<Vec<T>> {
    text.split(',').map(|s| s.trim().parse().ok()).collect()
}

fn parse_value(key: &str, kind: Kind, text: &str, base: &Path) -> Result<Value, ConfigError> {
    let mismatch = || ConfigError::TypeMismatch { key: key.into(), expected: kind.expected(), found: text.into() };
    let t = text.trim();
    let v = match kind {
        Kind::Float => Value::Float(t.parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(mismatch)?),
        Kind::Int => Value::Int(t.parse().map_err(|_| mismatch())?),
        Kind::Bool => Value::Bool(t.parse().map_err(|_| mismatch())?),
        Kind::Str if !t.is_empty() => Value::Str(t.into()),
        Kind::Str => return Err(mismatch()),
        Kind::FloatList => {
            Value::FloatList(parse_list(t).filter(|v: &Vec<f64>| v.iter().all(|x| x.is_finite())).ok_or_else(mismatch)?)
        }
        Kind::IntList => Value::IntList(parse_list(t).ok_or_else(mismatch)?),
        Kind::StrList => {
            let v: Vec<String> = t.split(',').map(|s| s.trim().to_string()).collect();
            if v.iter().any(String::is_empty) {
                return Err(mismatch());
            }
            Value::StrList(v)
        }
        Kind::Path if !t.is_empty() => Value::Path(std::path::absolute(base.join(t)).map_err(|_| mismatch())?),
        Kind::Path => return Err(mismatch()),
        Kind::Exponent if t.eq_ignore_ascii_case("inf") => Value::Float(f64::INFINITY),
        Kind::Exponent => Value::Float(t.parse().ok().filter(|x: &f64| !x.is_nan()).ok_or_else(mismatch)?),
    };
    Ok(v)
}

/// One accepted key: name, type and default (`None` means required).
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
}

const fn key(name: &'static str, kind: Kind, default: &'static str) -> Key {
    Key { name, kind, default: Some(default) }
}

const fn required(name: &'static str, kind: Kind) -> Key {
    Key { name, kind, default: None }
}

/// Keys that are optional and have no default.
const fn optional(name: &'static str, kind: Kind) -> Key {
    Key { name, kind, default: Some("") }
}

pub fn schema(command: &str) -> Option<&'static [Key]> {
    use Kind::*;
    const TWIST: &[Key] = &[
        key("profile", Str, "exp"),
        key("scale", Float, "0.01"),
        key("rate", Float, "1"),
        key("exponent", Float, "-1"),
        key("theta", Float, "0.1"),
        key("c1", Float, "1"),
        key("c2", Float, "8"),
        key("epsilon", Float, "0.1"),
        key("box", Float, "10"),
        key("points", Int, "200"),
        key("steps", Int, "1"),
        key("threshold", Float, "0.1"),
    ];
    const SLIDE: &[Key] = &[
        key("family", StrList, "lorentzian,absexp"),
        key("amplitude", FloatList, "1,0.5"),
        key("param", FloatList, "1,1"),
        key("start", FloatList, "-3,3"),
        key("end", FloatList, "3,-3"),
        key("count", Int, "25"),
        key("steps", Int, "1"),
        key("box", Float, "10"),
        key("points", Int, "200"),
        key("threshold", Float, "1"),
    ];
    const CERTIFY: &[Key] =
        &[optional("map", Path), key("dim", Int, "2"), key("box", Float, "10"), key("points", Int, "200")];
    const PROCRUSTES: &[Key] = &[
        required("source", Path),
        required("target", Path),
        key("proper", Bool, "false"),
        optional("c_prime", Float),
    ];
    const JETS: &[Key] = &[required("field", Path)];
    const RECURRENCE: &[Key] = &[key("beta", Float, "2"), required("N", Int), key("tol", Float, "1e-10")];
    const MRS: &[Key] = &[
        key("beta", Float, "2"),
        optional("u", FloatList),
        optional("degrees", Int),
        key("tol", Float, "1e-14"),
        key("trials", Int, "0"),
        key("n", Int, "20"),
        key("s", Float, "1.5"),
    ];
    const EXPAND: &[Key] = &[
        key("beta", Float, "2"),
        key("function", Str, "gaussian"),
        key("p", Exponent, "2"),
        key("b", Float, "0"),
        key("B", Float, "0"),
        key("n", IntList, "2,4,8,16"),
        key("tol", Float, "1e-10"),
    ];
    const CONDITIONS: &[Key] = &[
        key("p", Exponent, "inf"),
        key("b", Float, "0"),
        key("B", Float, "0"),
        key("beta", Float, "2"),
        optional("eta", Float),
        optional("C", Float),
        key("epsilon", Float, "0.5"),
        key("delta", Float, "0.1"),
        key("x_min", Float, "0.01"),
        key("x_max", Float, "10"),
        key("grid", Int, "200"),
    ];
    const LAGUERRE: &[Key] = &[
        key("function", Str, "exp"),
        key("dim", Int, "1"),
        key("cap", Int, "10"),
        key("n", IntList, "2,4,6,8,10"),
        optional("probe", FloatList),
    ];
    Some(match command {
        "twist" => TWIST,
        "slide" => SLIDE,
        "certify" => CERTIFY,
        "procrustes" => PROCRUSTES,
        "jets" => JETS,
        "recurrence" => RECURRENCE,
        "mrs" => MRS,
        "expand" => EXPAND,
        "conditions" => CONDITIONS,
        "laguerre" => LAGUERRE,
        _ => return None,
    })
}

/// A fully resolved run: every schema key has a typed value or is absent
/// only if it is optional without default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub output: PathBuf,
    pub seed: u64,
}

#[derive(Serialize)]
struct Echo<'a> {
    command: &'a str,
    seed: u64,
    output: &'a Path,
    params: &'a BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Float(x)) => *x,
            other => panic!("schema guarantees float for {key}, got {other:?}"),
        }
    }

    pub fn opt_float(&self, key: &str) -> Option<f64> {
        self.params.contains_key(key).then(|| self.float(key))
    }

    pub fn int(&self, key: &str) -> u64 {
        match self.params.get(key) {
            Some(Value::Int(n)) => *n,
            other => panic!("schema guarantees integer for {key}, got {other:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.int(key) as usize
    }

    pub fn boolean(&self, key: &str) -> bool {
        matches!(self.params.get(key), Some(Value::Bool(true)))
    }

    pub fn string(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Str(s)) => s,
            other => panic!("schema guarantees string for {key}, got {other:?}"),
        }
    }

    pub fn floats(&self, key: &str) -> Option<&[f64]> {
        match self.params.get(key) {
            Some(Value::FloatList(v)) => Some(v),
            _ => None,
        }
    }

    pub fn ints(&self, key: &str) -> Vec<usize> {
        match self.params.get(key) {
            Some(Value::IntList(v)) => v.iter().map(|&n| n as usize).collect(),
            _ => Vec::new(),
        }
    }

    pub fn strings(&self, key: &str) -> &[String] {
        match self.params.get(key) {
            Some(Value::StrList(v)) => v,
            _ => &[],
        }
    }

    pub fn path(&self, key: &str) -> Option<&Path> {
        match self.params.get(key) {
            Some(Value::Path(p)) => Some(p),
            _ => None,
        }
    }

    /// Canonical JSON echo of the resolved configuration.
    pub fn echo_json(&self) -> String {
        let echo = Echo { command: &self.command, seed: self.seed, output: &self.output, params: &self.params };
        serde_json::to_string_pretty(&echo).expect("config values serialize")
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str, path: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::File { path: path.into(), message: format!("line {}: expected key = value", i + 1) })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_flags(args: &[String]) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        let name = a.strip_prefix("--").filter(|n| !n.is_empty()).ok_or_else(|| ConfigError::Malformed(a.clone()))?;
        if let Some((k, v)) = name.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            i += 1;
        } else {
            let v = args.get(i + 1).ok_or_else(|| ConfigError::Malformed(a.clone()))?;
            out.push((name.to_string(), v.clone()));
            i += 2;
        }
    }
    Ok(out)
}

/// Parses `<command> [--key value | --key=value]...`. A `--config FILE`
/// flag supplies defaults that the other flags override. Relative paths in
/// a file resolve against the file's directory, on the command line
/// against `cwd`. `env_root` is the value of [`OUTPUT_ROOT_ENV`].
pub fn parse_args(args: &[String], cwd: &Path, env_root: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let (command, rest) = args.split_first().ok_or(ConfigError::NoCommand)?;
    let keys = schema(command).ok_or_else(|| ConfigError::UnknownCommand(command.clone()))?;
    let flags = parse_flags(rest)?;

    // (key, raw value, base directory), later entries win
    let mut raw: Vec<(String, String, PathBuf)> = Vec::new();
    if let Some((_, file)) = flags.iter().rev().find(|(k, _)| k == "config") {
        let path = cwd.join(file);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ConfigError::File { path: path.display().to_string(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(cwd).to_path_buf();
        for (k, v) in parse_config_text(&text, &path.display().to_string())? {
            if k == "config" {
                return Err(ConfigError::File { path: path.display().to_string(), message: "nested config".into() });
            }
            raw.push((k, v, base.clone()));
        }
    }
    raw.extend(flags.into_iter().filter(|(k, _)| k != "config").map(|(k, v)| (k, v, cwd.to_path_buf())));

    let mut seed = 0u64;
    let mut output: Option<PathBuf> = None;
    let mut params = BTreeMap::new();
    for (k, v, base) in raw {
        match k.as_str() {
            "seed" => match parse_value("seed", Kind::Int, &v, &base)? {
                Value::Int(s) => seed = s,
                _ => unreachable!(),
            },
            "out" => match parse_value("out", Kind::Path, &v, &base)? {
                Value::Path(p) => output = Some(p),
                _ => unreachable!(),
            },
            _ => {
                let spec = keys
                    .iter()
                    .find(|s| s.name == k)
                    .ok_or_else(|| ConfigError::UnknownKey { command: command.clone(), key: k.clone() })?;
                params.insert(k.clone(), parse_value(&k, spec.kind, &v, &base)?);
            }
        }
    }
    for spec in keys {
        if params.contains_key(spec.name) {
            continue;
        }
        match spec.default {
            None => return Err(ConfigError::MissingRequired(spec.name.into())),
            Some("") => {}
            Some(d) => {
                params.insert(spec.name.into(), parse_value(spec.name, spec.kind, d, cwd)?);
            }
        }
    }
    let output = match output {
        Some(p) => p,
        None => {
            let root = env_root.map(Path::to_path_buf).unwrap_or_else(|| cwd.join("wlab-out"));
            std::path::absolute(root.join(command))
                .map_err(|_| ConfigError::TypeMismatch { key: "out".into(), expected: "a path", found: String::new() })?
        }
    };
    Ok(RunConfig { command: command.clone(), params, output, seed })
}
