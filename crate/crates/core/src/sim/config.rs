//! Scenario configuration files.
//!
//! The format is flat `key = value` lines grouped under `[section]` headers.
//! Values are bare tokens, double-quoted strings, or one-line lists in
//! brackets. `#` starts a comment outside quotes.
//!
//! ```text
//! [scenario]
//! kind = gifc
//! h1_squared = 0.75
//! tau_tilde = ["10", "11"]
//!
//! [code]
//! n = 1024
//! col_deg = 3
//! row_deg = 6
//! seed = 7
//!
//! [decoder]
//! algorithms = ["cd", "joint"]
//!
//! [simulation]
//! snr_db = [4.0, 4.5, 5.0]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channel::{Noise, ScenarioKind};
use crate::error::{Error, Result};
use crate::gf2::BinaryLinearMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dc,
    Cd,
    Cdc,
    Joint,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dc => "dc",
            Algorithm::Cd => "cd",
            Algorithm::Cdc => "cdc",
            Algorithm::Joint => "joint",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dc" => Algorithm::Dc,
            "cd" => Algorithm::Cd,
            "cdc" => Algorithm::Cdc,
            "joint" => Algorithm::Joint,
            other => return Err(Error::Scenario(format!("unknown algorithm {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CodeSource {
    Alist(PathBuf),
    Regular {
        n: usize,
        col_deg: usize,
        row_deg: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signaling {
    Constant,
    Cyclic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RatioSpec {
    Equal,
    Explicit(Vec<f64>),
    /// Successive-cancellation allocation with the given `δ` in dB.
    Method2(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub scenario: ScenarioKind,
    pub ell: usize,
    /// `None` selects the scenario default.
    pub tau: Option<BinaryLinearMap>,
    pub tau_tilde: Option<BinaryLinearMap>,
    pub code: CodeSource,
    pub signaling: Signaling,
    pub ratios: RatioSpec,
    pub h: Option<Vec<f64>>,
    pub h1_squared: Option<f64>,
    pub snr_db: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub k_max: usize,
    pub i_max: usize,
    pub joint_k_max: usize,
    pub strict: bool,
    pub max_trials: u64,
    pub min_frame_errors: u64,
    pub seed: u64,
    pub noise: Noise,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// A configuration with default settings for `scenario` and a
    /// generated `(3,6)`-regular code of length `n`.
    pub fn new(scenario: ScenarioKind, n: usize) -> Self {
        Self {
            name: scenario.name().to_string(),
            scenario,
            ell: default_ell(scenario),
            tau: None,
            tau_tilde: None,
            code: CodeSource::Regular {
                n,
                col_deg: 3,
                row_deg: 6,
                seed: 1,
            },
            signaling: Signaling::Constant,
            ratios: RatioSpec::Equal,
            h: None,
            h1_squared: None,
            snr_db: vec![0.0],
            algorithms: vec![Algorithm::Joint],
            k_max: 30,
            i_max: 50,
            joint_k_max: 200,
            strict: false,
            max_trials: 10_000,
            min_frame_errors: 100,
            seed: 1,
            noise: Noise::Awgn,
            output_dir: PathBuf::from("."),
        }
    }

    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { line: 0, msg: format!("cannot read {}: {e}", path.display()) })?;
        let base = path.parent().unwrap_or(Path::new("."));
        parse_config(&text, base)
    }
}

fn default_ell(kind: ScenarioKind) -> usize {
    match kind {
        ScenarioKind::MultiwayRelay => 3,
        _ => 2,
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Scalar(String),
    List(Vec<String>),
}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: Value,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn strip_comment(line: &str) -> &str {
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

fn unquote(token: &str, line: usize) -> Result<String> {
    let token = token.trim();
    if let Some(inner) = token.strip_prefix('"') {
        let inner = inner.strip_suffix('"').ok_or_else(|| err(line, format!("unterminated string {token}")))?;
        if inner.contains('"') {
            return Err(err(line, format!("stray quote in {token}")));
        }
        Ok(inner.to_string())
    } else if token.is_empty() {
        Err(err(line, "empty value"))
    } else if token.contains('"') {
        Err(err(line, format!("stray quote in {token}")))
    } else {
        Ok(token.to_string())
    }
}

fn parse_value(raw: &str, line: usize) -> Result<Value> {
    let raw = raw.trim();
    if let Some(body) = raw.strip_prefix('[') {
        let body = body.strip_suffix(']').ok_or_else(|| err(line, "list is missing its closing ']'"))?;
        if body.trim().is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        body.split(',').map(|t| unquote(t, line)).collect::<Result<_>>().map(Value::List)
    } else {
        unquote(raw, line).map(Value::Scalar)
    }
}

const SECTIONS: [&str; 6] = ["scenario", "code", "signaling", "decoder", "simulation", "output"];

fn tokenize(text: &str) -> Result<Vec<Entry>> {
    let mut section: Option<String> = None;
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| err(line, format!("expected key = value, got {body:?}")))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(line, format!("invalid key {key:?}")));
        }
        let Some(section) = section.clone() else {
            return Err(err(line, format!("key {key:?} appears before any section header")));
        };
        if entries.iter().any(|e| e.section == section && e.key == key) {
            return Err(err(line, format!("duplicate key {section}.{key}")));
        }
        entries.push(Entry {
            line,
            section,
            key: key.to_string(),
            value: parse_value(value, line)?,
        });
    }
    Ok(entries)
}

struct Entries {
    entries: Vec<Entry>,
    used: Vec<bool>,
}

impl Entries {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, Value)> {
        let i = self.entries.iter().position(|e| e.section == section && e.key == key)?;
        self.used[i] = true;
        Some((self.entries[i].line, self.entries[i].value.clone()))
    }

    fn scalar<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, Value::Scalar(s))) => s
                .parse()
                .map(Some)
                .map_err(|e| err(line, format!("{section}.{key}: cannot parse {s:?}: {e}"))),
            Some((line, Value::List(_))) => Err(err(line, format!("{section}.{key} expects a single value"))),
        }
    }

    fn scalar_at<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<(usize, T)>>
    where
        T::Err: fmt::Display,
    {
        let line = self
            .entries
            .iter()
            .find(|e| e.section == section && e.key == key)
            .map_or(0, |e| e.line);
        Ok(self.scalar(section, key)?.map(|v| (line, v)))
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<(usize, Vec<T>)>>
    where
        T::Err: fmt::Display,
    {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, Value::List(items))) => items
                .iter()
                .map(|s| {
                    s.parse()
                        .map_err(|e| err(line, format!("{section}.{key}: cannot parse {s:?}: {e}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(|v| Some((line, v))),
            Some((line, Value::Scalar(_))) => Err(err(line, format!("{section}.{key} expects a list [..]"))),
        }
    }

    fn map(&mut self, section: &str, key: &str) -> Result<Option<BinaryLinearMap>> {
        match self.list::<String>(section, key)? {
            None => Ok(None),
            Some((line, rows)) => BinaryLinearMap::from_row_strings(&rows)
                .map(Some)
                .map_err(|e| err(line, format!("{section}.{key}: {e}"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.iter().zip(&self.used).find(|(_, &u)| !u) {
            Some((e, _)) => Err(err(e.line, format!("unknown key {}.{}", e.section, e.key))),
            None => Ok(()),
        }
    }
}

/// Parses config text. `base` anchors relative paths.
pub fn parse_config(text: &str, base: &Path) -> Result<ScenarioConfig> {
    let entries = tokenize(text)?;
    let used = vec![false; entries.len()];
    let mut e = Entries { entries, used };

    let kind: ScenarioKind = match e.take("scenario", "kind") {
        Some((line, Value::Scalar(s))) => s.parse().map_err(|x: Error| err(line, x.to_string()))?,
        Some((line, _)) => return Err(err(line, "scenario.kind expects a single value")),
        None => return Err(err(0, "missing required key scenario.kind")),
    };
    let mut cfg = ScenarioConfig::new(kind, 1024);
    if let Some(name) = e.scalar::<String>("scenario", "name")? {
        cfg.name = name;
    }
    if let Some(ell) = e.scalar("scenario", "ell")? {
        cfg.ell = ell;
    }
    cfg.tau = e.map("scenario", "tau")?;
    cfg.tau_tilde = e.map("scenario", "tau_tilde")?;
    cfg.h = e.list("scenario", "h")?.map(|(_, v)| v);
    cfg.h1_squared = e.scalar("scenario", "h1_squared")?;

    let alist: Option<String> = e.scalar("code", "alist")?;
    let n: Option<usize> = e.scalar("code", "n")?;
    let col_deg: Option<usize> = e.scalar("code", "col_deg")?;
    let row_deg: Option<usize> = e.scalar("code", "row_deg")?;
    let code_seed: Option<u64> = e.scalar("code", "seed")?;
    cfg.code = match (alist, n) {
        (Some(_), Some(_)) => return Err(err(0, "code.alist and code.n are mutually exclusive")),
        (Some(path), None) => CodeSource::Alist(base.join(path)),
        (None, Some(n)) => CodeSource::Regular {
            n,
            col_deg: col_deg.unwrap_or(3),
            row_deg: row_deg.unwrap_or(6),
            seed: code_seed.unwrap_or(1),
        },
        (None, None) => return Err(err(0, "section [code] needs either alist or n")),
    };

    if let Some((line, mode)) = e.scalar_at::<String>("signaling", "mode")? {
        cfg.signaling = match mode.as_str() {
            "constant" => Signaling::Constant,
            "cyclic" => Signaling::Cyclic,
            other => return Err(err(line, format!("signaling.mode must be constant or cyclic, got {other:?}"))),
        };
    }
    let ratios = e.list::<f64>("signaling", "ratios")?;
    let method2 = e.scalar::<f64>("signaling", "method2_db")?;
    cfg.ratios = match (ratios, method2) {
        (Some((line, _)), Some(_)) => {
            return Err(err(line, "signaling.ratios and signaling.method2_db are mutually exclusive"))
        }
        (Some((_, r)), None) => RatioSpec::Explicit(r),
        (None, Some(d)) => RatioSpec::Method2(d),
        (None, None) => RatioSpec::Equal,
    };

    match (e.list::<String>("decoder", "algorithms")?, e.scalar_at::<String>("decoder", "algorithm")?) {
        (Some((line, _)), Some(_)) => {
            return Err(err(line, "decoder.algorithm and decoder.algorithms are mutually exclusive"))
        }
        (Some((line, names)), None) => {
            cfg.algorithms = names
                .iter()
                .map(|s| s.parse().map_err(|x: Error| err(line, x.to_string())))
                .collect::<Result<_>>()?;
        }
        (None, Some((line, name))) => cfg.algorithms = vec![name.parse().map_err(|x: Error| err(line, x.to_string()))?],
        (None, None) => {}
    }
    if let Some(v) = e.scalar("decoder", "k_max")? {
        cfg.k_max = v;
    }
    if let Some(v) = e.scalar("decoder", "i_max")? {
        cfg.i_max = v;
    }
    if let Some(v) = e.scalar("decoder", "joint_k_max")? {
        cfg.joint_k_max = v;
    }
    if let Some(v) = e.scalar("decoder", "strict")? {
        cfg.strict = v;
    }

    match e.list::<f64>("simulation", "snr_db")? {
        Some((_, grid)) => cfg.snr_db = grid,
        None => return Err(err(0, "missing required key simulation.snr_db")),
    }
    if let Some(v) = e.scalar("simulation", "max_trials")? {
        cfg.max_trials = v;
    }
    if let Some(v) = e.scalar("simulation", "min_frame_errors")? {
        cfg.min_frame_errors = v;
    }
    if let Some(v) = e.scalar("simulation", "seed")? {
        cfg.seed = v;
    }
    if let Some((line, noise)) = e.scalar_at::<String>("simulation", "noise")? {
        cfg.noise = match noise.as_str() {
            "awgn" => Noise::Awgn,
            "off" => Noise::Off,
            other => return Err(err(line, format!("simulation.noise must be awgn or off, got {other:?}"))),
        };
    }
    if let Some(dir) = e.scalar::<String>("output", "dir")? {
        cfg.output_dir = base.join(dir);
    }
    e.finish()?;
    Ok(cfg)
}
