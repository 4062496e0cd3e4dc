//! Experiment configuration.
//!
//! The format is line oriented: `[section]` headers followed by
//! `key = value` pairs. Values are non-negative integers, double-quoted
//! strings, bare words, or single-line lists of those. `#` starts a
//! comment outside strings. The full grammar is in `docs/config-grammar.md`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;
use valueset_core::families::{custom_family, linear_family, symmetric_family};
use valueset_core::{parse_poly_expr, Error as CoreError, FamilyKind, FamilySpec, FieldSpec, MultiPoly, Variables};

pub const DEFAULT_ORACLE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(u128),
    Str(String),
    Word(String),
    List(Vec<Value>),
}

/// A value together with the 1-based line and column where it starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub value: Value,
    pub line: usize,
    pub column: usize,
}

/// Raw `section.key -> value` map, before any interpretation.
pub type RawConfig = BTreeMap<String, Located>;

#[derive(Clone, Debug)]
pub struct FieldConfig {
    pub p: u64,
    pub s: usize,
    pub modulus: Option<Vec<u64>>,
    pub spec: FieldSpec,
}

#[derive(Clone, Debug)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub d: usize,
    pub m: usize,
    /// Constraint expressions as written: `forms` for linear and custom
    /// families, `S` for symmetric ones.
    pub exprs: Vec<String>,
    /// Number of elementary symmetric polynomials, symmetric families only.
    pub s_count: Option<usize>,
    pub spec: FamilySpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub r_max: usize,
    pub oracle_budget: u128,
    pub diag_extensions: Vec<usize>,
    pub workers: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub field: FieldConfig,
    pub family: FamilyConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
}

const KEYS: &[(&str, &[&str])] = &[
    ("field", &["p", "s", "modulus"]),
    ("family", &["kind", "d", "m", "forms", "s_count", "S"]),
    ("run", &["r_max", "oracle_budget", "diag_extensions", "workers"]),
    ("output", &["csv", "summary"]),
];

fn perr(line: usize, column: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line, column, msg: msg.into() }
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { chars: text.char_indices().collect(), pos: 0, line, text }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), None | Some('#'))
    }

    fn err(&self, msg: impl Into<String>) -> ConfigError {
        perr(self.line, self.column(), msg)
    }

    fn name(&mut self) -> Result<String, ConfigError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return Err(self.err("expected a name")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let a = self.chars[start].0;
        let b = self.chars.get(self.pos).map_or(self.text.len(), |&(i, _)| i);
        Ok(self.text[a..b].to_string())
    }

    fn expect(&mut self, want: char) -> Result<(), ConfigError> {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{want}'")))
        }
    }

    fn value(&mut self, nested: bool) -> Result<Located, ConfigError> {
        self.skip_ws();
        let (line, column) = (self.line, self.column());
        let value = match self.peek() {
            Some('"') => Value::Str(self.string()?),
            Some(c) if c.is_ascii_digit() => Value::Int(self.int()?),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => Value::Word(self.name()?),
            Some('[') if nested => return Err(self.err("nested lists are not supported")),
            Some('[') => Value::List(self.list()?),
            Some(c) => return Err(self.err(format!("unexpected character '{c}'"))),
            None => return Err(self.err("expected a value")),
        };
        Ok(Located { value, line, column })
    }

    fn int(&mut self) -> Result<u128, ConfigError> {
        let col = self.column();
        let mut n: u128 = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add(c.to_digit(10).unwrap() as u128))
                .ok_or_else(|| perr(self.line, col, "integer too large"))?;
            self.pos += 1;
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
            return Err(self.err("unexpected character after integer"));
        }
        Ok(n)
    }

    fn string(&mut self) -> Result<String, ConfigError> {
        let col = self.column();
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(perr(self.line, col, "unterminated string")),
                Some('"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => out.push(c),
                        _ => return Err(self.err("unknown escape")),
                    }
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn list(&mut self) -> Result<Vec<Value>, ConfigError> {
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(']') {
                self.pos += 1;
                return Ok(items);
            }
            items.push(self.value(true)?.value);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {}
                _ => return Err(self.err("expected ',' or ']'")),
            }
        }
    }
}

/// Tokenizes `text` into `section.key` entries. Unknown sections or keys
/// and duplicate keys are parse errors.
pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let mut out = RawConfig::new();
    let mut section: Option<&'static (&str, &[&str])> = None;
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let mut cur = Cursor::new(raw_line, line);
        if cur.at_end() {
            continue;
        }
        if cur.peek() == Some('[') {
            cur.pos += 1;
            cur.skip_ws();
            let col = cur.column();
            let name = cur.name()?;
            cur.expect(']')?;
            if !cur.at_end() {
                return Err(cur.err("unexpected text after section header"));
            }
            section = Some(
                KEYS.iter()
                    .find(|(s, _)| *s == name)
                    .ok_or_else(|| perr(line, col, format!("unknown section [{name}]")))?,
            );
            continue;
        }
        let col = cur.column();
        let key = cur.name()?;
        let Some((sec, keys)) = section else {
            return Err(perr(line, col, "key outside of any section"));
        };
        if !keys.contains(&key.as_str()) {
            return Err(perr(line, col, format!("unknown key '{key}' in [{sec}]")));
        }
        cur.expect('=')?;
        let value = cur.value(false)?;
        if !cur.at_end() {
            return Err(cur.err("unexpected text after value"));
        }
        let full = format!("{sec}.{key}");
        if out.contains_key(&full) {
            return Err(perr(line, col, format!("duplicate key '{full}'")));
        }
        out.insert(full, value);
    }
    Ok(out)
}

fn located_err(v: &Located, msg: impl Into<String>) -> ConfigError {
    perr(v.line, v.column, msg)
}

fn get_int(raw: &RawConfig, key: &str) -> Result<Option<u128>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Located { value: Value::Int(n), .. }) => Ok(Some(*n)),
        Some(v) => Err(located_err(v, format!("{key} must be an integer"))),
    }
}

fn get_small(raw: &RawConfig, key: &str) -> Result<Option<usize>, ConfigError> {
    match get_int(raw, key)? {
        None => Ok(None),
        Some(n) => usize::try_from(n)
            .ok()
            .filter(|&n| n <= u32::MAX as usize)
            .map(Some)
            .ok_or_else(|| located_err(&raw[key], format!("{key} is out of range"))),
    }
}

fn get_text(raw: &RawConfig, key: &str) -> Result<Option<String>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Located { value: Value::Str(s) | Value::Word(s), .. }) => Ok(Some(s.clone())),
        Some(v) => Err(located_err(v, format!("{key} must be a string"))),
    }
}

fn get_list<'a>(raw: &'a RawConfig, key: &str) -> Result<Option<&'a [Value]>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Located { value: Value::List(items), .. }) => Ok(Some(items)),
        Some(v) => Err(located_err(v, format!("{key} must be a list"))),
    }
}

fn int_list(raw: &RawConfig, key: &str) -> Result<Option<Vec<u128>>, ConfigError> {
    let Some(items) = get_list(raw, key)? else { return Ok(None) };
    items
        .iter()
        .map(|v| match v {
            Value::Int(n) => Ok(*n),
            _ => Err(located_err(&raw[key], format!("{key} must be a list of integers"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Strings of a list with the column of each item's opening quote, so
/// expression errors can point into the file.
fn expr_list(raw: &RawConfig, key: &str, text: &str) -> Result<Option<Vec<(String, usize, usize)>>, ConfigError> {
    let Some(loc) = raw.get(key) else { return Ok(None) };
    let Value::List(items) = &loc.value else {
        return Err(located_err(loc, format!("{key} must be a list of strings")));
    };
    let line_text = text.lines().nth(loc.line - 1).unwrap_or("");
    let mut cur = Cursor::new(line_text, loc.line);
    cur.pos = loc.column;
    let mut out = Vec::new();
    for item in items {
        let Value::Str(s) = item else {
            return Err(located_err(loc, format!("{key} must be a list of strings")));
        };
        cur.skip_ws();
        let col = cur.column();
        cur.string()?;
        cur.skip_ws();
        if cur.peek() == Some(',') {
            cur.pos += 1;
        }
        out.push((s.clone(), loc.line, col));
    }
    Ok(Some(out))
}

fn require<T>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::Validation(format!("missing required key {key}")))
}

fn invalid(e: CoreError) -> ConfigError {
    ConfigError::Validation(e.to_string())
}

/// Parses an expression list entry, translating byte offsets inside the
/// expression into file columns (one past the opening quote).
fn parse_expr_at(
    text: &str,
    line: usize,
    col: usize,
    field: &FieldSpec,
    vars: &Variables,
) -> Result<MultiPoly, ConfigError> {
    parse_poly_expr(text, field, vars).map_err(|e| match e {
        CoreError::Parse { pos, msg } => perr(line, col + 1 + char_offset(text, pos), format!("in expression \"{text}\": {msg}")),
        CoreError::UnknownVariable { name, pos } => {
            perr(line, col + 1 + char_offset(text, pos), format!("unknown variable '{name}' in \"{text}\""))
        }
        other => perr(line, col, other.to_string()),
    })
}

fn char_offset(text: &str, byte: usize) -> usize {
    text.char_indices().take_while(|&(i, _)| i < byte).count()
}

/// Parses and validates a config, applying defaults:
/// `field.s = 1`, `run.r_max = d`, `run.oracle_budget = 10_000_000`,
/// `run.diag_extensions = [1, 2]`, `run.workers = 1`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw = parse_raw(text)?;

    let p = require(get_int(&raw, "field.p")?, "field.p")?;
    let p = u64::try_from(p).map_err(|_| ConfigError::Validation(format!("field.p = {p} is too large")))?;
    let s = get_small(&raw, "field.s")?.unwrap_or(1);
    let modulus = int_list(&raw, "field.modulus")?
        .map(|m| m.into_iter().map(|c| u64::try_from(c).unwrap_or(u64::MAX)).collect::<Vec<_>>());
    let field_spec = FieldSpec::new(p, s, modulus.as_deref()).map_err(invalid)?;

    let kind = match require(get_text(&raw, "family.kind")?, "family.kind")?.as_str() {
        "linear" => FamilyKind::Linear,
        "symmetric" => FamilyKind::Symmetric,
        "custom" => FamilyKind::Custom,
        other => {
            return Err(located_err(
                &raw["family.kind"],
                format!("family.kind must be linear, symmetric or custom, got '{other}'"),
            ))
        }
    };
    let d = require(get_small(&raw, "family.d")?, "family.d")?;
    let m = require(get_small(&raw, "family.m")?, "family.m")?;

    let q = field_spec.q();
    if q <= d as u64 {
        return Err(ConfigError::Validation(format!("q > d required (q = {q}, d = {d})")));
    }
    if d < m + 2 {
        return Err(ConfigError::Validation(format!("d >= m + 2 required (d = {d}, m = {m})")));
    }

    let (key, other) = match kind {
        FamilyKind::Symmetric => ("family.S", "family.forms"),
        _ => ("family.forms", "family.S"),
    };
    if raw.contains_key(other) {
        return Err(located_err(&raw[other], format!("{other} does not apply to kind {}", kind_name(kind))));
    }
    let s_count = get_small(&raw, "family.s_count")?;
    if kind != FamilyKind::Symmetric && s_count.is_some() {
        return Err(located_err(&raw["family.s_count"], "family.s_count applies to symmetric families only"));
    }
    let entries = require(expr_list(&raw, key, text)?, key)?;
    if entries.len() != m {
        return Err(ConfigError::Validation(format!(
            "{key} has {} expressions but family.m = {m}",
            entries.len()
        )));
    }
    let vars = match kind {
        FamilyKind::Symmetric => Variables::symmetric(require(s_count, "family.s_count")?),
        _ => Variables::coefficients(d),
    };
    let polys = entries
        .iter()
        .map(|(t, line, col)| parse_expr_at(t, *line, *col, &field_spec, &vars))
        .collect::<Result<Vec<_>, _>>()?;
    let family_spec = match kind {
        FamilyKind::Linear => linear_family(&field_spec, d, polys),
        FamilyKind::Custom => custom_family(d, polys),
        FamilyKind::Symmetric => symmetric_family(&field_spec, d, vars.len(), polys),
    }
    .map_err(invalid)?;
    family_spec.validate_for(&field_spec).map_err(invalid)?;
    if let Some(i) = family_spec.degrees().iter().position(|&k| k == 0) {
        return Err(ConfigError::Validation(format!("constraint {} (\"{}\") is constant", i + 1, entries[i].0)));
    }

    let r_max = get_small(&raw, "run.r_max")?.unwrap_or(d);
    if r_max == 0 || r_max > d {
        return Err(ConfigError::Validation(format!("1 <= r_max <= d required (r_max = {r_max}, d = {d})")));
    }
    let oracle_budget = get_int(&raw, "run.oracle_budget")?.unwrap_or(DEFAULT_ORACLE_BUDGET);
    let diag_extensions = match int_list(&raw, "run.diag_extensions")? {
        None => vec![1, 2],
        Some(ks) => {
            if ks.is_empty() || ks.iter().any(|&k| k == 0 || k > 8) {
                return Err(located_err(&raw["run.diag_extensions"], "diag_extensions must be a nonempty list of values in 1..=8"));
            }
            ks.into_iter().map(|k| k as usize).collect()
        }
    };
    let workers = get_small(&raw, "run.workers")?.unwrap_or(1);
    if workers == 0 {
        return Err(located_err(&raw["run.workers"], "run.workers must be at least 1"));
    }

    let output = OutputConfig {
        csv: get_text(&raw, "output.csv")?.map(PathBuf::from),
        summary: get_text(&raw, "output.summary")?.map(PathBuf::from),
    };

    Ok(ExperimentConfig {
        field: FieldConfig { p, s, modulus, spec: field_spec },
        family: FamilyConfig {
            kind,
            d,
            m,
            exprs: entries.into_iter().map(|(t, _, _)| t).collect(),
            s_count,
            spec: family_spec,
        },
        run: RunConfig { r_max, oracle_budget, diag_extensions, workers },
        output,
    })
}

pub fn kind_name(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Linear => "linear",
        FamilyKind::Symmetric => "symmetric",
        FamilyKind::Custom => "custom",
    }
}
