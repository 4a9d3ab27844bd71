//! Parameter resolution: command-line flag, then config file, then default.
//!
//! Config files hold one `key = value` per line. Blank lines and lines
//! starting with `#` are skipped; keys use the long flag names without the
//! leading dashes (`alpha2 = 1e6`, `n-tot = log:10:1000:5`).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Validation(format!("config line {}: expected key = value", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Validation(format!("config line {}: empty key", i + 1)));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Validation(format!("config line {}: duplicate key {k}", i + 1)));
        }
    }
    Ok(map)
}

/// Resolves parameters and records what was used, for the metadata echo.
pub struct Params {
    file: BTreeMap<String, String>,
    pub echo: BTreeMap<String, String>,
}

impl Params {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self { file, echo: BTreeMap::new() }
    }

    fn raw(&mut self, key: &str, flag: Option<String>, default: Option<&str>) -> Result<Option<String>, CliError> {
        let from_file = self.file.remove(key);
        let v = flag.or(from_file).or_else(|| default.map(str::to_string));
        if let Some(v) = &v {
            self.echo.insert(key.to_string(), v.clone());
        }
        Ok(v)
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let d = default.to_string();
        let s = self.raw(key, flag.map(|f| f.to_string()), Some(&d))?.unwrap();
        s.parse().map_err(|_| CliError::Validation(format!("{key}: cannot parse {s:?}")))
    }

    pub fn optional<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        match self.raw(key, flag.map(|f| f.to_string()), None)? {
            Some(s) => s.parse().map(Some).map_err(|_| CliError::Validation(format!("{key}: cannot parse {s:?}"))),
            None => Ok(None),
        }
    }

    pub fn grid(&mut self, key: &str, flag: Option<String>, default: &str) -> Result<Vec<f64>, CliError> {
        let s = self.raw(key, flag, Some(default))?.unwrap();
        parse_grid(&s).map_err(|e| CliError::Validation(format!("{key}: {e}")))
    }

    /// Fails on config keys that no parameter consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        match self.file.keys().next() {
            Some(k) => Err(CliError::Validation(format!("unknown config key {k:?}"))),
            None => Ok(()),
        }
    }
}

/// `a:b:n` (linear, inclusive), `log:a:b:n` (geometric) or `x,y,z`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let g = match parts.as_slice() {
        ["log", a, b, n] | [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| format!("bad count {n:?}"))?;
            if n < 2 {
                return Err("grid needs at least 2 points".into());
            }
            let log = parts[0] == "log";
            if log && !(a > 0.0 && b > 0.0) {
                return Err("log grid bounds must be positive".into());
            }
            (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    if i == n - 1 {
                        b
                    } else if log {
                        a * (b / a).powf(t)
                    } else {
                        a + t * (b - a)
                    }
                })
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("cannot parse grid {s:?}")),
    };
    if g.iter().any(|v: &f64| !v.is_finite()) {
        return Err("grid has non-finite values".into());
    }
    Ok(g)
}
