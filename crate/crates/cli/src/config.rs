//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: Option<&'static str>, help: &'static str) -> Key {
    Key {
        name,
        default,
        help,
    }
}

/// Resolved settings: file values first, then flags.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_file(text: &str, keys: &[Key]) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key = value", i + 1))
        })?;
        let k = k.trim();
        if !keys.iter().any(|key| key.name == k) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key `{k}`",
                i + 1
            )));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!(
                "config line {}: duplicate key `{k}`",
                i + 1
            )));
        }
    }
    Ok(out)
}

impl Config {
    pub fn resolve(
        keys: &[Key],
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> Self {
        let mut values: BTreeMap<String, String> = keys
            .iter()
            .filter_map(|k| k.default.map(|d| (k.name.to_string(), d.to_string())))
            .collect();
        values.extend(file);
        values.extend(flags);
        Config { values }
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn raw(&self, name: &str) -> Option<&str> {
        self.values
            .get(name)
            .map(String::as_str)
            .filter(|s| !s.is_empty())
    }

    pub fn get<T: FromStr>(&self, name: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(name)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| CliError::Config(format!("`{name}`: cannot parse `{s}`: {e}")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, name: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(name)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{name}`")))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, name: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(name)
            .map(|s| {
                s.split(',')
                    .map(|p| {
                        p.trim().parse::<T>().map_err(|e| {
                            CliError::Config(format!("`{name}`: cannot parse `{}`: {e}", p.trim()))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn flag(&self, name: &str) -> CliResult<bool> {
        match self.raw(name) {
            None | Some("false") | Some("0") | Some("no") => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some(other) => Err(CliError::Config(format!(
                "`{name}`: expected true or false, got `{other}`"
            ))),
        }
    }

    /// A positive finite real.
    pub fn positive(&self, name: &str) -> CliResult<Option<f64>> {
        match self.get::<f64>(name)? {
            Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::Config(format!(
                "`{name}` must be positive, got {v}"
            ))),
            v => Ok(v),
        }
    }
}
