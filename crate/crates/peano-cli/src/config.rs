//! Plain `key = value` config files, merged under explicit flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use peano::{Error, Result};

const KEYS: &[&str] = &[
    "fractal", "level", "curve_level", "count", "scheme", "factor", "format", "out", "precision", "threads",
    "tol_rel", "tol_abs", "cache", "threshold", "index", "beta", "vectors",
];

/// File values plus a record of every setting actually used.
#[derive(Debug, Default)]
pub struct Config {
    file: BTreeMap<String, String>,
    pub effective: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("config {}: {e}", path.display())))?;
        Config::parse(&text).map_err(|e| Error::Invalid(format!("config {}: {e}", path.display())))
    }

    /// `#` starts a comment; keys may use `-` or `_`.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut file = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key '{}'", no + 1, k.trim()));
            }
            file.insert(key, v.trim().to_string());
        }
        Ok(Config { file, effective: BTreeMap::new() })
    }

    /// The flag if given, else the file value; recorded when present.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(raw) => Some(raw.parse::<T>().map_err(|e| Error::Invalid(format!("config key {key} = '{raw}': {e}")))?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.effective.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn get_or<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.get(key, flag)?.unwrap_or(default);
        self.effective.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.get(key, flag)?.ok_or_else(|| Error::Invalid(format!("--{} is required", key.replace('_', "-"))))
    }

    /// Boolean switch: a set flag wins, otherwise the file decides.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let v = self.get_or(key, flag.then_some(true), false)?;
        Ok(v)
    }
}
