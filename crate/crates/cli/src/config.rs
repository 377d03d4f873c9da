//! `key = value` parameter files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys match the flag
//! names (`n`, `k`, `K`, `L`, `R`, `seed`, `pa`, `border_fix`, `threads`,
//! `param`, `values`); unknown keys are rejected so typos do not go unnoticed.

use std::collections::BTreeMap;
use std::path::Path;

use drsim_core::Error;

pub const KEYS: [&str; 11] = ["n", "k", "K", "L", "R", "seed", "pa", "border_fix", "threads", "param", "values"];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("config line {}: expected `key = value`", idx + 1)))?;
            let key = match key.trim() {
                "PA" => "pa",
                k => k,
            };
            if !KEYS.contains(&key) {
                return Err(Error::Format(format!("config line {}: unknown key `{key}`", idx + 1)));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Format(format!("config line {}: duplicate key `{key}`", idx + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        self.raw(key)
            .map(|v| v.parse().map_err(|_| Error::Format(format!("config: bad value `{v}` for `{key}`"))))
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>, Error> {
        match self.raw(key) {
            None => Ok(None),
            Some("1" | "true" | "on" | "yes") => Ok(Some(true)),
            Some("0" | "false" | "off" | "no") => Ok(Some(false)),
            Some(v) => Err(Error::Format(format!("config: bad value `{v}` for `{key}`"))),
        }
    }
}
