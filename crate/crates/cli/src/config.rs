//! Plain `key = value` run configuration. Keys are the long flag names
//! without the leading dashes; `#` starts a comment.

use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: expected 'key = value', found '{text}'")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: '{key}' given twice")]
    Duplicate { line: usize, key: String },
    #[error("config: unknown key '{0}'")]
    UnknownKey(String),
    #[error("config: {key} = '{value}' is invalid: {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim().trim_start_matches("--").to_string();
            if key.is_empty() {
                return Err(ConfigError::Malformed {
                    line: i + 1,
                    text: raw.to_string(),
                });
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::Duplicate { line: i + 1, key });
            }
        }
        Ok(Config { values })
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::UnknownKey(k.clone())),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The command-line value if given, else the parsed config value.
    pub fn resolve<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, ConfigError>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| ConfigError::Invalid {
                    key: key.to_string(),
                    value: v.to_string(),
                    reason: e.to_string(),
                })
            })
            .transpose()
    }

    /// Comma-separated list; the command line wins when non-empty.
    pub fn resolve_list(&self, key: &str, flag: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        let Some(v) = self.raw(key) else {
            return Ok(Vec::new());
        };
        v.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| ConfigError::Invalid {
                    key: key.to_string(),
                    value: v.to_string(),
                    reason: e.to_string(),
                })
            })
            .collect()
    }

    /// Switches: a set flag wins, otherwise `true`/`false` from the file.
    pub fn resolve_switch(&self, key: &str, flag: bool) -> Result<bool, ConfigError> {
        Ok(flag || self.resolve::<bool>(key, None)?.unwrap_or(false))
    }
}
