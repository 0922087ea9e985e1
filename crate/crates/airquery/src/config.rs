//! Flat `key = value` run configuration.
//!
//! The format is deliberately minimal — one assignment per line, `#` starts
//! a comment (full-line or trailing), blank lines ignored:
//!
//! ```text
//! # federated run, budget-maximizing amplitude
//! n0      = 1e4
//! L       = 16
//! sigma_ch = 0.5
//! k       = 1000
//! policy  = benign
//! ```
//!
//! Strictness is a feature: unknown keys and duplicate assignments are
//! errors (a typo like `sigm_ch` must not silently run a different
//! experiment), downgradable to stderr warnings with the CLI's
//! `--lenient`. All diagnostics carry 1-based line numbers.
//!
//! Integer-valued keys accept scientific notation (`n0 = 1e6`) as long as
//! the value is exactly integral. Resolution order for values the CLI also
//! accepts elsewhere is: command-line flag, then config file, then the
//! `AIRQUERY_SEED` environment variable (seed only), then the built-in
//! default.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Every key any subcommand understands, with a one-line meaning. Parsing
/// validates against this list so that misspellings fail loudly.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("alpha", "target accuracy in (0,1]"),
    ("beta", "target failure probability in (0,1)"),
    ("n0", "samples per device"),
    ("L", "number of devices (1 = point-to-point)"),
    ("sigma_ch", "channel noise standard deviation (>= 0)"),
    ("A_t", "transmit amplitude (> 0)"),
    ("N", "population domain size"),
    ("k", "session query budget (rounds)"),
    ("policy", "analyst policy: benign | attack"),
    ("population_mean", "attack sign reference (default 0.5)"),
    ("trials", "Monte-Carlo trial count"),
    ("seed", "master seed (u64)"),
    ("out", "output path"),
    ("figure", "figure dataset name"),
    ("sweep_axis", "which figure axis the sweep overrides"),
    ("sweep_lo", "sweep lower end"),
    ("sweep_hi", "sweep upper end"),
    ("sweep_points", "sweep grid size"),
    ("sweep_scale", "sweep spacing: linear | log"),
];

/// Configuration errors, each naming the offending key and line.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The file could not be read.
    #[error("cannot read config '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A line was not `key = value`.
    #[error("config line {line}: expected 'key = value', got '{content}'")]
    Syntax { line: usize, content: String },
    /// A key outside [`KNOWN_KEYS`].
    #[error("config line {line}: unknown key '{key}'")]
    UnknownKey { key: String, line: usize },
    /// The same key assigned twice.
    #[error("config line {line}: duplicate key '{key}' (first set on line {first_line})")]
    Duplicate {
        key: String,
        first_line: usize,
        line: usize,
    },
    /// A value that does not parse as its key's type.
    #[error("config line {line}: {key} = '{value}' is not {expected}")]
    BadValue {
        key: String,
        line: usize,
        value: String,
        expected: &'static str,
    },
    /// A key the subcommand cannot run without.
    #[error("missing required config key '{key}'")]
    MissingKey { key: &'static str },
}

/// A parsed configuration: keys to (value, source line).
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
}

impl Config {
    /// An empty configuration (all lookups miss).
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses configuration text. Unknown keys are collected here but only
    /// rejected by [`Config::check_known`], so the caller can choose strict
    /// or lenient handling.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    content: content.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    content: content.to_string(),
                });
            }
            if let Some((_, first_line)) = entries.get(key) {
                return Err(ConfigError::Duplicate {
                    key: key.to_string(),
                    first_line: *first_line,
                    line,
                });
            }
            entries.insert(key.to_string(), (value.to_string(), line));
        }
        Ok(Self { entries })
    }

    /// Reads and parses a configuration file.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Validates all keys against [`KNOWN_KEYS`]. Under `lenient`, unknown
    /// keys are reported through `warn` instead of failing.
    pub fn check_known(
        &self,
        lenient: bool,
        mut warn: impl FnMut(&str),
    ) -> Result<(), ConfigError> {
        for (key, (_, line)) in &self.entries {
            if !KNOWN_KEYS.iter().any(|(k, _)| k == key) {
                if lenient {
                    warn(&format!("ignoring unknown config key '{key}' (line {line})"));
                } else {
                    return Err(ConfigError::UnknownKey {
                        key: key.clone(),
                        line: *line,
                    });
                }
            }
        }
        Ok(())
    }

    /// True when the key is present.
    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// The raw string value, if present.
    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// A float value, if present.
    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some((value, line)) = self.entries.get(key) else {
            return Ok(None);
        };
        match value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(ConfigError::BadValue {
                key: key.to_string(),
                line: *line,
                value: value.clone(),
                expected: "a finite number",
            }),
        }
    }

    /// An unsigned integer value, if present. Accepts plain integers and
    /// exactly-integral scientific notation (`1e6`).
    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        let Some((value, line)) = self.entries.get(key) else {
            return Ok(None);
        };
        if let Ok(v) = value.parse::<u64>() {
            return Ok(Some(v));
        }
        let bad = || ConfigError::BadValue {
            key: key.to_string(),
            line: *line,
            value: value.clone(),
            expected: "a non-negative integer",
        };
        let as_float: f64 = value.parse().map_err(|_| bad())?;
        if as_float.fract() == 0.0 && (0.0..=u64::MAX as f64).contains(&as_float) {
            Ok(Some(as_float as u64))
        } else {
            Err(bad())
        }
    }

    /// Required-key variants: same as the getters, but absence is an error
    /// naming the key (the CLI maps it to a usage failure).
    pub fn require_f64(&self, key: &'static str) -> Result<f64, ConfigError> {
        self.get_f64(key)?.ok_or(ConfigError::MissingKey { key })
    }

    /// See [`Config::require_f64`].
    pub fn require_u64(&self, key: &'static str) -> Result<u64, ConfigError> {
        self.get_u64(key)?.ok_or(ConfigError::MissingKey { key })
    }

    /// See [`Config::require_f64`].
    pub fn require_str(&self, key: &'static str) -> Result<&str, ConfigError> {
        self.get_str(key).ok_or(ConfigError::MissingKey { key })
    }

    /// All `(key, value)` pairs in sorted key order — the canonical order
    /// for echoing the effective configuration into CSV headers.
    pub fn iter_sorted(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }
}
