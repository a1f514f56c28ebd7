//! `poidc` configuration file.
//!
//! Plain text, one `key = value` per line, `#` starts a comment line:
//!
//! ```text
//! limit = 1000000
//! deny_warnings = false
//! map.Fact = Remember Factual
//! ```
//!
//! `map.<ContentLevel>` overrides one cell of the content-to-Bloom table.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::composition::DEFAULT_LIMIT;
use crate::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension, MappingTable};

pub const CONFIG_ENV: &str = "POIDC_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub limit: u64,
    pub deny_warnings: bool,
    pub mapping: MappingTable,
}

impl Default for Config {
    fn default() -> Self {
        Config { limit: DEFAULT_LIMIT, deny_warnings: false, mapping: MappingTable::default() }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError::Syntax { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "limit" => cfg.limit = value.parse().map_err(|_| err(format!("invalid limit `{value}`")))?,
                "deny_warnings" => {
                    cfg.deny_warnings =
                        value.parse().map_err(|_| err(format!("expected true or false, got `{value}`")))?
                }
                _ => {
                    let level = key
                        .strip_prefix("map.")
                        .ok_or_else(|| err(format!("unknown key `{key}`")))?
                        .parse::<ContentLevel>()
                        .map_err(err)?;
                    let mut parts = value.split_whitespace();
                    let (Some(b), Some(k), None) = (parts.next(), parts.next(), parts.next()) else {
                        return Err(err("expected `<BloomLevel> <KnowledgeDimension>`".into()));
                    };
                    let bloom = b.parse::<BloomLevel>().map_err(err)?;
                    let knowledge = k.parse::<KnowledgeDimension>().map_err(err)?;
                    cfg.mapping.set(level, bloom, knowledge);
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Reads the file named by `POIDC_CONFIG`, or returns defaults when unset.
    pub fn from_env() -> Result<Config, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Config::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = Config::parse("# c\nlimit = 42\ndeny_warnings = true\nmap.Theory = Evaluate Conceptual\n").unwrap();
        assert_eq!(cfg.limit, 42);
        assert!(cfg.deny_warnings);
        assert_eq!(cfg.mapping.get(ContentLevel::Theory), (BloomLevel::Evaluate, KnowledgeDimension::Conceptual));
        assert_eq!(cfg.mapping.get(ContentLevel::Fact), (BloomLevel::Remember, KnowledgeDimension::Factual));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(Config::parse("limit = x"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("map.Fact = Remember").is_err());
        assert!(Config::parse("map.Fact = Remember Factual extra").is_err());
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }
}
