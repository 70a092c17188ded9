use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

/// Environment variable naming the token file when no path is given.
pub const TOKENS_ENV: &str = "MRC_AUDIT_TOKENS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read token file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid token file {path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Deserialize)]
struct TokenFile {
    /// annotator id -> bearer token
    annotators: BTreeMap<String, String>,
}

/// Static bearer tokens, one per annotator.
#[derive(Debug, Clone, Default)]
pub struct TokenTable {
    by_token: HashMap<String, String>,
}

impl TokenTable {
    /// Parses
    ///
    /// ```toml
    /// [annotators]
    /// alice = "token-a"
    /// bob = "token-b"
    /// ```
    pub fn parse(src: &str, origin: &str) -> Result<Self, ConfigError> {
        let invalid = |message: String| ConfigError::Invalid { path: origin.to_string(), message };
        let file: TokenFile = toml::from_str(src).map_err(|e| invalid(e.to_string()))?;
        let mut by_token = HashMap::new();
        for (annotator, token) in file.annotators {
            if token.trim().is_empty() || annotator.trim().is_empty() {
                return Err(invalid(format!("empty token or annotator id for `{annotator}`")));
            }
            if let Some(prev) = by_token.insert(token, annotator.clone()) {
                return Err(invalid(format!("`{prev}` and `{annotator}` share a token")));
            }
        }
        if by_token.is_empty() {
            return Err(invalid("no annotators configured".into()));
        }
        Ok(TokenTable { by_token })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: origin.clone(), source })?;
        Self::parse(&src, &origin)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        TokenTable { by_token: pairs.into_iter().map(|(a, t)| (t.to_string(), a.to_string())).collect() }
    }

    pub fn annotator(&self, token: &str) -> Option<&str> {
        self.by_token.get(token).map(String::as_str)
    }
}
