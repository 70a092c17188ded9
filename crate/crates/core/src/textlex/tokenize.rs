use std::ops::Range;

use serde::{Deserialize, Serialize};

/// A whitespace-delimited token with its normalized form.
///
/// Pure-punctuation tokens keep their surface and span but carry an empty
/// `norm`; they are skipped by [`norms`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub norm: String,
    /// Byte offsets into the tokenized text.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_word(&self) -> bool {
        !self.norm.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { lowercase: true }
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Case-folds and strips leading/trailing punctuation. Inner punctuation
/// (`27-24`, `u.s`) is preserved.
pub fn normalize_word(surface: &str, config: TokenizerConfig) -> String {
    let trimmed = surface.trim_matches(is_punct);
    if config.lowercase {
        trimmed.to_lowercase()
    } else {
        trimmed.to_string()
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_with(text, TokenizerConfig::default())
}

pub fn tokenize_with(text: &str, config: TokenizerConfig) -> Vec<Token> {
    tokenize_range(text, 0..text.len(), config)
}

/// Tokenizes `text[range]`, reporting spans relative to the whole `text`.
pub fn tokenize_range(text: &str, range: Range<usize>, config: TokenizerConfig) -> Vec<Token> {
    let slice = &text[range.clone()];
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let push = |s: usize, e: usize, out: &mut Vec<Token>| {
        let surface = &slice[s..e];
        out.push(Token {
            surface: surface.to_string(),
            norm: normalize_word(surface, config),
            span: range.start + s..range.start + e,
        });
    };
    for (i, c) in slice.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                push(s, i, &mut out);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        push(s, slice.len(), &mut out);
    }
    out
}

/// The normalized word stream: non-empty norms in order.
pub fn norms(tokens: &[Token]) -> Vec<&str> {
    tokens.iter().filter(|t| t.is_word()).map(|t| t.norm.as_str()).collect()
}
