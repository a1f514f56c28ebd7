//! Locale tags and locale bundles.
//!
//! A bundle file (`bundles/<locale>.bundle`) is UTF-8 text read line by line:
//!
//! ```text
//! # comment
//! @locale hi
//! act4.scene1.word1 = कमल
//! ```
//!
//! * Lines end in LF; one trailing CR per line is dropped.
//! * Blank lines and lines whose first non-blank character is `#` are ignored.
//! * The first other line must be `@locale <tag>`.
//! * Every remaining line is `<key> = <value>`, split at the first `=`. The key
//!   is a dotted path of `[A-Za-z0-9_-]+` segments. The value has surrounding
//!   spaces and tabs removed; `\n` and `\\` are its only escapes.
//! * A key may appear once.
//!
//! [`LocaleBundle::to_file_string`] writes the header, then entries sorted by key.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LocaleTag(String);

impl LocaleTag {
    /// `[a-z]{2,3}` followed by `-`-separated alphanumeric subtags of 1 to 8 chars.
    pub fn new(tag: impl Into<String>) -> Result<Self, BundleError> {
        let tag = tag.into();
        let mut parts = tag.split('-');
        let primary = parts.next().unwrap_or("");
        let ok = (2..=3).contains(&primary.len())
            && primary.bytes().all(|b| b.is_ascii_lowercase())
            && parts.all(|p| (1..=8).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_alphanumeric()));
        if ok {
            Ok(LocaleTag(tag))
        } else {
            Err(BundleError::BadLocale(tag))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LocaleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for LocaleTag {
    type Error = BundleError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        LocaleTag::new(value)
    }
}

impl From<LocaleTag> for String {
    fn from(tag: LocaleTag) -> Self {
        tag.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("invalid locale tag `{0}`")]
    BadLocale(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `@locale <tag>` header")]
    MissingHeader,
}

pub fn is_valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .split('.')
            .all(|seg| !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_'))
}

/// Flat table from dotted keys to localized strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocaleBundle {
    pub locale: LocaleTag,
    pub entries: BTreeMap<String, String>,
}

impl LocaleBundle {
    pub fn new(locale: LocaleTag) -> Self {
        LocaleBundle { locale, entries: BTreeMap::new() }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) -> Option<String> {
        self.entries.insert(key.into(), value.into())
    }

    pub fn parse(text: &str) -> Result<LocaleBundle, BundleError> {
        let mut bundle: Option<LocaleBundle> = None;
        for (i, raw) in text.split('\n').enumerate() {
            let line_no = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            let trimmed = line.trim_matches([' ', '\t']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let syntax = |message: String| BundleError::Syntax { line: line_no, message };
            let Some(bundle) = bundle.as_mut() else {
                let tag = trimmed
                    .strip_prefix("@locale")
                    .filter(|rest| rest.starts_with([' ', '\t']))
                    .ok_or(BundleError::MissingHeader)?;
                bundle = Some(LocaleBundle::new(LocaleTag::new(tag.trim_matches([' ', '\t']))?));
                continue;
            };
            let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `<key> = <value>`".into()))?;
            let key = key.trim_matches([' ', '\t']);
            if !is_valid_key(key) {
                return Err(syntax(format!("invalid key `{key}`")));
            }
            let value = unescape_value(value.trim_matches([' ', '\t'])).map_err(syntax)?;
            if bundle.entries.insert(key.to_string(), value).is_some() {
                return Err(syntax(format!("duplicate key `{key}`")));
            }
        }
        bundle.ok_or(BundleError::MissingHeader)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("@locale {}\n", self.locale);
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v.replace('\\', "\\\\").replace('\n', "\\n"));
            out.push('\n');
        }
        out
    }
}

fn unescape_value(raw: &str) -> Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => return Err(format!("invalid escape `\\{other}`")),
            None => return Err("dangling `\\` at end of value".into()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locale_tags() {
        for ok in ["hi", "te", "gu", "en-IN", "tel", "zh-Hant-TW"] {
            assert!(LocaleTag::new(ok).is_ok(), "{ok}");
        }
        for bad in ["", "h", "HI", "hindi", "en-", "en_IN", "en-toolongtag"] {
            assert!(LocaleTag::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_bundle() {
        let text = "# Hindi\r\n@locale hi\r\nact4.scene1.word1 =  कमल \nmulti = a\\nb\n\n  # x\nslash=c\\\\d\n";
        let b = LocaleBundle::parse(text).unwrap();
        assert_eq!(b.locale.as_str(), "hi");
        assert_eq!(b.get("act4.scene1.word1"), Some("कमल"));
        assert_eq!(b.get("multi"), Some("a\nb"));
        assert_eq!(b.get("slash"), Some("c\\d"));
        assert_eq!(LocaleBundle::parse(&b.to_file_string()).unwrap(), b);
    }

    #[test]
    fn bundle_errors() {
        assert_eq!(LocaleBundle::parse(""), Err(BundleError::MissingHeader));
        assert_eq!(LocaleBundle::parse("a = b\n"), Err(BundleError::MissingHeader));
        assert!(matches!(LocaleBundle::parse("@locale hi\na = 1\na = 2\n"), Err(BundleError::Syntax { line: 3, .. })));
        assert!(matches!(LocaleBundle::parse("@locale hi\nno separator\n"), Err(BundleError::Syntax { line: 2, .. })));
        assert!(matches!(LocaleBundle::parse("@locale hi\na..b = x\n"), Err(BundleError::Syntax { .. })));
        assert!(matches!(LocaleBundle::parse("@locale hi\na = \\q\n"), Err(BundleError::Syntax { .. })));
        assert!(matches!(LocaleBundle::parse("@locale HINDI\n"), Err(BundleError::BadLocale(_))));
    }
}
