//! Lossless lexer: every byte of the input belongs to exactly one token,
//! trivia included.

use std::path::Path;
use std::sync::Arc;

use super::span::LineIndex;
use super::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    KwPattern,
    KwCompose,
    KwGoalset,
    KwContentset,
    KwEvaluationset,
    KwBundle,
    Ident,
    Number,
    String,
    /// `@dotted.key`
    KeyRef,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Dot,
    DotDot,
    Eq,
    Arrow,
    Star,
    Whitespace,
    Comment,
    Error,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Whitespace | TokenKind::Comment)
    }

    /// Keywords that open a top-level declaration; error recovery resyncs on these.
    pub fn is_decl_keyword(self) -> bool {
        matches!(
            self,
            TokenKind::KwPattern
                | TokenKind::KwCompose
                | TokenKind::KwGoalset
                | TokenKind::KwContentset
                | TokenKind::KwEvaluationset
                | TokenKind::KwBundle
        )
    }

    pub fn describe(self) -> &'static str {
        match self {
            TokenKind::KwPattern => "`pattern`",
            TokenKind::KwCompose => "`compose`",
            TokenKind::KwGoalset => "`goalset`",
            TokenKind::KwContentset => "`contentset`",
            TokenKind::KwEvaluationset => "`evaluationset`",
            TokenKind::KwBundle => "`bundle`",
            TokenKind::Ident => "identifier",
            TokenKind::Number => "number",
            TokenKind::String => "string",
            TokenKind::KeyRef => "key reference",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::Colon => "`:`",
            TokenKind::Semi => "`;`",
            TokenKind::Dot => "`.`",
            TokenKind::DotDot => "`..`",
            TokenKind::Eq => "`=`",
            TokenKind::Arrow => "`<-`",
            TokenKind::Star => "`*`",
            TokenKind::Whitespace => "whitespace",
            TokenKind::Comment => "comment",
            TokenKind::Error => "invalid token",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

fn keyword(ident: &str) -> Option<TokenKind> {
    Some(match ident {
        "pattern" => TokenKind::KwPattern,
        "compose" => TokenKind::KwCompose,
        "goalset" => TokenKind::KwGoalset,
        "contentset" => TokenKind::KwContentset,
        "evaluationset" => TokenKind::KwEvaluationset,
        "bundle" => TokenKind::KwBundle,
        _ => return None,
    })
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

fn is_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

/// Lexes every token, trivia included. Never fails.
pub fn lex(text: &str, file: Arc<Path>) -> (Vec<Token>, Vec<Diagnostic>) {
    let lines = LineIndex::new(text, file);
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let bytes = text.as_bytes();
    let mut pos = 0;

    let scan_while = |mut i: usize, pred: &dyn Fn(char) -> bool| {
        while let Some(c) = text[i..].chars().next() {
            if !pred(c) {
                break;
            }
            i += c.len_utf8();
        }
        i
    };

    while pos < text.len() {
        let c = text[pos..].chars().next().expect("in bounds");
        let start = pos;
        let kind = match c {
            ' ' | '\t' | '\n' | '\r' => {
                pos = scan_while(pos, &|c| matches!(c, ' ' | '\t' | '\n' | '\r'));
                TokenKind::Whitespace
            }
            '/' if bytes.get(pos + 1) == Some(&b'/') => {
                pos = text[pos..].find('\n').map_or(text.len(), |i| pos + i);
                TokenKind::Comment
            }
            'a'..='z' | 'A'..='Z' => {
                pos = scan_while(pos, &is_ident_continue);
                keyword(&text[start..pos]).unwrap_or(TokenKind::Ident)
            }
            '0'..='9' => {
                pos = scan_while(pos, &|c| c.is_ascii_digit());
                TokenKind::Number
            }
            '-' if bytes.get(pos + 1).is_some_and(u8::is_ascii_digit) => {
                pos = scan_while(pos + 1, &|c| c.is_ascii_digit());
                TokenKind::Number
            }
            '"' => {
                pos += 1;
                let mut terminated = false;
                while let Some(c) = text[pos..].chars().next() {
                    match c {
                        '"' => {
                            pos += 1;
                            terminated = true;
                            break;
                        }
                        '\\' => {
                            let esc_start = pos;
                            pos += 1;
                            match text[pos..].chars().next() {
                                Some('n' | '"' | '\\') => pos += 1,
                                Some(other) => {
                                    pos += other.len_utf8();
                                    diagnostics.push(Diagnostic::error(
                                        "P0003",
                                        format!("invalid escape `\\{other}` (only \\n, \\\" and \\\\ are allowed)"),
                                        lines.span(esc_start, pos),
                                    ));
                                }
                                None => {}
                            }
                        }
                        _ => pos += c.len_utf8(),
                    }
                }
                if terminated {
                    TokenKind::String
                } else {
                    diagnostics.push(Diagnostic::error("P0002", "unterminated string", lines.span(start, pos)));
                    TokenKind::Error
                }
            }
            '@' => {
                pos += 1;
                let mut end = scan_while(pos, &is_key_char);
                if end == pos {
                    diagnostics.push(Diagnostic::error(
                        "P0004",
                        "`@` must be followed by a key",
                        lines.span(start, pos),
                    ));
                    TokenKind::Error
                } else {
                    // dotted segments: `.` only counts when another segment follows
                    while bytes.get(end) == Some(&b'.') {
                        let next = scan_while(end + 1, &is_key_char);
                        if next == end + 1 {
                            break;
                        }
                        end = next;
                    }
                    pos = end;
                    TokenKind::KeyRef
                }
            }
            '.' if bytes.get(pos + 1) == Some(&b'.') => {
                pos += 2;
                TokenKind::DotDot
            }
            '<' if bytes.get(pos + 1) == Some(&b'-') => {
                pos += 2;
                TokenKind::Arrow
            }
            _ => {
                pos += c.len_utf8();
                match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    ':' => TokenKind::Colon,
                    ';' => TokenKind::Semi,
                    '.' => TokenKind::Dot,
                    '=' => TokenKind::Eq,
                    '*' => TokenKind::Star,
                    _ => {
                        diagnostics.push(Diagnostic::error(
                            "P0001",
                            format!("unexpected character `{}`", c.escape_debug()),
                            lines.span(start, pos),
                        ));
                        TokenKind::Error
                    }
                }
            }
        };
        tokens.push(Token { kind, start, end: pos });
    }
    (tokens, diagnostics)
}

/// Every token including whitespace and comments; the lexemes concatenate
/// back to `text`.
pub fn tokenize_all(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    lex(text, Arc::from(Path::new("")))
}

/// Significant tokens only.
pub fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let (tokens, diagnostics) = lex(text, Arc::from(Path::new("")));
    (tokens.into_iter().filter(|t| !t.kind.is_trivia()).collect(), diagnostics)
}

/// Decodes a string token's lexeme (quotes included). Invalid escapes are
/// kept verbatim; the lexer has already reported them.
pub fn unescape(lexeme: &str) -> String {
    let inner = lexeme.strip_prefix('"').unwrap_or(lexeme);
    let inner = inner.strip_suffix('"').unwrap_or(inner);
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('"') => out.push('"'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

pub fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
