//! The `.poid` source format: lexer, parser, canonical printer, diagnostics.

pub mod ast;
mod diagnostic;
pub mod lexer;
mod parser;
mod printer;
mod span;

pub use ast::{Ast, BundleDecl, Decl, DeclKind, SetDecl, SetKind};
pub use diagnostic::{has_errors, is_valid_code, Diagnostic, Severity};
pub use lexer::{tokenize, tokenize_all, Token, TokenKind};
pub use parser::{parse_file, MAX_NESTING};
pub use printer::{print_canonical, print_pattern, PrintError};
pub use span::SourceSpan;
