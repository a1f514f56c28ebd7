//! Recursive-descent parser for `.poid` sources.
//!
//! ```text
//! file        ::= decl*
//! decl        ::= pattern | compose | set | bundle
//! pattern     ::= "pattern" ID ":" CATEGORY "{" field* "}"
//! field       ::= "name" STR | "version" VERSION | "lifecycle" STATE
//!               | "aliases" STR+ | "keywords" STR+ | "intent" STR | "problem" STR
//!               | "context" STR | "forces" STR+ | "consequences" STR+
//!               | ("provides" | "requires") PORTTYPE NAME multiplicity?
//!               | "related" RELKIND ID | "meta" STR STR
//!               | "provenance" "{" ("author" STR | "date" STR | "sources" STR+)* "}"
//!               | "solution" "{" item* "}"
//! multiplicity::= "[" NUM ".." (NUM | "*") "]"
//! item        ::= "text" TEXT | goal | content | eval | play | act | "include" ID
//! goal        ::= "goal" ID "{" ("statement" TEXT | "bloom" LEVEL | "knowledge" DIM | abcd)* "}"
//! abcd        ::= "abcd" "{" ("audience" TEXT | "behavior" TEXT | "condition" TEXT | "degree" TEXT)* "}"
//! content     ::= "content" ID ":" CONTENTLEVEL "{" "body" TEXT "}"
//! eval        ::= "eval" ID ":" EVALKIND "{" ("goal" ID | "prompt" TEXT | "answer" TEXT | "choice" TEXT)* "}"
//! play        ::= "play" "{" ("title" TEXT | act)* "}"
//! act         ::= "act" "{" ("title" TEXT | "goal" ID | scene)* "}"
//! scene       ::= "scene" "{" ("title" TEXT | "content" ID | instruction)* "}"
//! instruction ::= "instruction" TEXT "{" ("content" ID | "principle" P | "phase" PH | "goal" ID)* "}"
//! compose     ::= "compose" ID ("version" VERSION)? "{" node+ "}"
//! node        ::= "ref" ID (";" | "{" binding* "}")
//!               | ("seq" | "par" | "alt") "{" node* "}"
//!               | "opt" "{" node+ "}" | "rep" NUM ".." NUM "{" node+ "}"
//! binding     ::= "wire" NAME "<-" ID "." NAME ";" | "param" NAME "=" SCALAR ";" | "locale" TAG ";"
//! set         ::= ("goalset" | "contentset" | "evaluationset") ID "{" item* "}"
//! bundle      ::= "bundle" TAG "{" (KEYREF "=" STR)* "}"
//! TEXT        ::= STR | KEYREF
//! ```
//!
//! A declaration that fails to parse becomes an error node; the parser then
//! skips to the next declaration keyword.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::composition::{Binding, Composition, CompositionNode, Scalar, Wire, MAX_REPEAT};
use crate::locale::{is_valid_key, LocaleTag};
use crate::pattern::{
    AbcdDecl, ActDecl, ContentDecl, EvalDecl, EvalKind, GoalDecl, InstructionDecl, Multiplicity, Pattern,
    PatternCategory, PatternId, PlayDecl, Port, PortDirection, Provenance, Relationship, RelationshipKind, SceneDecl,
    SolutionBody, SolutionItem, TextSource, Version,
};
use crate::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension};

use super::ast::{Ast, BundleDecl, Decl, DeclKind, SetDecl, SetKind};
use super::lexer::{lex, unescape, Token, TokenKind};
use super::span::LineIndex;
use super::{Diagnostic, SourceSpan};

/// Composition and solution blocks nested deeper than this are rejected.
pub const MAX_NESTING: u32 = 64;

type PResult<T> = Result<T, ()>;

/// Parses one source file. Always returns a tree; declarations that fail to
/// parse are kept as error nodes.
pub fn parse_file(text: &str, path: &Path) -> (Ast, Vec<Diagnostic>) {
    let file: Arc<Path> = Arc::from(path);
    let (tokens, diagnostics) = lex(text, file.clone());
    let mut parser = Parser {
        text,
        tokens,
        pos: 0,
        lines: LineIndex::new(text, file.clone()),
        diagnostics,
        pending_comments: Vec::new(),
        collect_comments: false,
        quiet_comments: false,
        depth: 0,
        last_end: 0,
    };
    let ast = parser.file(file);
    (ast, parser.diagnostics)
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    lines: LineIndex<'a>,
    diagnostics: Vec<Diagnostic>,
    pending_comments: Vec<String>,
    collect_comments: bool,
    quiet_comments: bool,
    depth: u32,
    last_end: usize,
}

impl<'a> Parser<'a> {
    fn file(&mut self, path: Arc<Path>) -> Ast {
        let mut ast = Ast { path, decls: Vec::new(), trailing_comments: Vec::new() };
        loop {
            self.collect_comments = true;
            let next = self.peek();
            self.collect_comments = false;
            let Some(tok) = next else { break };
            let comments = std::mem::take(&mut self.pending_comments);
            let start_pos = self.pos;
            let result = match tok.kind {
                TokenKind::KwPattern => self.pattern_decl().map(|p| DeclKind::Pattern(Box::new(p))),
                TokenKind::KwCompose => self.compose_decl().map(DeclKind::Composition),
                TokenKind::KwGoalset => self.set_decl(SetKind::Goals).map(DeclKind::Set),
                TokenKind::KwContentset => self.set_decl(SetKind::Content).map(DeclKind::Set),
                TokenKind::KwEvaluationset => self.set_decl(SetKind::Evaluations).map(DeclKind::Set),
                TokenKind::KwBundle => self.bundle_decl().map(DeclKind::Bundle),
                _ => self.unexpected(
                    "a declaration (`pattern`, `compose`, `goalset`, `contentset`, `evaluationset` or `bundle`)",
                ),
            };
            let kind = result.unwrap_or_else(|()| {
                self.recover(start_pos);
                DeclKind::Error(self.lines.span(tok.start, self.last_end.max(tok.end)))
            });
            self.depth = 0;
            ast.decls.push(Decl { comments, kind });
        }
        ast.trailing_comments = std::mem::take(&mut self.pending_comments);
        ast
    }

    // ---- token plumbing ----------------------------------------------------

    fn skip_trivia(&mut self) {
        while let Some(tok) = self.tokens.get(self.pos) {
            match tok.kind {
                TokenKind::Whitespace => {}
                TokenKind::Comment => {
                    let body = tok.text(self.text)[2..].trim().to_string();
                    if self.collect_comments {
                        self.pending_comments.push(body);
                    } else if !self.quiet_comments {
                        let span = self.lines.span(tok.start, tok.end);
                        self.diagnostics.push(Diagnostic::warning(
                            "P0301",
                            "comments are only kept before declarations; `fmt` will drop this one",
                            span,
                        ));
                    }
                }
                _ => return,
            }
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<Token> {
        self.skip_trivia();
        self.tokens.get(self.pos).copied()
    }

    fn peek_kind(&mut self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().expect("bump past end of input");
        self.pos += 1;
        self.last_end = tok.end;
        tok
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn at_word(&mut self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Ident && t.text(self.text) == word)
    }

    fn here(&mut self) -> SourceSpan {
        match self.peek() {
            Some(t) => self.lines.span(t.start, t.end),
            None => self.lines.span(self.text.len(), self.text.len()),
        }
    }

    fn span_from(&self, start: usize) -> SourceSpan {
        self.lines.span(start, self.last_end)
    }

    fn fail<T>(&mut self, code: &'static str, message: impl Into<String>) -> PResult<T> {
        let span = self.here();
        self.diagnostics.push(Diagnostic::error(code, message, span));
        Err(())
    }

    fn soft_error(&mut self, code: &'static str, message: impl Into<String>, span: SourceSpan) {
        self.diagnostics.push(Diagnostic::error(code, message, span));
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        match self.peek() {
            // the lexer already reported it
            Some(t) if t.kind == TokenKind::Error => Err(()),
            Some(t) => {
                let found = match t.kind {
                    TokenKind::Ident => format!("`{}`", t.text(self.text)),
                    k => k.describe().to_string(),
                };
                self.fail("P0100", format!("expected {expected}, found {found}"))
            }
            None => self.fail("P0100", format!("expected {expected}, found end of input")),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.peek_kind() == Some(kind) {
            Ok(self.bump())
        } else {
            self.unexpected(kind.describe())
        }
    }

    fn recover(&mut self, start_pos: usize) {
        self.quiet_comments = true;
        if self.pos <= start_pos && self.peek().is_some() {
            self.bump();
        }
        while let Some(t) = self.peek() {
            if t.kind.is_decl_keyword() {
                break;
            }
            self.bump();
        }
        self.quiet_comments = false;
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return self.fail("P0120", format!("nesting deeper than {MAX_NESTING} levels"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- terminals ---------------------------------------------------------

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.bump();
                Ok((t.text(self.text).to_string(), self.lines.span(t.start, t.end)))
            }
            _ => self.unexpected(what),
        }
    }

    fn id(&mut self, what: &str) -> PResult<PatternId> {
        let (name, span) = self.ident(what)?;
        PatternId::new(name.as_str()).map_err(|e| {
            self.diagnostics.push(Diagnostic::error("P0101", e.to_string(), span));
        })
    }

    fn keyword_value<T: FromStr<Err = String>>(&mut self, what: &str) -> PResult<T> {
        let (name, span) = self.ident(what)?;
        name.parse().map_err(|e: String| {
            self.diagnostics.push(Diagnostic::error("P0103", e, span));
        })
    }

    fn string(&mut self) -> PResult<String> {
        let tok = self.expect(TokenKind::String)?;
        Ok(unescape(tok.text(self.text)))
    }

    fn strings(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.string()?];
        while self.peek_kind() == Some(TokenKind::String) {
            out.push(self.string()?);
        }
        Ok(out)
    }

    fn text_source(&mut self) -> PResult<TextSource> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::String => self.string().map(TextSource::Literal),
            Some(t) if t.kind == TokenKind::KeyRef => {
                self.bump();
                Ok(TextSource::Key(t.text(self.text)[1..].to_string()))
            }
            _ => self.unexpected("a string or `@key`"),
        }
    }

    fn number<T: FromStr>(&mut self) -> PResult<T> {
        let tok = self.expect(TokenKind::Number)?;
        tok.text(self.text).parse().map_err(|_| {
            let span = self.lines.span(tok.start, tok.end);
            self.diagnostics.push(Diagnostic::error("P0106", "number out of range", span));
        })
    }

    fn version(&mut self) -> PResult<Version> {
        let major = self.number()?;
        self.expect(TokenKind::Dot)?;
        let minor = self.number()?;
        self.expect(TokenKind::Dot)?;
        let patch = self.number()?;
        Ok(Version::new(major, minor, patch))
    }

    /// Consumes a field keyword, flagging a repeat of a once-only field.
    fn field_once(&mut self, seen: &mut Vec<&'static str>, name: &'static str) {
        let tok = self.bump();
        if seen.contains(&name) {
            let span = self.lines.span(tok.start, tok.end);
            self.soft_error("P0104", format!("duplicate field `{name}`"), span);
        } else {
            seen.push(name);
        }
    }

    fn required<T>(&mut self, value: Option<T>, field: &str, owner: &str) -> PResult<T> {
        match value {
            Some(v) => Ok(v),
            None => {
                let span = self.lines.span(self.last_end.saturating_sub(1), self.last_end);
                self.diagnostics.push(Diagnostic::error("P0105", format!("{owner} requires `{field}`"), span));
                Err(())
            }
        }
    }

    // ---- patterns ----------------------------------------------------------

    fn pattern_decl(&mut self) -> PResult<Pattern> {
        let start = self.bump().start;
        let id = self.id("a pattern id")?;
        if !self.eat(TokenKind::Colon) {
            return self.fail("P0102", format!("category required: write `pattern {id} : <Category>`"));
        }
        let category: PatternCategory = self.keyword_value("a pattern category")?;
        self.expect(TokenKind::LBrace)?;
        let mut p = Pattern::with_id(id, category, "");
        let mut seen = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                return self.unexpected("`}`");
            };
            if tok.kind == TokenKind::RBrace {
                self.bump();
                break;
            }
            if tok.kind != TokenKind::Ident {
                return self.unexpected("a pattern field");
            }
            match tok.text(self.text) {
                "name" => {
                    self.field_once(&mut seen, "name");
                    p.name = self.string()?;
                }
                "version" => {
                    self.field_once(&mut seen, "version");
                    p.version = self.version()?;
                }
                "lifecycle" => {
                    self.field_once(&mut seen, "lifecycle");
                    p.lifecycle = self.keyword_value("a lifecycle state")?;
                }
                "aliases" => {
                    self.field_once(&mut seen, "aliases");
                    p.aliases = self.strings()?;
                }
                "keywords" => {
                    self.field_once(&mut seen, "keywords");
                    p.keywords = self.strings()?;
                }
                "intent" => {
                    self.field_once(&mut seen, "intent");
                    p.intent = self.string()?;
                }
                "problem" => {
                    self.field_once(&mut seen, "problem");
                    p.problem = self.string()?;
                }
                "context" => {
                    self.field_once(&mut seen, "context");
                    p.context = self.string()?;
                }
                "forces" => {
                    self.field_once(&mut seen, "forces");
                    p.forces = self.strings()?;
                }
                "consequences" => {
                    self.field_once(&mut seen, "consequences");
                    p.consequences = self.strings()?;
                }
                "provides" | "requires" => {
                    let direction =
                        if self.at_word("provides") { PortDirection::Provided } else { PortDirection::Required };
                    self.bump();
                    let port_type = self.keyword_value("a port type")?;
                    let (name, _) = self.ident("a port name")?;
                    let multiplicity = if self.peek_kind() == Some(TokenKind::LBracket) {
                        self.multiplicity()?
                    } else {
                        Multiplicity::default()
                    };
                    p.ports.push(Port { name, direction, port_type, multiplicity });
                }
                "related" => {
                    self.bump();
                    let (kind, span) = self.ident("a relationship kind")?;
                    let Some(kind) = RelationshipKind::from_keyword(&kind) else {
                        self.soft_error(
                            "P0103",
                            format!("unknown relationship `{kind}` (expected uses, refines, requires, conflicts-with or alternative-to)"),
                            span,
                        );
                        return Err(());
                    };
                    let target = self.id("a pattern id")?;
                    p.related.push(Relationship { kind, target });
                }
                "meta" => {
                    let span = self.here();
                    self.bump();
                    let key = self.string()?;
                    let value = self.string()?;
                    if p.metadata.insert(key.clone(), value).is_some() {
                        self.soft_error("P0107", format!("duplicate metadata key `{key}`"), span);
                    }
                }
                "provenance" => {
                    self.field_once(&mut seen, "provenance");
                    p.provenance = self.provenance()?;
                }
                "solution" => {
                    self.field_once(&mut seen, "solution");
                    p.solution = self.solution()?;
                }
                _ => return self.unexpected("a pattern field"),
            }
        }
        p.span = self.span_from(start);
        Ok(p)
    }

    fn multiplicity(&mut self) -> PResult<Multiplicity> {
        self.expect(TokenKind::LBracket)?;
        let min = self.number()?;
        self.expect(TokenKind::DotDot)?;
        let max = if self.eat(TokenKind::Star) { None } else { Some(self.number()?) };
        self.expect(TokenKind::RBracket)?;
        Ok(Multiplicity { min, max })
    }

    fn provenance(&mut self) -> PResult<Provenance> {
        self.expect(TokenKind::LBrace)?;
        let mut prov = Provenance::default();
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("author") {
                self.field_once(&mut seen, "author");
                prov.author = self.string()?;
            } else if self.at_word("date") {
                self.field_once(&mut seen, "date");
                prov.date = self.string()?;
            } else if self.at_word("sources") {
                self.field_once(&mut seen, "sources");
                prov.sources = self.strings()?;
            } else {
                return self.unexpected("`author`, `date`, `sources` or `}`");
            }
        }
        Ok(prov)
    }

    fn solution(&mut self) -> PResult<SolutionBody> {
        self.expect(TokenKind::LBrace)?;
        let mut body = SolutionBody::default();
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("text") {
                self.field_once(&mut seen, "text");
                body.text = Some(self.text_source()?);
            } else {
                body.items.push(self.solution_item(None)?);
            }
        }
        Ok(body)
    }

    /// One solution item; `only` restricts the accepted kinds (inside sets).
    fn solution_item(&mut self, only: Option<SetKind>) -> PResult<SolutionItem> {
        let word = match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => t.text(self.text),
            _ => "",
        };
        let allowed = |kind: SetKind| only.is_none_or(|o| o == kind);
        match word {
            "goal" if allowed(SetKind::Goals) => self.goal().map(SolutionItem::Goal),
            "content" if allowed(SetKind::Content) => self.content().map(SolutionItem::Content),
            "eval" if allowed(SetKind::Evaluations) => self.eval().map(SolutionItem::Eval),
            "play" if only.is_none() => self.play().map(SolutionItem::Play),
            "act" if only.is_none() => self.act().map(SolutionItem::Act),
            "include" if only.is_none() => {
                self.bump();
                self.id("a set id").map(SolutionItem::Include)
            }
            _ => match only {
                Some(SetKind::Goals) => self.unexpected("`goal` or `}`"),
                Some(SetKind::Content) => self.unexpected("`content` or `}`"),
                Some(SetKind::Evaluations) => self.unexpected("`eval` or `}`"),
                None => self
                    .unexpected("a solution item (`text`, `goal`, `content`, `eval`, `play`, `act`, `include`) or `}`"),
            },
        }
    }

    fn goal(&mut self) -> PResult<GoalDecl> {
        self.bump();
        let id = self.id("a goal id")?;
        self.expect(TokenKind::LBrace)?;
        let (mut statement, mut bloom, mut knowledge, mut abcd) = (None, None, None, None);
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("statement") {
                self.field_once(&mut seen, "statement");
                statement = Some(self.text_source()?);
            } else if self.at_word("bloom") {
                self.field_once(&mut seen, "bloom");
                bloom = Some(self.keyword_value::<BloomLevel>("a Bloom level")?);
            } else if self.at_word("knowledge") {
                self.field_once(&mut seen, "knowledge");
                knowledge = Some(self.keyword_value::<KnowledgeDimension>("a knowledge dimension")?);
            } else if self.at_word("abcd") {
                self.field_once(&mut seen, "abcd");
                abcd = Some(self.abcd()?);
            } else {
                return self.unexpected("`statement`, `bloom`, `knowledge`, `abcd` or `}`");
            }
        }
        let bloom = self.required(bloom, "bloom", "goal")?;
        let knowledge = self.required(knowledge, "knowledge", "goal")?;
        Ok(GoalDecl { id, statement, bloom, knowledge, abcd })
    }

    fn abcd(&mut self) -> PResult<AbcdDecl> {
        self.expect(TokenKind::LBrace)?;
        let mut parts: [Option<TextSource>; 4] = Default::default();
        let names = ["audience", "behavior", "condition", "degree"];
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            let Some(i) = names.iter().position(|n| self.at_word(n)) else {
                return self.unexpected("`audience`, `behavior`, `condition`, `degree` or `}`");
            };
            self.field_once(&mut seen, names[i]);
            parts[i] = Some(self.text_source()?);
        }
        let [audience, behavior, condition, degree] = parts;
        let audience = self.required(audience, "audience", "abcd")?;
        let behavior = self.required(behavior, "behavior", "abcd")?;
        Ok(AbcdDecl { audience, behavior, condition, degree })
    }

    fn content(&mut self) -> PResult<ContentDecl> {
        self.bump();
        let id = self.id("a content id")?;
        self.expect(TokenKind::Colon)?;
        let level: ContentLevel = self.keyword_value("a content level")?;
        self.expect(TokenKind::LBrace)?;
        let mut body = None;
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("body") {
                self.field_once(&mut seen, "body");
                body = Some(self.text_source()?);
            } else {
                return self.unexpected("`body` or `}`");
            }
        }
        let body = self.required(body, "body", "content")?;
        Ok(ContentDecl { id, level, body })
    }

    fn eval(&mut self) -> PResult<EvalDecl> {
        self.bump();
        let id = self.id("an evaluation id")?;
        self.expect(TokenKind::Colon)?;
        let kind: EvalKind = self.keyword_value("an evaluation kind")?;
        self.expect(TokenKind::LBrace)?;
        let (mut prompt, mut answer) = (None, None);
        let (mut goals, mut choices) = (Vec::new(), Vec::new());
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("goal") {
                self.bump();
                goals.push(self.id("a goal id")?);
            } else if self.at_word("prompt") {
                self.field_once(&mut seen, "prompt");
                prompt = Some(self.text_source()?);
            } else if self.at_word("answer") {
                self.field_once(&mut seen, "answer");
                answer = Some(self.text_source()?);
            } else if self.at_word("choice") {
                self.bump();
                choices.push(self.text_source()?);
            } else {
                return self.unexpected("`goal`, `prompt`, `answer`, `choice` or `}`");
            }
        }
        let prompt = self.required(prompt, "prompt", "eval")?;
        let answer = self.required(answer, "answer", "eval")?;
        Ok(EvalDecl { id, kind, goals, prompt, answer, choices })
    }

    fn title(&mut self, seen: &mut Vec<&'static str>) -> PResult<TextSource> {
        self.field_once(seen, "title");
        self.text_source()
    }

    fn play(&mut self) -> PResult<PlayDecl> {
        self.bump();
        self.expect(TokenKind::LBrace)?;
        let mut play = PlayDecl::default();
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("title") {
                play.title = Some(self.title(&mut seen)?);
            } else if self.at_word("act") {
                play.acts.push(self.act()?);
            } else {
                return self.unexpected("`title`, `act` or `}`");
            }
        }
        Ok(play)
    }

    fn act(&mut self) -> PResult<ActDecl> {
        self.bump();
        self.expect(TokenKind::LBrace)?;
        let mut act = ActDecl::default();
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("title") {
                act.title = Some(self.title(&mut seen)?);
            } else if self.at_word("goal") {
                self.bump();
                act.goals.push(self.id("a goal id")?);
            } else if self.at_word("scene") {
                act.scenes.push(self.scene()?);
            } else {
                return self.unexpected("`title`, `goal`, `scene` or `}`");
            }
        }
        Ok(act)
    }

    fn scene(&mut self) -> PResult<SceneDecl> {
        self.bump();
        self.expect(TokenKind::LBrace)?;
        let mut scene = SceneDecl::default();
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("title") {
                scene.title = Some(self.title(&mut seen)?);
            } else if self.at_word("content") {
                self.bump();
                scene.content.push(self.id("a content id")?);
            } else if self.at_word("instruction") {
                scene.instructions.push(self.instruction()?);
            } else {
                return self.unexpected("`title`, `content`, `instruction` or `}`");
            }
        }
        Ok(scene)
    }

    fn instruction(&mut self) -> PResult<InstructionDecl> {
        self.bump();
        let text = self.text_source()?;
        self.expect(TokenKind::LBrace)?;
        let mut ins = InstructionDecl { text, content: vec![], principles: vec![], phase: None, goals: vec![] };
        let mut seen = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            if self.at_word("content") {
                self.bump();
                ins.content.push(self.id("a content id")?);
            } else if self.at_word("principle") {
                self.bump();
                ins.principles.push(self.keyword_value("a Merrill principle")?);
            } else if self.at_word("phase") {
                self.field_once(&mut seen, "phase");
                ins.phase = Some(self.keyword_value("a sub-cycle phase")?);
            } else if self.at_word("goal") {
                self.bump();
                ins.goals.push(self.id("a goal id")?);
            } else {
                return self.unexpected("`content`, `principle`, `phase`, `goal` or `}`");
            }
        }
        Ok(ins)
    }

    // ---- compositions ------------------------------------------------------

    fn compose_decl(&mut self) -> PResult<Composition> {
        let start = self.bump().start;
        let id = self.id("a composition id")?;
        let version = if self.at_word("version") {
            self.bump();
            self.version()?
        } else {
            Version::default()
        };
        let open = self.here();
        self.expect(TokenKind::LBrace)?;
        let root = self.node_body(open, "composition")?;
        Ok(Composition { id, version, root, span: self.span_from(start) })
    }

    /// Nodes up to the closing brace. One node stands for itself; several form a `seq`.
    fn node_body(&mut self, open: SourceSpan, owner: &str) -> PResult<CompositionNode> {
        let mut nodes = self.nodes()?;
        match nodes.len() {
            0 => {
                let span = open.to(&self.here());
                self.soft_error("P0110", format!("{owner} needs at least one child"), span);
                Err(())
            }
            1 => Ok(nodes.pop().expect("one node")),
            _ => Ok(CompositionNode::Seq(nodes)),
        }
    }

    fn nodes(&mut self) -> PResult<Vec<CompositionNode>> {
        let mut nodes = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            nodes.push(self.node()?);
        }
        Ok(nodes)
    }

    fn node(&mut self) -> PResult<CompositionNode> {
        self.enter()?;
        let node = self.node_inner();
        self.leave();
        node
    }

    fn node_inner(&mut self) -> PResult<CompositionNode> {
        let Some(tok) = self.peek().filter(|t| t.kind == TokenKind::Ident) else {
            return self.unexpected("`ref`, `seq`, `par`, `alt`, `opt`, `rep` or `}`");
        };
        let head = self.lines.span(tok.start, tok.end);
        match tok.text(self.text) {
            "ref" => {
                self.bump();
                let pattern = self.id("a pattern id")?;
                let binding = if self.eat(TokenKind::Semi) { Binding::default() } else { self.binding()? };
                Ok(CompositionNode::Leaf { pattern, binding, span: self.span_from(tok.start) })
            }
            "seq" | "par" | "alt" => {
                let op = tok.text(self.text);
                self.bump();
                self.expect(TokenKind::LBrace)?;
                let children = self.nodes()?;
                Ok(match op {
                    "seq" => CompositionNode::Seq(children),
                    "par" => CompositionNode::Par(children),
                    _ => {
                        if children.len() < 2 {
                            self.soft_error(
                                "P0111",
                                format!("alt needs at least 2 children, found {}", children.len()),
                                head,
                            );
                        }
                        CompositionNode::Alt(children)
                    }
                })
            }
            "opt" => {
                self.bump();
                self.expect(TokenKind::LBrace)?;
                Ok(CompositionNode::opt(self.node_body(head, "opt")?))
            }
            "rep" => {
                self.bump();
                let min = self.number()?;
                self.expect(TokenKind::DotDot)?;
                let max = self.number()?;
                if min > max || max > MAX_REPEAT {
                    let span = head.to(&self.span_from(tok.start));
                    self.soft_error(
                        "P0112",
                        format!("rep bounds {min}..{max} must satisfy min <= max <= {MAX_REPEAT}"),
                        span,
                    );
                }
                self.expect(TokenKind::LBrace)?;
                Ok(CompositionNode::rep(self.node_body(head, "rep")?, min, max))
            }
            _ => self.unexpected("`ref`, `seq`, `par`, `alt`, `opt`, `rep` or `}`"),
        }
    }

    fn binding(&mut self) -> PResult<Binding> {
        self.expect(TokenKind::LBrace)?;
        let mut binding = Binding::default();
        while !self.eat(TokenKind::RBrace) {
            let span = self.here();
            if self.at_word("wire") {
                self.bump();
                let (required_port, _) = self.ident("a required port name")?;
                self.expect(TokenKind::Arrow)?;
                let provider = self.id("a provider pattern id")?;
                self.expect(TokenKind::Dot)?;
                let (provided_port, _) = self.ident("a provided port name")?;
                binding.wires.push(Wire { required_port, provider, provided_port });
            } else if self.at_word("param") {
                self.bump();
                let (name, _) = self.ident("a parameter name")?;
                self.expect(TokenKind::Eq)?;
                let value = match self.peek() {
                    Some(t) if t.kind == TokenKind::String => Scalar::Str(self.string()?),
                    Some(t) if t.kind == TokenKind::Number => Scalar::Int(self.number()?),
                    Some(t) if t.kind == TokenKind::Ident && matches!(t.text(self.text), "true" | "false") => {
                        self.bump();
                        Scalar::Bool(t.text(self.text) == "true")
                    }
                    _ => return self.unexpected("a string, number, `true` or `false`"),
                };
                if binding.params.insert(name.clone(), value).is_some() {
                    self.soft_error("P0107", format!("duplicate parameter `{name}`"), span);
                }
            } else if self.at_word("locale") {
                self.bump();
                let tag = self.locale_tag()?;
                if binding.locale.replace(tag).is_some() {
                    self.soft_error("P0104", "duplicate field `locale`", span);
                }
            } else {
                return self.unexpected("`wire`, `param`, `locale` or `}`");
            }
            self.expect(TokenKind::Semi)?;
        }
        Ok(binding)
    }

    fn locale_tag(&mut self) -> PResult<LocaleTag> {
        let (tag, span) = self.ident("a locale tag")?;
        LocaleTag::new(tag).map_err(|e| {
            self.diagnostics.push(Diagnostic::error("P0103", e.to_string(), span));
        })
    }

    // ---- sets and bundles --------------------------------------------------

    fn set_decl(&mut self, kind: SetKind) -> PResult<SetDecl> {
        let start = self.bump().start;
        let id = self.id("a set id")?;
        self.expect(TokenKind::LBrace)?;
        let mut items = Vec::new();
        while !self.eat(TokenKind::RBrace) {
            items.push(self.solution_item(Some(kind))?);
        }
        Ok(SetDecl { kind, id, items, span: self.span_from(start) })
    }

    fn bundle_decl(&mut self) -> PResult<BundleDecl> {
        let start = self.bump().start;
        let locale = self.locale_tag()?;
        self.expect(TokenKind::LBrace)?;
        let mut entries = BTreeMap::new();
        while !self.eat(TokenKind::RBrace) {
            let tok = self.expect(TokenKind::KeyRef)?;
            let key = tok.text(self.text)[1..].to_string();
            debug_assert!(is_valid_key(&key));
            self.expect(TokenKind::Eq)?;
            let value = self.string()?;
            if entries.insert(key.clone(), value).is_some() {
                let span = self.lines.span(tok.start, tok.end);
                self.soft_error("P0107", format!("duplicate key `{key}`"), span);
            }
        }
        Ok(BundleDecl { locale, entries, span: self.span_from(start) })
    }
}
