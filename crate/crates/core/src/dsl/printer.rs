//! Canonical printer: 2-space indent, LF line endings, fixed field order,
//! metadata and bundle keys sorted, list order preserved.

use std::fmt::Write;

use thiserror::Error;

use crate::composition::{Binding, Composition, CompositionNode, Scalar};
use crate::pattern::{
    AbcdDecl, ActDecl, ContentDecl, EvalDecl, GoalDecl, InstructionDecl, Multiplicity, Pattern, PlayDecl,
    PortDirection, SceneDecl, SolutionBody, SolutionItem, TextSource, Version,
};

use super::ast::{Ast, BundleDecl, DeclKind, SetDecl};
use super::lexer::escape;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrintError {
    #[error("cannot print a tree with error nodes")]
    HasErrorNodes,
}

pub fn print_canonical(ast: &Ast) -> Result<String, PrintError> {
    if ast.has_error_nodes() {
        return Err(PrintError::HasErrorNodes);
    }
    let mut p = Printer { out: String::new(), indent: 0 };
    for (i, decl) in ast.decls.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        for c in &decl.comments {
            p.comment(c);
        }
        match &decl.kind {
            DeclKind::Pattern(pattern) => p.pattern(pattern),
            DeclKind::Composition(c) => p.composition(c),
            DeclKind::Set(s) => p.set(s),
            DeclKind::Bundle(b) => p.bundle(b),
            DeclKind::Error(_) => unreachable!("checked above"),
        }
    }
    if !ast.trailing_comments.is_empty() {
        if !ast.decls.is_empty() {
            p.out.push('\n');
        }
        for c in &ast.trailing_comments {
            p.comment(c);
        }
    }
    Ok(p.out)
}

/// Prints a single pattern as a standalone declaration.
pub fn print_pattern(pattern: &Pattern) -> String {
    let mut p = Printer { out: String::new(), indent: 0 };
    p.pattern(pattern);
    p.out
}

struct Printer {
    out: String,
    indent: usize,
}

fn text(t: &TextSource) -> String {
    match t {
        TextSource::Literal(s) => escape(s),
        TextSource::Key(k) => format!("@{k}"),
    }
}

fn strings(items: &[String]) -> String {
    items.iter().map(|s| escape(s)).collect::<Vec<_>>().join(" ")
}

impl Printer {
    fn line(&mut self, s: &str) {
        for _ in 0..self.indent {
            self.out.push_str("  ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn open(&mut self, s: &str) {
        self.line(&format!("{s} {{"));
        self.indent += 1;
    }

    fn close(&mut self) {
        self.indent -= 1;
        self.line("}");
    }

    fn comment(&mut self, c: &str) {
        if c.is_empty() {
            self.line("//");
        } else {
            self.line(&format!("// {c}"));
        }
    }

    fn field_str(&mut self, name: &str, value: &str) {
        if !value.is_empty() {
            self.line(&format!("{name} {}", escape(value)));
        }
    }

    fn field_list(&mut self, name: &str, values: &[String]) {
        if !values.is_empty() {
            self.line(&format!("{name} {}", strings(values)));
        }
    }

    fn pattern(&mut self, p: &Pattern) {
        self.open(&format!("pattern {} : {}", p.id, p.category));
        self.field_str("name", &p.name);
        self.line(&format!("version {}", p.version));
        self.line(&format!("lifecycle {}", p.lifecycle));
        self.field_list("aliases", &p.aliases);
        self.field_list("keywords", &p.keywords);
        self.field_str("intent", &p.intent);
        self.field_str("problem", &p.problem);
        self.field_str("context", &p.context);
        self.field_list("forces", &p.forces);
        self.field_list("consequences", &p.consequences);
        for port in &p.ports {
            let dir = match port.direction {
                PortDirection::Provided => "provides",
                PortDirection::Required => "requires",
            };
            let mult = if port.multiplicity == Multiplicity::default() {
                String::new()
            } else {
                format!(" {}", port.multiplicity)
            };
            self.line(&format!("{dir} {} {}{mult}", port.port_type, port.name));
        }
        for r in &p.related {
            self.line(&format!("related {} {}", r.kind.keyword(), r.target));
        }
        for (k, v) in &p.metadata {
            self.line(&format!("meta {} {}", escape(k), escape(v)));
        }
        if !p.provenance.is_empty() {
            self.open("provenance");
            self.field_str("author", &p.provenance.author);
            self.field_str("date", &p.provenance.date);
            self.field_list("sources", &p.provenance.sources);
            self.close();
        }
        if p.solution != SolutionBody::default() {
            self.open("solution");
            if let Some(t) = &p.solution.text {
                self.line(&format!("text {}", text(t)));
            }
            self.items(&p.solution.items);
            self.close();
        }
        self.close();
    }

    fn items(&mut self, items: &[SolutionItem]) {
        for item in items {
            match item {
                SolutionItem::Goal(g) => self.goal(g),
                SolutionItem::Content(c) => self.content(c),
                SolutionItem::Eval(e) => self.eval(e),
                SolutionItem::Play(p) => self.play(p),
                SolutionItem::Act(a) => self.act(a),
                SolutionItem::Include(id) => self.line(&format!("include {id}")),
            }
        }
    }

    fn goal(&mut self, g: &GoalDecl) {
        self.open(&format!("goal {}", g.id));
        if let Some(s) = &g.statement {
            self.line(&format!("statement {}", text(s)));
        }
        self.line(&format!("bloom {}", g.bloom));
        self.line(&format!("knowledge {}", g.knowledge));
        if let Some(abcd) = &g.abcd {
            self.abcd(abcd);
        }
        self.close();
    }

    fn abcd(&mut self, a: &AbcdDecl) {
        self.open("abcd");
        self.line(&format!("audience {}", text(&a.audience)));
        self.line(&format!("behavior {}", text(&a.behavior)));
        if let Some(c) = &a.condition {
            self.line(&format!("condition {}", text(c)));
        }
        if let Some(d) = &a.degree {
            self.line(&format!("degree {}", text(d)));
        }
        self.close();
    }

    fn content(&mut self, c: &ContentDecl) {
        self.open(&format!("content {} : {}", c.id, c.level));
        self.line(&format!("body {}", text(&c.body)));
        self.close();
    }

    fn eval(&mut self, e: &EvalDecl) {
        self.open(&format!("eval {} : {}", e.id, e.kind));
        for g in &e.goals {
            self.line(&format!("goal {g}"));
        }
        self.line(&format!("prompt {}", text(&e.prompt)));
        for c in &e.choices {
            self.line(&format!("choice {}", text(c)));
        }
        self.line(&format!("answer {}", text(&e.answer)));
        self.close();
    }

    fn title(&mut self, t: &Option<TextSource>) {
        if let Some(t) = t {
            self.line(&format!("title {}", text(t)));
        }
    }

    fn play(&mut self, p: &PlayDecl) {
        self.open("play");
        self.title(&p.title);
        p.acts.iter().for_each(|a| self.act(a));
        self.close();
    }

    fn act(&mut self, a: &ActDecl) {
        self.open("act");
        self.title(&a.title);
        for g in &a.goals {
            self.line(&format!("goal {g}"));
        }
        a.scenes.iter().for_each(|s| self.scene(s));
        self.close();
    }

    fn scene(&mut self, s: &SceneDecl) {
        self.open("scene");
        self.title(&s.title);
        for c in &s.content {
            self.line(&format!("content {c}"));
        }
        s.instructions.iter().for_each(|i| self.instruction(i));
        self.close();
    }

    fn instruction(&mut self, i: &InstructionDecl) {
        let head = format!("instruction {}", text(&i.text));
        if i.content.is_empty() && i.principles.is_empty() && i.phase.is_none() && i.goals.is_empty() {
            self.line(&format!("{head} {{}}"));
            return;
        }
        self.open(&head);
        for p in &i.principles {
            self.line(&format!("principle {p}"));
        }
        if let Some(ph) = i.phase {
            self.line(&format!("phase {ph}"));
        }
        for g in &i.goals {
            self.line(&format!("goal {g}"));
        }
        for c in &i.content {
            self.line(&format!("content {c}"));
        }
        self.close();
    }

    fn composition(&mut self, c: &Composition) {
        let version = if c.version == Version::default() { String::new() } else { format!(" version {}", c.version) };
        self.open(&format!("compose {}{version}", c.id));
        self.node(&c.root);
        self.close();
    }

    fn node(&mut self, n: &CompositionNode) {
        match n {
            CompositionNode::Leaf { pattern, binding, .. } => {
                if binding.is_empty() {
                    self.line(&format!("ref {pattern};"));
                } else {
                    self.open(&format!("ref {pattern}"));
                    self.binding(binding);
                    self.close();
                }
            }
            CompositionNode::Seq(c) => self.group("seq", c),
            CompositionNode::Par(c) => self.group("par", c),
            CompositionNode::Alt(c) => self.group("alt", c),
            CompositionNode::Opt(child) => {
                self.open("opt");
                self.node(child);
                self.close();
            }
            CompositionNode::Rep { child, min, max } => {
                self.open(&format!("rep {min}..{max}"));
                self.node(child);
                self.close();
            }
        }
    }

    fn group(&mut self, op: &str, children: &[CompositionNode]) {
        if children.is_empty() {
            self.line(&format!("{op} {{}}"));
            return;
        }
        self.open(op);
        children.iter().for_each(|c| self.node(c));
        self.close();
    }

    fn binding(&mut self, b: &Binding) {
        for w in &b.wires {
            self.line(&format!("wire {w};"));
        }
        for (k, v) in &b.params {
            let v = match v {
                Scalar::Str(s) => escape(s),
                other => other.to_string(),
            };
            self.line(&format!("param {k} = {v};"));
        }
        if let Some(l) = &b.locale {
            self.line(&format!("locale {l};"));
        }
    }

    fn set(&mut self, s: &SetDecl) {
        self.open(&format!("{} {}", s.kind.keyword(), s.id));
        self.items(&s.items);
        self.close();
    }

    fn bundle(&mut self, b: &BundleDecl) {
        self.open(&format!("bundle {}", b.locale));
        for (k, v) in &b.entries {
            let mut line = String::new();
            let _ = write!(line, "@{k} = {}", escape(v));
            self.line(&line);
        }
        self.close();
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::dsl::parse_file;

    fn round_trip(text: &str) -> String {
        let (ast, diags) = parse_file(text, Path::new("t.poid"));
        assert!(diags.is_empty(), "{diags:?}");
        let printed = print_canonical(&ast).unwrap();
        let (again, diags) = parse_file(&printed, Path::new("t.poid"));
        assert!(diags.is_empty(), "{printed}\n{diags:?}");
        assert_eq!(again, ast);
        assert_eq!(print_canonical(&again).unwrap(), printed);
        printed
    }

    #[test]
    fn canonical_layout() {
        let printed = round_trip(
            "//x\npattern a : Goals { meta \"z\" \"1\" meta \"a\" \"2\" problem \"p\" name \"A\" }\ncompose c { ref a; ref b { wire g <- a.goals; param n = 3; } }",
        );
        let expected = "\
// x
pattern a : Goals {
  name \"A\"
  version 1.0.0
  lifecycle Discovered
  problem \"p\"
  meta \"a\" \"2\"
  meta \"z\" \"1\"
}

compose c {
  seq {
    ref a;
    ref b {
      wire g <- a.goals;
      param n = 3;
    }
  }
}
";
        assert_eq!(printed, expected);
    }

    #[test]
    fn error_nodes_refused() {
        let (ast, _) = parse_file("pattern", Path::new("t.poid"));
        assert_eq!(print_canonical(&ast), Err(PrintError::HasErrorNodes));
    }

    #[test]
    fn single_child_seq_survives() {
        round_trip("compose c { seq { ref a; } }");
        round_trip("compose c { seq {} }");
        round_trip("compose c { opt { ref a; ref b; } }");
    }
}
