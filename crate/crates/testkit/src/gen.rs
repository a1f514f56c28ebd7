//! Random generators for syntax trees and composition trees.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use poid_core::composition::{Binding, Composition, CompositionNode, Scalar, Wire, MAX_REPEAT};
use poid_core::dsl::{Ast, BundleDecl, Decl, DeclKind, SetDecl, SetKind, SourceSpan};
use poid_core::locale::LocaleTag;
use poid_core::pattern::*;
use poid_core::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension, MerrillPrinciple, SubCyclePhase};

const WORDS: &[&str] = &[
    "goal", "read", "write", "syllable", "word", "act", "scene", "play", "bloom", "fact", "rule", "model", "quiz",
    "pasi", "ipcl", "lesson", "learner",
];

const CHARS: &[char] = &[
    'a', 'b', 'z', 'A', 'Z', '0', '9', ' ', ' ', '-', '.', ',', ':', ';', '{', '}', '[', ']', '@', '/', '*', '"', '\\',
    '\n', '\t', 'é', 'क', 'म', 'ల', 'ક', '→', '😀',
];

fn pick<'a, T, R: Rng>(rng: &mut R, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty")
}

fn some<R: Rng, T>(rng: &mut R, p: f64, f: impl FnOnce(&mut R) -> T) -> Option<T> {
    if rng.gen_bool(p) {
        Some(f(rng))
    } else {
        None
    }
}

fn list<R: Rng, T>(rng: &mut R, max: usize, mut f: impl FnMut(&mut R) -> T) -> Vec<T> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| f(rng)).collect()
}

/// A string of arbitrary characters, including quotes, backslashes and newlines.
pub fn any_string<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(0..12);
    (0..n).map(|_| *pick(rng, CHARS)).collect()
}

pub fn non_empty_string<R: Rng>(rng: &mut R) -> String {
    let mut s = any_string(rng);
    if s.is_empty() {
        s.push_str(pick(rng, WORDS));
    }
    s
}

pub fn pattern_id<R: Rng>(rng: &mut R) -> PatternId {
    let id = match rng.gen_range(0..3) {
        0 => pick(rng, WORDS).to_string(),
        1 => format!("{}-{}", pick(rng, WORDS), pick(rng, WORDS)),
        _ => format!("{}-{}", pick(rng, WORDS), rng.gen_range(0..100)),
    };
    PatternId::new(id).expect("generated ids are well formed")
}

/// An identifier that is never a keyword.
pub fn name<R: Rng>(rng: &mut R) -> String {
    format!("{}{}", pick(rng, &["p", "in", "out", "x", "N"]), rng.gen_range(0..50))
}

pub fn key<R: Rng>(rng: &mut R) -> String {
    let segs = rng.gen_range(1..4);
    (0..segs)
        .map(|_| {
            format!(
                "{}{}",
                pick(rng, WORDS),
                if rng.gen_bool(0.5) { rng.gen_range(0..9).to_string() } else { String::new() }
            )
        })
        .collect::<Vec<_>>()
        .join(".")
}

pub fn locale<R: Rng>(rng: &mut R) -> LocaleTag {
    LocaleTag::new(*pick(rng, &["hi", "te", "gu", "en", "en-IN", "mr", "tam", "kn-x1"])).expect("valid tag")
}

fn text<R: Rng>(rng: &mut R) -> TextSource {
    if rng.gen_bool(0.5) {
        TextSource::Literal(any_string(rng))
    } else {
        TextSource::Key(key(rng))
    }
}

fn version<R: Rng>(rng: &mut R) -> Version {
    Version::new(rng.gen_range(0..4), rng.gen_range(0..12), rng.gen_range(0..30))
}

fn ids<R: Rng>(rng: &mut R, max: usize) -> Vec<PatternId> {
    list(rng, max, pattern_id)
}

fn port<R: Rng>(rng: &mut R) -> Port {
    let min = rng.gen_range(0..4);
    let max = if rng.gen_bool(0.3) { None } else { Some(min + rng.gen_range(0..4)) };
    Port {
        name: name(rng),
        direction: *pick(rng, PortDirection::ALL),
        port_type: *pick(rng, PortType::ALL),
        multiplicity: Multiplicity { min, max },
    }
}

fn goal<R: Rng>(rng: &mut R) -> GoalDecl {
    GoalDecl {
        id: pattern_id(rng),
        statement: some(rng, 0.7, text),
        bloom: *pick(rng, BloomLevel::ALL),
        knowledge: *pick(rng, KnowledgeDimension::ALL),
        abcd: some(rng, 0.4, |rng| AbcdDecl {
            audience: text(rng),
            behavior: text(rng),
            condition: some(rng, 0.5, text),
            degree: some(rng, 0.5, text),
        }),
    }
}

fn instruction<R: Rng>(rng: &mut R) -> InstructionDecl {
    InstructionDecl {
        text: text(rng),
        content: ids(rng, 2),
        principles: list(rng, 2, |rng| *pick(rng, MerrillPrinciple::ALL)),
        phase: some(rng, 0.5, |rng| *pick(rng, SubCyclePhase::ALL)),
        goals: ids(rng, 2),
    }
}

fn act<R: Rng>(rng: &mut R) -> ActDecl {
    ActDecl {
        title: some(rng, 0.5, text),
        goals: ids(rng, 2),
        scenes: list(rng, 2, |rng| SceneDecl {
            title: some(rng, 0.5, text),
            content: ids(rng, 2),
            instructions: list(rng, 3, instruction),
        }),
    }
}

fn item<R: Rng>(rng: &mut R) -> SolutionItem {
    let which = rng.gen_range(0..6);
    item_of(rng, which)
}

fn item_of<R: Rng>(rng: &mut R, which: u32) -> SolutionItem {
    match which {
        0 => SolutionItem::Goal(goal(rng)),
        1 => SolutionItem::Content(ContentDecl {
            id: pattern_id(rng),
            level: *pick(rng, ContentLevel::ALL),
            body: text(rng),
        }),
        2 => SolutionItem::Eval(EvalDecl {
            id: pattern_id(rng),
            kind: *pick(rng, EvalKind::ALL),
            goals: ids(rng, 2),
            prompt: text(rng),
            answer: text(rng),
            choices: list(rng, 3, text),
        }),
        3 => SolutionItem::Play(PlayDecl { title: some(rng, 0.5, text), acts: list(rng, 2, act) }),
        4 => SolutionItem::Act(act(rng)),
        _ => SolutionItem::Include(pattern_id(rng)),
    }
}

pub fn pattern<R: Rng>(rng: &mut R) -> Pattern {
    let mut p = Pattern::with_id(pattern_id(rng), *pick(rng, PatternCategory::ALL), any_string(rng));
    p.version = version(rng);
    p.lifecycle = *pick(rng, LifecycleState::ALL);
    p.aliases = list(rng, 2, any_string);
    p.keywords = list(rng, 2, any_string);
    p.intent = any_string(rng);
    p.problem = any_string(rng);
    p.context = any_string(rng);
    p.forces = list(rng, 2, any_string);
    p.consequences = list(rng, 2, any_string);
    p.ports = list(rng, 3, port);
    p.related = list(rng, 2, |rng| Relationship { kind: *pick(rng, RelationshipKind::ALL), target: pattern_id(rng) });
    p.metadata = list(rng, 2, |rng| (any_string(rng), any_string(rng))).into_iter().collect();
    p.provenance = Provenance {
        author: any_string(rng),
        date: if rng.gen_bool(0.5) {
            format!("2024-0{}-1{}", rng.gen_range(1..10), rng.gen_range(0..10))
        } else {
            String::new()
        },
        sources: list(rng, 2, any_string),
    };
    p.solution = SolutionBody { text: some(rng, 0.5, text), items: list(rng, 4, item) };
    p
}

fn binding<R: Rng>(rng: &mut R) -> Binding {
    if rng.gen_bool(0.5) {
        return Binding::default();
    }
    Binding {
        wires: list(rng, 2, |rng| Wire {
            required_port: name(rng),
            provider: pattern_id(rng),
            provided_port: name(rng),
        }),
        params: list(rng, 2, |rng| {
            let v = match rng.gen_range(0..3) {
                0 => Scalar::Str(any_string(rng)),
                1 => Scalar::Int(rng.gen_range(-1_000_000_000_000i64..1_000_000_000_000)),
                _ => Scalar::Bool(rng.gen()),
            };
            (name(rng), v)
        })
        .into_iter()
        .collect(),
        locale: some(rng, 0.3, locale),
    }
}

/// A composition tree that satisfies the node invariants, with at most
/// `budget` nodes (at least one). Unused budget is left in `budget`.
pub fn node<R: Rng>(
    rng: &mut R,
    budget: &mut usize,
    leaf: &mut dyn FnMut(&mut R) -> CompositionNode,
) -> CompositionNode {
    *budget = budget.saturating_sub(1);
    let choice = if *budget == 0 { 0 } else { rng.gen_range(0..6) };
    // `min` children are guaranteed: each is given its share before any extras
    let children = |rng: &mut R, budget: &mut usize, leaf: &mut dyn FnMut(&mut R) -> CompositionNode, min: usize| {
        let want = rng.gen_range(min..=min + 2);
        let mut out = Vec::new();
        while out.len() < want && *budget > 0 {
            let reserved = min.saturating_sub(out.len() + 1);
            let mut share = *budget - reserved;
            let before = share;
            out.push(node(rng, &mut share, leaf));
            *budget -= before - share;
        }
        out
    };
    match choice {
        0 => leaf(rng),
        1 => CompositionNode::Seq(children(rng, budget, leaf, 0)),
        2 => CompositionNode::Par(children(rng, budget, leaf, 0)),
        3 if *budget >= 2 => CompositionNode::Alt(children(rng, budget, leaf, 2)),
        4 => CompositionNode::opt(node(rng, budget, leaf)),
        5 => {
            let min = rng.gen_range(0..3);
            let max = rng.gen_range(min..=3.min(MAX_REPEAT));
            CompositionNode::rep(node(rng, budget, leaf), min, max)
        }
        _ => leaf(rng),
    }
}

pub fn composition<R: Rng>(rng: &mut R) -> Composition {
    let mut budget = rng.gen_range(1..14);
    let mut leaf = |rng: &mut R| CompositionNode::Leaf {
        pattern: pattern_id(rng),
        binding: binding(rng),
        span: SourceSpan::default(),
    };
    Composition {
        id: pattern_id(rng),
        version: if rng.gen_bool(0.7) { Version::default() } else { version(rng) },
        root: node(rng, &mut budget, &mut leaf),
        span: SourceSpan::default(),
    }
}

fn comment<R: Rng>(rng: &mut R) -> String {
    list(rng, 3, |rng| pick(rng, WORDS).to_string()).join(" ")
}

/// A random syntax tree that is valid for the printer and parser.
pub fn ast<R: Rng>(rng: &mut R, path: &Path) -> Ast {
    let mut ast = Ast::new(path);
    let n = rng.gen_range(0..6);
    for _ in 0..n {
        let kind = match rng.gen_range(0..6) {
            0 | 1 => DeclKind::Pattern(Box::new(pattern(rng))),
            2 | 3 => DeclKind::Composition(composition(rng)),
            4 => {
                let (kind, which) =
                    *pick(rng, &[(SetKind::Goals, 0), (SetKind::Content, 1), (SetKind::Evaluations, 2)]);
                DeclKind::Set(SetDecl {
                    kind,
                    id: pattern_id(rng),
                    items: list(rng, 3, |rng| item_of(rng, which)),
                    span: SourceSpan::default(),
                })
            }
            _ => DeclKind::Bundle(BundleDecl {
                locale: locale(rng),
                entries: list(rng, 4, |rng| (key(rng), any_string(rng))).into_iter().collect::<BTreeMap<_, _>>(),
                span: SourceSpan::default(),
            }),
        };
        ast.decls.push(Decl { comments: list(rng, 2, comment), kind });
    }
    ast.trailing_comments = list(rng, 2, comment);
    ast
}
