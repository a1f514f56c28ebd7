//! The pattern data model: identity, category, ports, relationships,
//! lifecycle state and the category-typed solution payload.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::SourceSpan;
use crate::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension, MerrillPrinciple, SubCyclePhase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("malformed id `{0}`: expected kebab-case [a-z0-9-], 1-64 chars, starting with a letter")]
    MalformedId(String),
    #[error("illegal lifecycle transition {from} -> {to}")]
    IllegalTransition { from: LifecycleState, to: LifecycleState },
}

/// Identifier shared by patterns, compositions and solution items.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PatternId(String);

impl PatternId {
    pub const MAX_LEN: usize = 64;

    pub fn new(value: impl Into<String>) -> Result<Self, PatternError> {
        let value = value.into();
        if Self::is_well_formed(&value) {
            Ok(Self(value))
        } else {
            Err(PatternError::MalformedId(value))
        }
    }

    pub fn is_well_formed(value: &str) -> bool {
        let bytes = value.as_bytes();
        !bytes.is_empty()
            && bytes.len() <= Self::MAX_LEN
            && bytes[0].is_ascii_lowercase()
            && bytes.iter().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'-')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PatternId {
    type Err = PatternError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl TryFrom<String> for PatternId {
    type Error = PatternError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PatternId> for String {
    fn from(id: PatternId) -> Self {
        id.0
    }
}

/// Declares a closed keyword enum with `as_str`, `ALL`, `Display` and `FromStr`.
macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => stringify!($variant)),+ }
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $(stringify!($variant) => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown {} `{}` (expected one of: {})",
                        stringify!($name),
                        other,
                        [$(stringify!($variant)),+].join(", ")
                    )),
                }
            }
        }
    };
}
pub(crate) use keyword_enum;

keyword_enum!(
    /// The six instructional-design aspects a pattern can address.
    PatternCategory { Context, Goals, Process, Content, Evaluation, Environment }
);

keyword_enum!(
    /// Maturity of a pattern. Declaration order is the forward lifecycle order.
    LifecycleState { Discovered, Specified, Validated, Applied, Maintained }
);

impl LifecycleState {
    /// The allowed edge set. `Maintained -> Specified` is the revision loop.
    pub fn can_transition_to(self, target: LifecycleState) -> bool {
        use LifecycleState::*;
        matches!(
            (self, target),
            (Discovered, Specified)
                | (Specified, Validated)
                | (Validated, Applied)
                | (Applied, Maintained)
                | (Maintained, Specified)
        )
    }

    /// States a pattern must be in before a composition may reference it.
    pub fn is_applicable(self) -> bool {
        matches!(self, LifecycleState::Validated | LifecycleState::Applied | LifecycleState::Maintained)
    }
}

keyword_enum!(PortDirection { Provided, Required });

keyword_enum!(
    /// Port types mirror the six categories; wiring compatibility is equality.
    PortType { GoalSet, ProcessFlow, ContentSet, EvaluationSet, ContextProfile, EnvironmentProfile }
);

impl PortType {
    pub fn for_category(category: PatternCategory) -> PortType {
        match category {
            PatternCategory::Context => PortType::ContextProfile,
            PatternCategory::Goals => PortType::GoalSet,
            PatternCategory::Process => PortType::ProcessFlow,
            PatternCategory::Content => PortType::ContentSet,
            PatternCategory::Evaluation => PortType::EvaluationSet,
            PatternCategory::Environment => PortType::EnvironmentProfile,
        }
    }
}

keyword_enum!(RelationshipKind { Uses, Refines, Requires, ConflictsWith, AlternativeTo });

impl RelationshipKind {
    /// Lower-case DSL spelling (`uses`, `conflicts-with`, ...).
    pub fn keyword(self) -> &'static str {
        match self {
            RelationshipKind::Uses => "uses",
            RelationshipKind::Refines => "refines",
            RelationshipKind::Requires => "requires",
            RelationshipKind::ConflictsWith => "conflicts-with",
            RelationshipKind::AlternativeTo => "alternative-to",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.keyword() == s)
    }

    /// Edges that must stay acyclic across a repository.
    pub fn is_structural(self) -> bool {
        matches!(self, RelationshipKind::Uses | RelationshipKind::Refines)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multiplicity {
    pub min: u32,
    /// `None` is unbounded.
    pub max: Option<u32>,
}

impl Multiplicity {
    pub const EXACTLY_ONE: Multiplicity = Multiplicity { min: 1, max: Some(1) };

    pub fn is_consistent(&self) -> bool {
        self.max.is_none_or(|max| self.min <= max)
    }

    pub fn admits(&self, count: u32) -> bool {
        count >= self.min && self.max.is_none_or(|max| count <= max)
    }
}

impl Default for Multiplicity {
    fn default() -> Self {
        Self::EXACTLY_ONE
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(max) => write!(f, "[{}..{}]", self.min, max),
            None => write!(f, "[{}..*]", self.min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub direction: PortDirection,
    pub port_type: PortType,
    pub multiplicity: Multiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relationship {
    pub kind: RelationshipKind,
    pub target: PatternId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Version {
    pub major: u32,
    pub minor: u32,
    pub patch: u32,
}

impl Version {
    pub const fn new(major: u32, minor: u32, patch: u32) -> Self {
        Self { major, minor, patch }
    }

    pub fn bump_minor(self) -> Self {
        Self { major: self.major, minor: self.minor + 1, patch: 0 }
    }
}

impl Default for Version {
    fn default() -> Self {
        Version::new(1, 0, 0)
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub author: String,
    /// ISO-8601 calendar date.
    pub date: String,
    pub sources: Vec<String>,
}

impl Provenance {
    pub fn is_empty(&self) -> bool {
        self.author.is_empty() && self.date.is_empty() && self.sources.is_empty()
    }
}

/// A string in a solution body: either inline or a key into a locale bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TextSource {
    Literal(String),
    Key(String),
}

impl TextSource {
    pub fn literal(s: impl Into<String>) -> Self {
        TextSource::Literal(s.into())
    }

    pub fn key(s: impl Into<String>) -> Self {
        TextSource::Key(s.into())
    }

    pub fn is_blank(&self) -> bool {
        match self {
            TextSource::Literal(s) => s.trim().is_empty(),
            TextSource::Key(k) => k.is_empty(),
        }
    }
}

/// Audience / behavior / condition / degree, each possibly localized.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbcdDecl {
    pub audience: TextSource,
    pub behavior: TextSource,
    pub condition: Option<TextSource>,
    pub degree: Option<TextSource>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoalDecl {
    pub id: PatternId,
    pub statement: Option<TextSource>,
    pub bloom: BloomLevel,
    pub knowledge: KnowledgeDimension,
    pub abcd: Option<AbcdDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContentDecl {
    pub id: PatternId,
    pub level: ContentLevel,
    pub body: TextSource,
}

keyword_enum!(EvalKind { MultipleChoice, FillBlank });

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalDecl {
    pub id: PatternId,
    pub kind: EvalKind,
    pub goals: Vec<PatternId>,
    pub prompt: TextSource,
    pub answer: TextSource,
    pub choices: Vec<TextSource>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayDecl {
    pub title: Option<TextSource>,
    pub acts: Vec<ActDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActDecl {
    pub title: Option<TextSource>,
    pub goals: Vec<PatternId>,
    pub scenes: Vec<SceneDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SceneDecl {
    pub title: Option<TextSource>,
    pub content: Vec<PatternId>,
    pub instructions: Vec<InstructionDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstructionDecl {
    pub text: TextSource,
    pub content: Vec<PatternId>,
    pub principles: Vec<MerrillPrinciple>,
    pub phase: Option<SubCyclePhase>,
    pub goals: Vec<PatternId>,
}

/// One entry of a solution block, kept in source order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionItem {
    Goal(GoalDecl),
    Content(ContentDecl),
    Eval(EvalDecl),
    Play(PlayDecl),
    /// An act outside any play joins the play currently open during instantiation.
    Act(ActDecl),
    /// Splices a top-level goal/content/evaluation set.
    Include(PatternId),
}

impl SolutionItem {
    /// The category whose payload this item belongs to, if it is category-specific.
    pub fn payload_category(&self) -> Option<PatternCategory> {
        match self {
            SolutionItem::Goal(_) => Some(PatternCategory::Goals),
            SolutionItem::Content(_) => Some(PatternCategory::Content),
            SolutionItem::Eval(_) => Some(PatternCategory::Evaluation),
            SolutionItem::Play(_) | SolutionItem::Act(_) => Some(PatternCategory::Process),
            SolutionItem::Include(_) => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionBody {
    pub text: Option<TextSource>,
    pub items: Vec<SolutionItem>,
}

impl SolutionBody {
    pub fn is_empty(&self) -> bool {
        self.text.as_ref().is_none_or(TextSource::is_blank) && self.items.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub id: PatternId,
    pub name: String,
    pub aliases: Vec<String>,
    pub keywords: Vec<String>,
    pub category: PatternCategory,
    pub intent: String,
    pub problem: String,
    pub context: String,
    pub forces: Vec<String>,
    pub solution: SolutionBody,
    pub consequences: Vec<String>,
    pub related: Vec<Relationship>,
    pub ports: Vec<Port>,
    pub lifecycle: LifecycleState,
    pub version: Version,
    pub provenance: Provenance,
    pub metadata: BTreeMap<String, String>,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl Pattern {
    /// A fresh pattern in state `Discovered` with every optional field empty.
    pub fn new(id: &str, category: PatternCategory, name: impl Into<String>) -> Result<Self, PatternError> {
        Ok(Self::with_id(PatternId::new(id)?, category, name))
    }

    pub fn with_id(id: PatternId, category: PatternCategory, name: impl Into<String>) -> Self {
        Pattern {
            id,
            name: name.into(),
            aliases: Vec::new(),
            keywords: Vec::new(),
            category,
            intent: String::new(),
            problem: String::new(),
            context: String::new(),
            forces: Vec::new(),
            solution: SolutionBody::default(),
            consequences: Vec::new(),
            related: Vec::new(),
            ports: Vec::new(),
            lifecycle: LifecycleState::Discovered,
            version: Version::default(),
            provenance: Provenance::default(),
            metadata: BTreeMap::new(),
            span: SourceSpan::default(),
        }
    }

    /// Moves the pattern along one lifecycle edge. The revision edge
    /// `Maintained -> Specified` bumps the minor version.
    pub fn promote(&self, target: LifecycleState) -> Result<Pattern, PatternError> {
        if !self.lifecycle.can_transition_to(target) {
            return Err(PatternError::IllegalTransition { from: self.lifecycle, to: target });
        }
        let mut next = self.clone();
        if self.lifecycle == LifecycleState::Maintained && target == LifecycleState::Specified {
            next.version = self.version.bump_minor();
        }
        next.lifecycle = target;
        Ok(next)
    }

    pub fn ports(&self, direction: PortDirection) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(move |p| p.direction == direction)
    }

    pub fn port(&self, direction: PortDirection, name: &str) -> Option<&Port> {
        self.ports(direction).find(|p| p.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_pattern_starts_discovered() {
        let p = Pattern::new("bloom-goals", PatternCategory::Goals, "Bloom Goal Set").unwrap();
        assert_eq!(p.lifecycle, LifecycleState::Discovered);
        assert!(p.solution.is_empty());
        let p = Pattern::new("pasi-lesson", PatternCategory::Process, "PASI Lesson").unwrap();
        assert_eq!(p.category, PatternCategory::Process);
    }

    #[test]
    fn malformed_ids() {
        assert_eq!(
            Pattern::new("Bad_Id", PatternCategory::Goals, "x").unwrap_err(),
            PatternError::MalformedId("Bad_Id".into())
        );
        for bad in ["", "1abc", "-a", "a_b", "aB", &"a".repeat(65)] {
            assert!(PatternId::new(bad).is_err(), "{bad:?}");
        }
        for good in ["a", "a-1", "act4", &"a".repeat(64)] {
            assert!(PatternId::new(good).is_ok(), "{good:?}");
        }
    }

    #[test]
    fn promote_follows_edges() {
        use LifecycleState::*;
        let p = Pattern::new("x", PatternCategory::Goals, "x").unwrap();
        assert_eq!(p.promote(Specified).unwrap().lifecycle, Specified);
        assert_eq!(p.promote(Applied).unwrap_err(), PatternError::IllegalTransition { from: Discovered, to: Applied });
    }

    #[test]
    fn revision_edge_bumps_minor() {
        use LifecycleState::*;
        let mut p = Pattern::new("x", PatternCategory::Goals, "x").unwrap();
        for s in [Specified, Validated, Applied, Maintained] {
            p = p.promote(s).unwrap();
        }
        assert_eq!(p.version, Version::new(1, 0, 0));
        let p = p.promote(Specified).unwrap();
        assert_eq!(p.version, Version::new(1, 1, 0));
        assert_eq!(p.lifecycle, Specified);
    }

    #[test]
    fn every_state_reachable_from_discovered() {
        let mut seen = vec![LifecycleState::Discovered];
        let mut frontier = vec![LifecycleState::Discovered];
        while let Some(s) = frontier.pop() {
            for &t in LifecycleState::ALL {
                if s.can_transition_to(t) && !seen.contains(&t) {
                    seen.push(t);
                    frontier.push(t);
                }
            }
        }
        seen.sort();
        assert_eq!(seen, LifecycleState::ALL);
    }

    #[test]
    fn promote_result_matches_target_or_errors() {
        let mut p = Pattern::new("x", PatternCategory::Goals, "x").unwrap();
        for &from in LifecycleState::ALL {
            p.lifecycle = from;
            for &to in LifecycleState::ALL {
                match p.promote(to) {
                    Ok(q) => {
                        assert_eq!(q.lifecycle, to);
                        assert!(q.version >= p.version);
                    }
                    Err(PatternError::IllegalTransition { from: f, to: t }) => {
                        assert_eq!((f, t), (from, to));
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn keyword_enum_parses() {
        assert_eq!("Goals".parse::<PatternCategory>().unwrap(), PatternCategory::Goals);
        assert!("goals".parse::<PatternCategory>().is_err());
        assert_eq!(RelationshipKind::from_keyword("conflicts-with"), Some(RelationshipKind::ConflictsWith));
    }
}
