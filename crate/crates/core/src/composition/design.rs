//! The resolved instructional design: goals, a plays/acts/scenes/instructions
//! lesson tree, content and evaluations, with localized strings filled in.

use serde::{Deserialize, Serialize};

use crate::locale::LocaleTag;
use crate::pattern::{EvalKind, PatternCategory, PatternId, Port, Relationship, Version};
use crate::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension, MerrillPrinciple, SubCyclePhase};

use super::node::Wire;

/// A string after bundle lookup. `key` is set when the value came from a bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResolvedText {
    pub value: String,
    pub key: Option<String>,
}

impl ResolvedText {
    pub fn literal(value: impl Into<String>) -> Self {
        ResolvedText { value: value.into(), key: None }
    }

    pub fn is_localized(&self) -> bool {
        self.key.is_some()
    }

    fn erase(&mut self) {
        if self.key.is_some() {
            self.value.clear();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abcd {
    pub audience: ResolvedText,
    pub behavior: ResolvedText,
    pub condition: Option<ResolvedText>,
    pub degree: Option<ResolvedText>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub id: PatternId,
    pub statement: ResolvedText,
    pub bloom: BloomLevel,
    pub knowledge: KnowledgeDimension,
    pub abcd: Option<Abcd>,
    pub locale: LocaleTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentItem {
    pub id: PatternId,
    pub level: ContentLevel,
    pub body: ResolvedText,
    pub locale: LocaleTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalItem {
    pub id: PatternId,
    pub kind: EvalKind,
    pub goal_refs: Vec<PatternId>,
    pub prompt: ResolvedText,
    pub answer_key: ResolvedText,
    pub choices: Vec<ResolvedText>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lesson {
    pub plays: Vec<Play>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Play {
    pub title: Option<ResolvedText>,
    pub acts: Vec<Act>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Act {
    pub title: Option<ResolvedText>,
    pub goal_refs: Vec<PatternId>,
    pub scenes: Vec<Scene>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scene {
    pub title: Option<ResolvedText>,
    pub content_refs: Vec<PatternId>,
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub text: ResolvedText,
    pub content_refs: Vec<PatternId>,
    pub principles: Vec<MerrillPrinciple>,
    pub sub_cycle: Option<SubCyclePhase>,
    pub goal_refs: Vec<PatternId>,
}

/// A pattern that contributed to the design, with what validation needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternUse {
    pub id: PatternId,
    pub version: Version,
    pub category: PatternCategory,
    pub related: Vec<Relationship>,
    pub ports: Vec<Port>,
}

/// The wires of one leaf occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundLeaf {
    pub pattern: PatternId,
    pub wires: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionalDesign {
    pub id: String,
    pub version: Version,
    pub locale: LocaleTag,
    pub goals: Vec<Goal>,
    pub lesson: Lesson,
    pub content: Vec<ContentItem>,
    pub evaluations: Vec<EvalItem>,
    /// Distinct patterns in first-use order.
    pub patterns: Vec<PatternUse>,
    pub bindings: Vec<BoundLeaf>,
}

impl Lesson {
    pub fn instructions(&self) -> impl Iterator<Item = &Instruction> {
        self.scenes().flat_map(|s| s.instructions.iter())
    }

    pub fn acts(&self) -> impl Iterator<Item = &Act> {
        self.plays.iter().flat_map(|p| p.acts.iter())
    }

    pub fn scenes(&self) -> impl Iterator<Item = &Scene> {
        self.acts().flat_map(|a| a.scenes.iter())
    }

    /// Content references in model order: each scene's own refs, then its instructions'.
    pub fn content_refs(&self) -> impl Iterator<Item = &PatternId> {
        self.scenes()
            .flat_map(|s| s.content_refs.iter().chain(s.instructions.iter().flat_map(|i| i.content_refs.iter())))
    }
}

impl InstructionalDesign {
    pub fn content_item(&self, id: &PatternId) -> Option<&ContentItem> {
        self.content.iter().find(|c| &c.id == id)
    }

    pub fn pattern(&self, id: &PatternId) -> Option<&PatternUse> {
        self.patterns.iter().find(|p| &p.id == id)
    }

    /// Copy with every bundle-supplied string and every locale tag blanked.
    /// Two instantiations of one variant agree on this view.
    pub fn erase_localized(&self) -> InstructionalDesign {
        let mut d = self.clone();
        let blank = LocaleTag::new("und").expect("valid tag");
        d.locale = blank.clone();
        for g in &mut d.goals {
            g.statement.erase();
            g.locale = blank.clone();
            if let Some(a) = &mut g.abcd {
                a.audience.erase();
                a.behavior.erase();
                a.condition.iter_mut().for_each(ResolvedText::erase);
                a.degree.iter_mut().for_each(ResolvedText::erase);
            }
        }
        for c in &mut d.content {
            c.body.erase();
            c.locale = blank.clone();
        }
        for e in &mut d.evaluations {
            e.prompt.erase();
            e.answer_key.erase();
            e.choices.iter_mut().for_each(ResolvedText::erase);
        }
        for p in &mut d.lesson.plays {
            p.title.iter_mut().for_each(ResolvedText::erase);
            for a in &mut p.acts {
                a.title.iter_mut().for_each(ResolvedText::erase);
                for s in &mut a.scenes {
                    s.title.iter_mut().for_each(ResolvedText::erase);
                    s.instructions.iter_mut().for_each(|i| i.text.erase());
                }
            }
        }
        d
    }
}
