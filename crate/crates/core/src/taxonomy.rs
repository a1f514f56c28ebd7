//! Pedagogical vocabularies: Bloom's cognitive levels and knowledge
//! dimensions, ABCD objectives, Merrill's principles and the content ladder.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::keyword_enum;

keyword_enum!(
    /// Cognitive-domain levels, ordered from simple to complex.
    BloomLevel { Remember, Understand, Apply, Analyze, Evaluate, Create }
);

keyword_enum!(KnowledgeDimension { Factual, Conceptual, Procedural, Metacognitive });

keyword_enum!(MerrillPrinciple { Activation, Demonstration, Application, Integration, TaskOrientation });

keyword_enum!(SubCyclePhase { Structure, Guidance, Coaching, Reflection });

keyword_enum!(
    /// The content ladder, from facts to theories.
    ContentLevel { Fact, Case, Rule, Model, Theory }
);

impl ContentLevel {
    fn index(self) -> usize {
        self as usize
    }
}

pub fn bloom_compare(a: BloomLevel, b: BloomLevel) -> Ordering {
    a.cmp(&b)
}

/// Total map from content level to a Bloom cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTable {
    cells: [(BloomLevel, KnowledgeDimension); 5],
}

impl MappingTable {
    pub fn new(cells: [(BloomLevel, KnowledgeDimension); 5]) -> Self {
        Self { cells }
    }

    pub fn constant(bloom: BloomLevel, knowledge: KnowledgeDimension) -> Self {
        Self { cells: [(bloom, knowledge); 5] }
    }

    pub fn get(&self, level: ContentLevel) -> (BloomLevel, KnowledgeDimension) {
        self.cells[level.index()]
    }

    pub fn set(&mut self, level: ContentLevel, bloom: BloomLevel, knowledge: KnowledgeDimension) {
        self.cells[level.index()] = (bloom, knowledge);
    }

    pub fn iter(&self) -> impl Iterator<Item = (ContentLevel, BloomLevel, KnowledgeDimension)> + '_ {
        ContentLevel::ALL.iter().map(|&l| {
            let (b, k) = self.get(l);
            (l, b, k)
        })
    }

    /// True when the Bloom component never decreases along the ladder.
    pub fn is_monotone(&self) -> bool {
        self.cells.windows(2).all(|w| w[0].0 <= w[1].0)
    }
}

impl Default for MappingTable {
    fn default() -> Self {
        use BloomLevel::*;
        use KnowledgeDimension::*;
        Self::new([
            (Remember, Factual),
            (Understand, Conceptual),
            (Apply, Procedural),
            (Analyze, Conceptual),
            (Create, Metacognitive),
        ])
    }
}

pub fn content_to_bloom(level: ContentLevel, table: &MappingTable) -> (BloomLevel, KnowledgeDimension) {
    table.get(level)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("invalid objective: audience and behavior must be non-empty")]
    InvalidObjective,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbcdObjective {
    pub audience: String,
    pub behavior: String,
    pub condition: String,
    pub degree: String,
}

impl AbcdObjective {
    pub fn new(
        audience: impl Into<String>,
        behavior: impl Into<String>,
        condition: impl Into<String>,
        degree: impl Into<String>,
    ) -> Self {
        Self {
            audience: audience.into(),
            behavior: behavior.into(),
            condition: condition.into(),
            degree: degree.into(),
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.audience.trim().is_empty() && !self.behavior.trim().is_empty()
    }
}

/// Renders `<audience> will be able to <behavior> <condition> <degree>`,
/// dropping empty parts and collapsing runs of whitespace.
pub fn render_abcd(o: &AbcdObjective) -> Result<String, TaxonomyError> {
    if !o.is_valid() {
        return Err(TaxonomyError::InvalidObjective);
    }
    let parts = [o.audience.as_str(), "will be able to", &o.behavior, &o.condition, &o.degree];
    Ok(parts.iter().flat_map(|p| p.split_whitespace()).collect::<Vec<_>>().join(" "))
}
