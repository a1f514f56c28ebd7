//! The `course.package.json` document.
//!
//! Canonical bytes are the compact JSON serialization with object keys sorted,
//! arrays in model order, absent optional fields omitted, followed by one LF.
//! `manifest.contentHash` is the lowercase hex SHA-256 of the canonical
//! serialization (without the trailing LF) of the package with that one field
//! removed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::composition::{self as c, InstructionalDesign, ResolvedText};
use crate::pattern::EvalKind;
use crate::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension, MappingTable, MerrillPrinciple, SubCyclePhase};

use super::CodegenError;

pub const FORMAT_VERSION: &str = "1.0";
pub const PACKAGE_FILE: &str = "course.package.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CoursePackage {
    pub manifest: Manifest,
    pub goals: Vec<Goal>,
    pub lesson: Lesson,
    pub content: Vec<ContentItem>,
    pub evaluations: Vec<EvalItem>,
    pub bloom_map: BTreeMap<ContentLevel, BloomCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Manifest {
    pub package_id: String,
    pub format_version: String,
    pub locale: String,
    pub created_from: CreatedFrom,
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreatedFrom {
    pub design: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Goal {
    pub id: String,
    pub statement: String,
    pub bloom: BloomLevel,
    pub knowledge: KnowledgeDimension,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abcd: Option<Abcd>,
    pub locale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Abcd {
    pub audience: String,
    pub behavior: String,
    pub condition: String,
    pub degree: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Lesson {
    pub plays: Vec<Play>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Play {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub acts: Vec<Act>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Act {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub goal_refs: Vec<String>,
    pub scenes: Vec<Scene>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scene {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub content_refs: Vec<String>,
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Instruction {
    pub text: String,
    pub content_refs: Vec<String>,
    pub principles: Vec<MerrillPrinciple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_cycle: Option<SubCyclePhase>,
    pub goal_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ContentItem {
    pub id: String,
    pub level: ContentLevel,
    pub body: String,
    pub locale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EvalItem {
    pub id: String,
    pub kind: EvalKind,
    pub goal_refs: Vec<String>,
    pub prompt: String,
    pub answer_key: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choices: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BloomCell {
    pub bloom: BloomLevel,
    pub knowledge: KnowledgeDimension,
}

impl CoursePackage {
    /// Lowers a design without the validation gate; the hash is filled in.
    pub fn from_design(d: &InstructionalDesign, table: &MappingTable) -> CoursePackage {
        let ids = |v: &[crate::pattern::PatternId]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>();
        let text = |t: &ResolvedText| t.value.clone();
        let opt = |t: &Option<ResolvedText>| t.as_ref().map(|t| t.value.clone());
        let mut pkg = CoursePackage {
            manifest: Manifest {
                package_id: d.id.clone(),
                format_version: FORMAT_VERSION.to_string(),
                locale: d.locale.to_string(),
                created_from: CreatedFrom { design: d.id.clone(), version: d.version.to_string() },
                content_hash: String::new(),
            },
            goals: d
                .goals
                .iter()
                .map(|g| Goal {
                    id: g.id.to_string(),
                    statement: text(&g.statement),
                    bloom: g.bloom,
                    knowledge: g.knowledge,
                    abcd: g.abcd.as_ref().map(|a| Abcd {
                        audience: text(&a.audience),
                        behavior: text(&a.behavior),
                        condition: opt(&a.condition).unwrap_or_default(),
                        degree: opt(&a.degree).unwrap_or_default(),
                    }),
                    locale: g.locale.to_string(),
                })
                .collect(),
            lesson: Lesson {
                plays: d
                    .lesson
                    .plays
                    .iter()
                    .map(|p| Play {
                        title: opt(&p.title),
                        acts: p
                            .acts
                            .iter()
                            .map(|a| Act {
                                title: opt(&a.title),
                                goal_refs: ids(&a.goal_refs),
                                scenes: a
                                    .scenes
                                    .iter()
                                    .map(|s| Scene {
                                        title: opt(&s.title),
                                        content_refs: ids(&s.content_refs),
                                        instructions: s
                                            .instructions
                                            .iter()
                                            .map(|i| Instruction {
                                                text: text(&i.text),
                                                content_refs: ids(&i.content_refs),
                                                principles: i.principles.clone(),
                                                sub_cycle: i.sub_cycle,
                                                goal_refs: ids(&i.goal_refs),
                                            })
                                            .collect(),
                                    })
                                    .collect(),
                            })
                            .collect(),
                    })
                    .collect(),
            },
            content: d
                .content
                .iter()
                .map(|c: &c::ContentItem| ContentItem {
                    id: c.id.to_string(),
                    level: c.level,
                    body: text(&c.body),
                    locale: c.locale.to_string(),
                })
                .collect(),
            evaluations: d
                .evaluations
                .iter()
                .map(|e| EvalItem {
                    id: e.id.to_string(),
                    kind: e.kind,
                    goal_refs: ids(&e.goal_refs),
                    prompt: text(&e.prompt),
                    answer_key: text(&e.answer_key),
                    choices: e.choices.iter().map(text).collect(),
                })
                .collect(),
            bloom_map: table.iter().map(|(l, bloom, knowledge)| (l, BloomCell { bloom, knowledge })).collect(),
        };
        pkg.manifest.content_hash = pkg.compute_hash();
        pkg
    }

    /// Hash of the canonical body with `manifest.contentHash` removed.
    pub fn compute_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("package serializes");
        v["manifest"].as_object_mut().expect("manifest object").remove("contentHash");
        hash_hex(serde_json::to_string(&v).expect("value serializes").as_bytes())
    }

    /// Canonical bytes, LF-terminated.
    pub fn to_bytes(&self) -> Vec<u8> {
        let v = serde_json::to_value(self).expect("package serializes");
        let mut out = serde_json::to_vec(&v).expect("value serializes");
        out.push(b'\n');
        out
    }

    /// Parses and checks format version, hash and cross-references.
    pub fn from_bytes(bytes: &[u8]) -> Result<CoursePackage, CodegenError> {
        let pkg = Self::from_bytes_unchecked(bytes)?;
        if pkg.manifest.format_version != FORMAT_VERSION {
            return Err(CodegenError::UnsupportedVersion(pkg.manifest.format_version));
        }
        let expected = pkg.compute_hash();
        if pkg.manifest.content_hash != expected {
            return Err(CodegenError::HashMismatch { stored: pkg.manifest.content_hash, computed: expected });
        }
        if let Some(dangling) = pkg.dangling_refs().into_iter().next() {
            return Err(CodegenError::Malformed(format!("dangling reference `{dangling}`")));
        }
        Ok(pkg)
    }

    pub fn from_bytes_unchecked(bytes: &[u8]) -> Result<CoursePackage, CodegenError> {
        serde_json::from_slice(bytes).map_err(|e| CodegenError::Malformed(e.to_string()))
    }

    /// References that do not resolve to a goal or content item.
    pub fn dangling_refs(&self) -> BTreeSet<String> {
        let goals: BTreeSet<&str> = self.goals.iter().map(|g| g.id.as_str()).collect();
        let content: BTreeSet<&str> = self.content.iter().map(|c| c.id.as_str()).collect();
        let mut out = BTreeSet::new();
        let mut check = |set: &BTreeSet<&str>, refs: &[String]| {
            out.extend(refs.iter().filter(|r| !set.contains(r.as_str())).cloned());
        };
        for a in self.lesson.plays.iter().flat_map(|p| &p.acts) {
            check(&goals, &a.goal_refs);
            for s in &a.scenes {
                check(&content, &s.content_refs);
                for i in &s.instructions {
                    check(&content, &i.content_refs);
                    check(&goals, &i.goal_refs);
                }
            }
        }
        for e in &self.evaluations {
            check(&goals, &e.goal_refs);
        }
        out
    }

    pub fn instruction_count(&self) -> usize {
        self.lesson.plays.iter().flat_map(|p| &p.acts).flat_map(|a| &a.scenes).map(|s| s.instructions.len()).sum()
    }
}

pub fn hash_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Package paths whose values depend on the locale bundle: strings that came
/// from a key, and locale fields.
pub fn localized_paths(d: &InstructionalDesign) -> BTreeSet<String> {
    let mut out = BTreeSet::from(["manifest.locale".to_string()]);
    let mut add = |path: String, t: &ResolvedText| {
        if t.is_localized() {
            out.insert(path);
        }
    };
    for (i, g) in d.goals.iter().enumerate() {
        add(format!("goals[{i}].statement"), &g.statement);
        if let Some(a) = &g.abcd {
            add(format!("goals[{i}].abcd.audience"), &a.audience);
            add(format!("goals[{i}].abcd.behavior"), &a.behavior);
            if let Some(t) = &a.condition {
                add(format!("goals[{i}].abcd.condition"), t);
            }
            if let Some(t) = &a.degree {
                add(format!("goals[{i}].abcd.degree"), t);
            }
        }
    }
    for (i, c) in d.content.iter().enumerate() {
        add(format!("content[{i}].body"), &c.body);
    }
    for (i, e) in d.evaluations.iter().enumerate() {
        add(format!("evaluations[{i}].prompt"), &e.prompt);
        add(format!("evaluations[{i}].answerKey"), &e.answer_key);
        for (j, t) in e.choices.iter().enumerate() {
            add(format!("evaluations[{i}].choices[{j}]"), t);
        }
    }
    for (pi, p) in d.lesson.plays.iter().enumerate() {
        let pp = format!("lesson.plays[{pi}]");
        if let Some(t) = &p.title {
            add(format!("{pp}.title"), t);
        }
        for (ai, a) in p.acts.iter().enumerate() {
            let ap = format!("{pp}.acts[{ai}]");
            if let Some(t) = &a.title {
                add(format!("{ap}.title"), t);
            }
            for (si, s) in a.scenes.iter().enumerate() {
                let sp = format!("{ap}.scenes[{si}]");
                if let Some(t) = &s.title {
                    add(format!("{sp}.title"), t);
                }
                for (ii, ins) in s.instructions.iter().enumerate() {
                    add(format!("{sp}.instructions[{ii}].text"), &ins.text);
                }
            }
        }
    }
    let n = d.goals.len();
    let m = d.content.len();
    out.extend((0..n).map(|i| format!("goals[{i}].locale")));
    out.extend((0..m).map(|i| format!("content[{i}].locale")));
    out
}

/// Flattens a JSON value into `path -> leaf` pairs. Empty arrays and objects
/// are leaves.
pub fn flatten(v: &Value) -> BTreeMap<String, Value> {
    let mut out = BTreeMap::new();
    flatten_into(v, String::new(), &mut out);
    out
}

fn flatten_into(v: &Value, path: String, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten_into(child, p, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, child) in items.iter().enumerate() {
                flatten_into(child, format!("{path}[{i}]"), out);
            }
        }
        leaf => {
            out.insert(path, leaf.clone());
        }
    }
}
