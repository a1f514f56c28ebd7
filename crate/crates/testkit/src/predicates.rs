//! Plain restatements of the design rules, used as oracles against the
//! validator. Each returns the `(rule, subject)` pairs that should fire.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use poid_core::composition::*;
use poid_core::locale::LocaleTag;
use poid_core::pattern::*;
use poid_core::taxonomy::{BloomLevel, ContentLevel, KnowledgeDimension, MerrillPrinciple};

pub type Expected = BTreeSet<(String, String)>;

fn hit(out: &mut Expected, rule: &str, subject: String) {
    out.insert((rule.to_string(), subject));
}

pub fn expected_findings(d: &InstructionalDesign) -> Expected {
    let mut out = Expected::new();
    for g in &d.goals {
        let taught = d.lesson.plays.iter().any(|p| {
            p.acts.iter().any(|a| {
                a.goal_refs.contains(&g.id)
                    || a.scenes.iter().any(|s| s.instructions.iter().any(|i| i.goal_refs.contains(&g.id)))
            })
        });
        if !taught {
            hit(&mut out, "V1", format!("goals[{}]", g.id));
        }
        if !d.evaluations.iter().any(|e| e.goal_refs.contains(&g.id)) {
            hit(&mut out, "V2", format!("goals[{}]", g.id));
        }
    }

    let used = |id: &PatternId| d.patterns.iter().any(|p| &p.id == id);
    for p in &d.patterns {
        if p.related.iter().any(|r| r.kind == RelationshipKind::ConflictsWith && used(&r.target)) {
            hit(&mut out, "V3", format!("patterns[{}]", p.id));
        }
        if reaches(d, &p.id, &p.id) {
            hit(&mut out, "V4", format!("patterns[{}]", p.id));
        }
    }

    // V5: a level's first appearance is flagged when some level that appeared
    // earlier sits higher on the ladder.
    let mut firsts: Vec<(ContentLevel, &PatternId)> = Vec::new();
    for s in d.lesson.plays.iter().flat_map(|p| &p.acts).flat_map(|a| &a.scenes) {
        let refs = s.content_refs.iter().chain(s.instructions.iter().flat_map(|i| &i.content_refs));
        for id in refs {
            let Some(c) = d.content.iter().find(|c| &c.id == id) else { continue };
            if firsts.iter().all(|(l, _)| *l != c.level) {
                if firsts.iter().any(|(l, _)| *l > c.level) {
                    hit(&mut out, "V5", format!("content[{id}]"));
                }
                firsts.push((c.level, id));
            }
        }
    }

    for (pi, play) in d.lesson.plays.iter().enumerate() {
        for (ai, act) in play.acts.iter().enumerate() {
            let flat: Vec<((usize, usize), &Instruction)> = act
                .scenes
                .iter()
                .enumerate()
                .flat_map(|(si, s)| s.instructions.iter().enumerate().map(move |(ii, i)| ((si, ii), i)))
                .collect();
            for (n, ((si, ii), ins)) in flat.iter().enumerate() {
                let prepared = flat[..n].iter().any(|(_, e)| {
                    e.principles.contains(&MerrillPrinciple::Activation)
                        || e.principles.contains(&MerrillPrinciple::Demonstration)
                });
                if ins.principles.contains(&MerrillPrinciple::Application) && !prepared {
                    hit(&mut out, "V6", format!("lesson.plays[{pi}].acts[{ai}].scenes[{si}].instructions[{ii}]"));
                }
            }
        }
    }

    for (i, leaf) in d.bindings.iter().enumerate() {
        let Some(p) = d.patterns.iter().find(|p| p.id == leaf.pattern) else { continue };
        for port in p.ports.iter().filter(|p| p.direction == PortDirection::Required) {
            let mut n = 0u32;
            for w in leaf.wires.iter().filter(|w| w.required_port == port.name) {
                let Some(provider) = d.patterns.iter().find(|p| p.id == w.provider) else { continue };
                if provider.ports.iter().any(|q| {
                    q.direction == PortDirection::Provided && q.name == w.provided_port && q.port_type == port.port_type
                }) {
                    n += 1;
                }
            }
            let too_many = port.multiplicity.max.is_some_and(|m| n > m);
            if n < port.multiplicity.min || too_many {
                hit(&mut out, "V7", format!("bindings[{i}].{}", port.name));
            }
        }
    }
    out
}

/// Depth-first search over uses/refines edges among used patterns, needing at
/// least one step.
fn reaches(d: &InstructionalDesign, from: &PatternId, to: &PatternId) -> bool {
    let mut stack = vec![from.clone()];
    let mut seen = BTreeSet::new();
    while let Some(at) = stack.pop() {
        let Some(p) = d.patterns.iter().find(|p| p.id == at) else { continue };
        for r in &p.related {
            if !matches!(r.kind, RelationshipKind::Uses | RelationshipKind::Refines) {
                continue;
            }
            if !d.patterns.iter().any(|q| q.id == r.target) {
                continue;
            }
            if &r.target == to {
                return true;
            }
            if seen.insert(r.target.clone()) {
                stack.push(r.target.clone());
            }
        }
    }
    false
}

fn id(prefix: &str, n: usize) -> PatternId {
    PatternId::new(format!("{prefix}-{n}")).expect("valid id")
}

fn subset<R: Rng>(rng: &mut R, ids: &[PatternId], p: f64) -> Vec<PatternId> {
    ids.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random design, usually with some rule violations.
pub fn random_design<R: Rng>(rng: &mut R) -> InstructionalDesign {
    let locale = LocaleTag::new("en").expect("valid tag");
    let goal_ids: Vec<_> = (0..rng.gen_range(0..5)).map(|n| id("g", n)).collect();
    let content_ids: Vec<_> = (0..rng.gen_range(0..6)).map(|n| id("c", n)).collect();
    let pattern_ids: Vec<_> = (0..rng.gen_range(1..5)).map(|n| id("p", n)).collect();
    let goals = goal_ids
        .iter()
        .map(|g| Goal {
            id: g.clone(),
            statement: ResolvedText::literal(g.as_str()),
            bloom: *BloomLevel::ALL.choose(rng).expect("non-empty"),
            knowledge: *KnowledgeDimension::ALL.choose(rng).expect("non-empty"),
            abcd: None,
            locale: locale.clone(),
        })
        .collect();
    let content = content_ids
        .iter()
        .map(|c| ContentItem {
            id: c.clone(),
            level: *ContentLevel::ALL.choose(rng).expect("non-empty"),
            body: ResolvedText::literal(c.as_str()),
            locale: locale.clone(),
        })
        .collect();
    let mut lesson = Lesson::default();
    for _ in 0..rng.gen_range(0..3) {
        let mut play = Play::default();
        for _ in 0..rng.gen_range(0..3) {
            let mut act = Act { goal_refs: subset(rng, &goal_ids, 0.3), ..Act::default() };
            for _ in 0..rng.gen_range(0..3) {
                let mut scene = Scene { content_refs: subset(rng, &content_ids, 0.3), ..Scene::default() };
                for _ in 0..rng.gen_range(0..4) {
                    scene.instructions.push(Instruction {
                        text: ResolvedText::literal("do"),
                        content_refs: subset(rng, &content_ids, 0.2),
                        principles: MerrillPrinciple::ALL.iter().copied().filter(|_| rng.gen_bool(0.3)).collect(),
                        sub_cycle: None,
                        goal_refs: subset(rng, &goal_ids, 0.2),
                    });
                }
                act.scenes.push(scene);
            }
            play.acts.push(act);
        }
        lesson.plays.push(play);
    }
    let evaluations = (0..rng.gen_range(0..4))
        .map(|n| EvalItem {
            id: id("e", n),
            kind: *EvalKind::ALL.choose(rng).expect("non-empty"),
            goal_refs: subset(rng, &goal_ids, 0.5),
            prompt: ResolvedText::literal("q"),
            answer_key: ResolvedText::literal("a"),
            choices: Vec::new(),
        })
        .collect();
    let port_names = ["goals", "content", "flow"];
    let patterns: Vec<PatternUse> = pattern_ids
        .iter()
        .map(|p| PatternUse {
            id: p.clone(),
            version: Version::default(),
            category: *PatternCategory::ALL.choose(rng).expect("non-empty"),
            related: (0..rng.gen_range(0..3))
                .map(|_| Relationship {
                    kind: *RelationshipKind::ALL.choose(rng).expect("non-empty"),
                    target: pattern_ids.choose(rng).expect("non-empty").clone(),
                })
                .collect(),
            ports: (0..rng.gen_range(0..3))
                .map(|_| Port {
                    name: port_names.choose(rng).expect("non-empty").to_string(),
                    direction: *PortDirection::ALL.choose(rng).expect("non-empty"),
                    port_type: *[PortType::GoalSet, PortType::ContentSet].choose(rng).expect("non-empty"),
                    multiplicity: Multiplicity { min: rng.gen_range(0..2), max: Some(rng.gen_range(1..3)) },
                })
                .collect(),
        })
        .collect();
    let bindings = pattern_ids
        .iter()
        .map(|p| BoundLeaf {
            pattern: p.clone(),
            wires: (0..rng.gen_range(0..3))
                .map(|_| Wire {
                    required_port: port_names.choose(rng).expect("non-empty").to_string(),
                    provider: pattern_ids.choose(rng).expect("non-empty").clone(),
                    provided_port: port_names.choose(rng).expect("non-empty").to_string(),
                })
                .collect(),
        })
        .collect();
    InstructionalDesign {
        id: "random".into(),
        version: Version::default(),
        locale,
        goals,
        lesson,
        content,
        evaluations,
        patterns,
        bindings,
    }
}
