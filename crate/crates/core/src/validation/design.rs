use std::collections::{BTreeMap, BTreeSet};

use crate::composition::{live_wires, InstructionalDesign};
use crate::pattern::{PatternId, PortDirection, RelationshipKind};
use crate::report::{Finding, ValidationReport};
use crate::taxonomy::{ContentLevel, MerrillPrinciple};

use super::graph::cyclic_nodes;

/// Runs the design rules. V1 to V4 and V7 are errors; V5 and V6 are warnings.
///
/// - V1: every goal is referenced by an act or instruction.
/// - V2: every goal is referenced by an evaluation.
/// - V3: no two patterns of the design are related by `conflicts-with`.
/// - V4: `uses`/`refines` among the design's patterns is acyclic.
/// - V5: first occurrences of content levels along the lesson never step down.
/// - V6: an Application instruction follows an Activation or Demonstration in its act.
/// - V7: every required port of every bound leaf is wired within its multiplicity.
pub fn validate_design(d: &InstructionalDesign) -> ValidationReport {
    let passes: [fn(&InstructionalDesign) -> Vec<Finding>; 7] =
        [goal_process, goal_evaluation, conflicts, cycles, ladder, merrill, wiring];
    ValidationReport::new(passes.iter().flat_map(|pass| pass(d)).collect())
}

fn goal_subject(id: &PatternId) -> String {
    format!("goals[{id}]")
}

fn goal_process(d: &InstructionalDesign) -> Vec<Finding> {
    let referenced: BTreeSet<&PatternId> = d
        .lesson
        .acts()
        .flat_map(|a| a.goal_refs.iter())
        .chain(d.lesson.instructions().flat_map(|i| i.goal_refs.iter()))
        .collect();
    d.goals
        .iter()
        .filter(|g| !referenced.contains(&g.id))
        .map(|g| {
            Finding::error(
                "V1",
                goal_subject(&g.id),
                format!("goal `{}` is not addressed by any act or instruction", g.id),
            )
        })
        .collect()
}

fn goal_evaluation(d: &InstructionalDesign) -> Vec<Finding> {
    let referenced: BTreeSet<&PatternId> = d.evaluations.iter().flat_map(|e| e.goal_refs.iter()).collect();
    d.goals
        .iter()
        .filter(|g| !referenced.contains(&g.id))
        .map(|g| {
            Finding::error("V2", goal_subject(&g.id), format!("goal `{}` is not assessed by any evaluation", g.id))
        })
        .collect()
}

fn conflicts(d: &InstructionalDesign) -> Vec<Finding> {
    let present: BTreeSet<&PatternId> = d.patterns.iter().map(|p| &p.id).collect();
    d.patterns
        .iter()
        .flat_map(|p| {
            p.related.iter().filter(|r| r.kind == RelationshipKind::ConflictsWith && present.contains(&r.target)).map(
                move |r| {
                    Finding::error(
                        "V3",
                        format!("patterns[{}]", p.id),
                        format!("`{}` conflicts with `{}`, which is also used", p.id, r.target),
                    )
                },
            )
        })
        .collect()
}

fn cycles(d: &InstructionalDesign) -> Vec<Finding> {
    let present: BTreeSet<&PatternId> = d.patterns.iter().map(|p| &p.id).collect();
    let edges: Vec<(&PatternId, &PatternId)> = d
        .patterns
        .iter()
        .flat_map(|p| {
            p.related
                .iter()
                .filter(|r| r.kind.is_structural() && present.contains(&r.target))
                .map(move |r| (&p.id, &r.target))
        })
        .collect();
    cyclic_nodes(&edges)
        .into_iter()
        .map(|id| Finding::error("V4", format!("patterns[{id}]"), format!("`{id}` is on a uses/refines cycle")))
        .collect()
}

fn ladder(d: &InstructionalDesign) -> Vec<Finding> {
    let levels: BTreeMap<&PatternId, ContentLevel> = d.content.iter().map(|c| (&c.id, c.level)).collect();
    let mut seen = BTreeSet::new();
    let mut highest: Option<ContentLevel> = None;
    let mut out = Vec::new();
    for id in d.lesson.content_refs() {
        let Some(&level) = levels.get(id) else { continue };
        if !seen.insert(level) {
            continue;
        }
        match highest {
            Some(h) if level < h => out.push(Finding::warning(
                "V5",
                format!("content[{id}]"),
                format!("{level} content `{id}` first appears after {h} content"),
            )),
            _ => highest = Some(level),
        }
    }
    out
}

fn merrill(d: &InstructionalDesign) -> Vec<Finding> {
    let mut out = Vec::new();
    for (pi, play) in d.lesson.plays.iter().enumerate() {
        for (ai, act) in play.acts.iter().enumerate() {
            let mut prepared = false;
            for (si, scene) in act.scenes.iter().enumerate() {
                for (ii, ins) in scene.instructions.iter().enumerate() {
                    if ins.principles.contains(&MerrillPrinciple::Application) && !prepared {
                        out.push(Finding::warning(
                            "V6",
                            format!("lesson.plays[{pi}].acts[{ai}].scenes[{si}].instructions[{ii}]"),
                            "application without prior activation or demonstration in the act",
                        ));
                    }
                    prepared |= ins
                        .principles
                        .iter()
                        .any(|p| matches!(p, MerrillPrinciple::Activation | MerrillPrinciple::Demonstration));
                }
            }
        }
    }
    out
}

fn wiring(d: &InstructionalDesign) -> Vec<Finding> {
    let mut out = Vec::new();
    for (i, leaf) in d.bindings.iter().enumerate() {
        let Some(pattern) = d.pattern(&leaf.pattern) else { continue };
        for port in pattern.ports.iter().filter(|p| p.direction == PortDirection::Required) {
            let count = live_wires(port, &leaf.wires, |id| d.pattern(id).map(|p| p.ports.as_slice()));
            let subject = format!("bindings[{i}].{}", port.name);
            if count < port.multiplicity.min {
                out.push(Finding::error(
                    "V7",
                    subject,
                    format!(
                        "required port `{}` of `{}` is unwired ({count} of {})",
                        port.name, leaf.pattern, port.multiplicity
                    ),
                ));
            } else if !port.multiplicity.admits(count) {
                out.push(Finding::error(
                    "V7",
                    subject,
                    format!(
                        "required port `{}` of `{}` is overwired ({count} of {})",
                        port.name, leaf.pattern, port.multiplicity
                    ),
                ));
            }
        }
    }
    out
}
