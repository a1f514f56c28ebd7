use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::composition::InstructionalDesign;
use crate::pattern::{PatternId, PortDirection, Relationship, RelationshipKind};
use crate::taxonomy::{ContentLevel, MerrillPrinciple};

use super::design::validate_design;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MutationKind {
    /// Remove one goal from every act and instruction.
    DropProcessGoalRef,
    /// Remove one goal from every evaluation.
    DropEvaluationGoalRef,
    /// Declare a `conflicts-with` edge between two used patterns.
    AddConflict,
    /// Close a `uses` loop between two used patterns (or one, as a self-loop).
    AddCycle,
    /// Mirror every content level, turning an ascending ladder into a descending one.
    InvertLadder,
    /// Strip Activation and Demonstration from one act that has an Application.
    DropActivation,
    /// Remove the wires of one required port.
    UnwirePort,
}

impl MutationKind {
    pub const ALL: [MutationKind; 7] = [
        MutationKind::DropProcessGoalRef,
        MutationKind::DropEvaluationGoalRef,
        MutationKind::AddConflict,
        MutationKind::AddCycle,
        MutationKind::InvertLadder,
        MutationKind::DropActivation,
        MutationKind::UnwirePort,
    ];

    /// The rule that should catch this fault.
    pub fn expected_rule(self) -> &'static str {
        match self {
            MutationKind::DropProcessGoalRef => "V1",
            MutationKind::DropEvaluationGoalRef => "V2",
            MutationKind::AddConflict => "V3",
            MutationKind::AddCycle => "V4",
            MutationKind::InvertLadder => "V5",
            MutationKind::DropActivation => "V6",
            MutationKind::UnwirePort => "V7",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mutant {
    pub kind: MutationKind,
    pub target: String,
    /// Rules with findings that the seed did not have.
    pub fired: BTreeSet<String>,
}

impl Mutant {
    pub fn detected(&self) -> bool {
        self.fired.contains(self.kind.expected_rule())
    }

    /// Detected by the expected rule and nothing else.
    pub fn exact(&self) -> bool {
        self.detected() && self.fired.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MutationScore {
    pub requested: usize,
    pub mutants: Vec<Mutant>,
}

impl MutationScore {
    /// detected / requested; 1.0 when nothing was requested.
    pub fn rate(&self) -> f64 {
        if self.requested == 0 {
            return 1.0;
        }
        self.mutants.iter().filter(|m| m.detected()).count() as f64 / self.requested as f64
    }

    pub fn exact_rate(&self) -> f64 {
        if self.requested == 0 {
            return 1.0;
        }
        self.mutants.iter().filter(|m| m.exact()).count() as f64 / self.requested as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("seed design has {0} error findings")]
    SeedHasErrors(usize),
}

/// Applies `n` random single-fault mutations to `seed` and validates each.
pub fn mutation_harness(seed: &InstructionalDesign, n: usize, rng_seed: u64) -> Result<MutationScore, MutationError> {
    let base = validate_design(seed);
    if base.has_errors() {
        return Err(MutationError::SeedHasErrors(base.summary.errors));
    }
    let baseline: BTreeSet<_> = base.findings.iter().map(|f| (f.rule_id.clone(), f.subject_path.clone())).collect();
    let applicable: Vec<_> = MutationKind::ALL.into_iter().filter(|k| !candidates(seed, *k).is_empty()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut mutants = Vec::with_capacity(n);
    if applicable.is_empty() {
        return Ok(MutationScore { requested: n, mutants });
    }
    for _ in 0..n {
        let kind = *applicable.choose(&mut rng).expect("non-empty");
        let targets = candidates(seed, kind);
        let target = targets.choose(&mut rng).expect("non-empty").clone();
        let mut design = seed.clone();
        let label = apply(&mut design, kind, &target);
        let fired = validate_design(&design)
            .findings
            .into_iter()
            .filter(|f| !baseline.contains(&(f.rule_id.clone(), f.subject_path.clone())))
            .map(|f| f.rule_id)
            .collect();
        mutants.push(Mutant { kind, target: label, fired });
    }
    Ok(MutationScore { requested: n, mutants })
}

#[derive(Debug, Clone)]
enum Target {
    Goal(PatternId),
    Pair(PatternId, PatternId),
    All,
    Act(usize, usize),
    Port(usize, String),
}

fn candidates(d: &InstructionalDesign, kind: MutationKind) -> Vec<Target> {
    match kind {
        MutationKind::DropProcessGoalRef => {
            let refs: BTreeSet<_> = d
                .lesson
                .acts()
                .flat_map(|a| a.goal_refs.iter())
                .chain(d.lesson.instructions().flat_map(|i| i.goal_refs.iter()))
                .collect();
            d.goals.iter().filter(|g| refs.contains(&g.id)).map(|g| Target::Goal(g.id.clone())).collect()
        }
        MutationKind::DropEvaluationGoalRef => {
            let refs: BTreeSet<_> = d.evaluations.iter().flat_map(|e| e.goal_refs.iter()).collect();
            d.goals.iter().filter(|g| refs.contains(&g.id)).map(|g| Target::Goal(g.id.clone())).collect()
        }
        MutationKind::AddConflict => pairs(d, false),
        MutationKind::AddCycle => pairs(d, true),
        MutationKind::InvertLadder => {
            let levels: BTreeSet<ContentLevel> =
                d.lesson.content_refs().filter_map(|id| d.content_item(id)).map(|c| c.level).collect();
            if levels.len() >= 2 {
                vec![Target::All]
            } else {
                Vec::new()
            }
        }
        MutationKind::DropActivation => {
            let mut out = Vec::new();
            for (pi, play) in d.lesson.plays.iter().enumerate() {
                for (ai, act) in play.acts.iter().enumerate() {
                    let has_application = act
                        .scenes
                        .iter()
                        .flat_map(|s| s.instructions.iter())
                        .any(|i| i.principles.contains(&MerrillPrinciple::Application));
                    if has_application {
                        out.push(Target::Act(pi, ai));
                    }
                }
            }
            out
        }
        MutationKind::UnwirePort => {
            let mut out = Vec::new();
            for (i, leaf) in d.bindings.iter().enumerate() {
                let Some(p) = d.pattern(&leaf.pattern) else { continue };
                for port in p.ports.iter().filter(|p| p.direction == PortDirection::Required) {
                    if port.multiplicity.min >= 1 && leaf.wires.iter().any(|w| w.required_port == port.name) {
                        out.push(Target::Port(i, port.name.clone()));
                    }
                }
            }
            out
        }
    }
}

fn pairs(d: &InstructionalDesign, allow_self: bool) -> Vec<Target> {
    let ids: Vec<_> = d.patterns.iter().map(|p| &p.id).collect();
    let mut out = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i..] {
            if a != b || allow_self {
                out.push(Target::Pair((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}

fn add_relation(d: &mut InstructionalDesign, from: &PatternId, kind: RelationshipKind, to: &PatternId) {
    let p = d.patterns.iter_mut().find(|p| &p.id == from).expect("pattern in design");
    p.related.push(Relationship { kind, target: to.clone() });
}

fn apply(d: &mut InstructionalDesign, kind: MutationKind, target: &Target) -> String {
    match (kind, target) {
        (MutationKind::DropProcessGoalRef, Target::Goal(g)) => {
            for play in &mut d.lesson.plays {
                for act in &mut play.acts {
                    act.goal_refs.retain(|r| r != g);
                    for scene in &mut act.scenes {
                        for ins in &mut scene.instructions {
                            ins.goal_refs.retain(|r| r != g);
                        }
                    }
                }
            }
            format!("goals[{g}]")
        }
        (MutationKind::DropEvaluationGoalRef, Target::Goal(g)) => {
            for e in &mut d.evaluations {
                e.goal_refs.retain(|r| r != g);
            }
            format!("goals[{g}]")
        }
        (MutationKind::AddConflict, Target::Pair(a, b)) => {
            add_relation(d, a, RelationshipKind::ConflictsWith, b);
            format!("{a} conflicts-with {b}")
        }
        (MutationKind::AddCycle, Target::Pair(a, b)) => {
            add_relation(d, a, RelationshipKind::Uses, b);
            if a != b {
                add_relation(d, b, RelationshipKind::Uses, a);
            }
            format!("{a} uses {b} uses {a}")
        }
        (MutationKind::InvertLadder, Target::All) => {
            let all = ContentLevel::ALL;
            for c in &mut d.content {
                let i = all.iter().position(|l| *l == c.level).expect("level listed");
                c.level = all[all.len() - 1 - i];
            }
            "content".to_string()
        }
        (MutationKind::DropActivation, Target::Act(pi, ai)) => {
            let act = &mut d.lesson.plays[*pi].acts[*ai];
            for scene in &mut act.scenes {
                for ins in &mut scene.instructions {
                    ins.principles
                        .retain(|p| !matches!(p, MerrillPrinciple::Activation | MerrillPrinciple::Demonstration));
                }
            }
            format!("lesson.plays[{pi}].acts[{ai}]")
        }
        (MutationKind::UnwirePort, Target::Port(i, port)) => {
            d.bindings[*i].wires.retain(|w| &w.required_port != port);
            format!("bindings[{i}].{port}")
        }
        _ => unreachable!("candidates produce matching targets"),
    }
}
