use std::collections::BTreeSet;

use crate::pattern::{LifecycleState, Pattern, RelationshipKind, SolutionItem, TextSource};
use crate::report::Finding;

/// Checks the invariants of a single pattern. Subjects are field names.
///
/// | rule | field |
/// |------|-------|
/// | W1 | `name` non-empty |
/// | W2 | `problem` non-empty |
/// | W3 | `context` non-empty |
/// | W4 | `solution` non-empty unless Discovered |
/// | W5 | no `refines` edge to itself |
/// | W6 | port names unique per direction |
/// | W7 | port multiplicity min <= max |
/// | W8 | solution items match the category |
/// | W9 | solution item ids unique |
/// | W10 | abcd audience and behavior non-empty |
/// | W11 | goal has a statement or an abcd objective |
pub fn check_well_formed(p: &Pattern) -> Vec<Finding> {
    let mut out = Vec::new();
    for (rule, field, value) in [("W1", "name", &p.name), ("W2", "problem", &p.problem), ("W3", "context", &p.context)]
    {
        if value.trim().is_empty() {
            out.push(Finding::error(rule, field, format!("{field} empty")));
        }
    }
    if p.lifecycle != LifecycleState::Discovered && p.solution.is_empty() {
        out.push(Finding::error("W4", "solution", format!("solution empty in state {}", p.lifecycle)));
    }
    for (i, r) in p.related.iter().enumerate() {
        if r.kind == RelationshipKind::Refines && r.target == p.id {
            out.push(Finding::error("W5", format!("related[{i}]"), "pattern refines itself"));
        }
    }
    let mut names = BTreeSet::new();
    for (i, port) in p.ports.iter().enumerate() {
        if !names.insert((port.direction, port.name.as_str())) {
            out.push(Finding::error(
                "W6",
                format!("ports[{i}]"),
                format!("duplicate {} port `{}`", port.direction, port.name),
            ));
        }
        if !port.multiplicity.is_consistent() {
            out.push(Finding::error(
                "W7",
                format!("ports[{i}]"),
                format!("multiplicity {} has min > max", port.multiplicity),
            ));
        }
    }
    let mut ids = BTreeSet::new();
    for (i, item) in p.solution.items.iter().enumerate() {
        let subject = format!("solution.items[{i}]");
        if let Some(cat) = item.payload_category() {
            if cat != p.category {
                out.push(Finding::error("W8", &subject, format!("{cat} item in a {} pattern", p.category)));
            }
        }
        let id = match item {
            SolutionItem::Goal(g) => Some(&g.id),
            SolutionItem::Content(c) => Some(&c.id),
            SolutionItem::Eval(e) => Some(&e.id),
            _ => None,
        };
        if let Some(id) = id {
            if !ids.insert(id) {
                out.push(Finding::error("W9", &subject, format!("duplicate item id `{id}`")));
            }
        }
        if let SolutionItem::Goal(g) = item {
            if let Some(a) = &g.abcd {
                if blank(&a.audience) || blank(&a.behavior) {
                    out.push(Finding::error(
                        "W10",
                        &subject,
                        format!("goal `{}` abcd needs audience and behavior", g.id),
                    ));
                }
            }
            if g.statement.is_none() && g.abcd.is_none() {
                out.push(Finding::error("W11", &subject, format!("goal `{}` has neither statement nor abcd", g.id)));
            }
        }
    }
    out
}

fn blank(t: &TextSource) -> bool {
    t.is_blank()
}

/// Prefixes each subject with `scope`, e.g. the pattern id.
pub fn scoped(findings: Vec<Finding>, scope: &str) -> Vec<Finding> {
    findings
        .into_iter()
        .map(|mut f| {
            f.subject_path = format!("{scope}.{}", f.subject_path);
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{PatternCategory, SolutionBody};

    fn full() -> Pattern {
        let mut p = Pattern::new("bloom-goals", PatternCategory::Goals, "Bloom Goal Set").unwrap();
        p.problem = "p".into();
        p.context = "c".into();
        p.solution = SolutionBody { text: Some(TextSource::literal("s")), items: Vec::new() };
        p.lifecycle = LifecycleState::Specified;
        p
    }

    #[test]
    fn fully_populated_is_clean() {
        assert!(check_well_formed(&full()).is_empty());
    }

    #[test]
    fn empty_problem() {
        let mut p = full();
        p.problem.clear();
        let f = check_well_formed(&p);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule_id, "W2");
        assert_eq!(f[0].message, "problem empty");
    }

    #[test]
    fn discovered_may_lack_solution() {
        let mut p = full();
        p.lifecycle = LifecycleState::Discovered;
        p.solution = SolutionBody::default();
        assert!(check_well_formed(&p).is_empty());
        p.lifecycle = LifecycleState::Validated;
        assert_eq!(check_well_formed(&p)[0].rule_id, "W4");
    }
}
