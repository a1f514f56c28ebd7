use crate::composition::{live_wires, CompositionGraph};
use crate::pattern::{PortDirection, RelationshipKind, SolutionItem};
use crate::report::{Finding, ValidationReport};
use crate::repository::Repository;

use super::graph::cyclic_nodes;

/// Wiring and lifecycle checks over a resolved composition. Providers may be
/// any leaf of the composition.
///
/// - C1: a wire names an unknown required port, provider or provided port.
/// - C2: a wire connects ports of different types.
/// - C3: a required port has fewer well-typed wires than its minimum.
/// - C4: a required port has more well-typed wires than its maximum.
/// - C5: a referenced pattern has not reached Validated.
pub fn validate_composition(g: &CompositionGraph) -> ValidationReport {
    let mut out = Vec::new();
    let ports_of = |id: &_| g.patterns.get(id).map(|p: &crate::pattern::Pattern| p.ports.as_slice());
    for (i, (pattern, binding, span)) in g.leaves().into_iter().enumerate() {
        for w in &binding.wires {
            let subject = format!("leaves[{i}].{}", w.required_port);
            let Some(required) = pattern.port(PortDirection::Required, &w.required_port) else {
                out.push(
                    Finding::error(
                        "C1",
                        subject,
                        format!("`{}` has no required port `{}`", pattern.id, w.required_port),
                    )
                    .with_span(span.clone()),
                );
                continue;
            };
            let Some(provider) = g.patterns.get(&w.provider) else {
                out.push(
                    Finding::error("C1", subject, format!("provider `{}` is not part of the composition", w.provider))
                        .with_span(span.clone()),
                );
                continue;
            };
            let Some(provided) = provider.port(PortDirection::Provided, &w.provided_port) else {
                out.push(
                    Finding::error(
                        "C1",
                        subject,
                        format!("`{}` has no provided port `{}`", w.provider, w.provided_port),
                    )
                    .with_span(span.clone()),
                );
                continue;
            };
            if provided.port_type != required.port_type {
                out.push(
                    Finding::error(
                        "C2",
                        subject,
                        format!("`{w}` connects {} to {}", required.port_type, provided.port_type),
                    )
                    .with_span(span.clone()),
                );
            }
        }
        for port in pattern.ports(PortDirection::Required) {
            let count = live_wires(port, &binding.wires, ports_of);
            let subject = format!("leaves[{i}].{}", port.name);
            if count < port.multiplicity.min {
                out.push(
                    Finding::error(
                        "C3",
                        subject,
                        format!("`{}`.{} has {count} wires, needs {}", pattern.id, port.name, port.multiplicity),
                    )
                    .with_span(span.clone()),
                );
            } else if !port.multiplicity.admits(count) {
                out.push(
                    Finding::error(
                        "C4",
                        subject,
                        format!("`{}`.{} has {count} wires, accepts {}", pattern.id, port.name, port.multiplicity),
                    )
                    .with_span(span.clone()),
                );
            }
        }
    }
    for p in g.patterns.values() {
        if !p.lifecycle.is_applicable() {
            out.push(Finding::error(
                "C5",
                format!("patterns[{}]", p.id),
                format!("`{}` is {}, not yet Validated", p.id, p.lifecycle),
            ));
        }
    }
    ValidationReport::new(out)
}

/// Repository-level checks on one pattern.
///
/// - C6: a related pattern does not exist.
/// - C7: the pattern lies on a `uses`/`refines` cycle.
/// - C8: an `include` names a missing set or a set of another category.
pub fn validate_pattern(p: &crate::pattern::Pattern, repo: &Repository) -> Vec<Finding> {
    let mut out = Vec::new();
    for (i, r) in p.related.iter().enumerate() {
        if r.target != p.id && repo.pattern(&r.target).is_none() {
            out.push(Finding::error(
                "C6",
                format!("related[{i}]"),
                format!("{} target `{}` does not exist", r.kind.keyword(), r.target),
            ));
        }
    }
    let edges: Vec<_> = repo
        .patterns()
        .map(|q| if q.id == p.id { p } else { q })
        .chain(std::iter::once(p))
        .flat_map(|q| {
            q.related
                .iter()
                .filter(|r| matches!(r.kind, RelationshipKind::Uses | RelationshipKind::Refines))
                .map(move |r| (q.id.clone(), r.target.clone()))
        })
        .collect();
    if cyclic_nodes(&edges).contains(&p.id) {
        out.push(Finding::error("C7", "related", format!("`{}` is on a uses/refines cycle", p.id)));
    }
    for (i, item) in p.solution.items.iter().enumerate() {
        if let SolutionItem::Include(set) = item {
            match repo.set(set) {
                None => out.push(Finding::error(
                    "C8",
                    format!("solution.items[{i}]"),
                    format!("included set `{set}` does not exist"),
                )),
                Some(decl) if decl.kind.category() != p.category => out.push(Finding::error(
                    "C8",
                    format!("solution.items[{i}]"),
                    format!("{} `{set}` cannot be included in a {} pattern", decl.kind.keyword(), p.category),
                )),
                Some(_) => {}
            }
        }
    }
    out
}
