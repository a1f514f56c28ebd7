use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::locale::{LocaleBundle, LocaleTag};
use crate::pattern::{AbcdDecl, ActDecl, Pattern, PatternId, Port, PortDirection, SolutionItem, TextSource};
use crate::taxonomy::{render_abcd, AbcdObjective};

use super::design::*;
use super::node::{Binding, Scalar, Wire};
use super::resolve::{LeafUse, ResolvedVariant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("bundle `{locale}` has no key `{key}`")]
    MissingKey { key: String, locale: LocaleTag },
    #[error("required port `{port}` of `{pattern}` is not wired to a provider in this variant")]
    UnwiredPort { pattern: PatternId, port: String },
    #[error("required port `{port}` of `{pattern}` has {count} wires, more than it accepts")]
    OverwiredPort { pattern: PatternId, port: String, count: u32 },
    #[error("`{pattern}` is bound to locale `{expected}` but the bundle is `{found}`")]
    LocaleMismatch { pattern: PatternId, expected: LocaleTag, found: LocaleTag },
    #[error("item `{id}` is declared by both `{first}` and `{second}`")]
    DuplicateItem { id: PatternId, first: PatternId, second: PatternId },
    #[error("{kind} reference `{id}` does not resolve in the design")]
    UnresolvedItem { kind: &'static str, id: PatternId },
    #[error("goal `{goal}` needs a statement or a complete abcd objective")]
    MissingStatement { goal: PatternId },
}

/// Where localized strings come from.
#[derive(Debug, Clone, Copy)]
pub enum Strings<'a> {
    Bundle(&'a LocaleBundle),
    /// Every key resolves to itself; used for structural checks without a bundle.
    KeysOnly(&'a LocaleTag),
}

impl Strings<'_> {
    fn locale(&self) -> &LocaleTag {
        match self {
            Strings::Bundle(b) => &b.locale,
            Strings::KeysOnly(l) => l,
        }
    }
}

/// Builds the design for one variant with strings from `bundle`.
pub fn instantiate(variant: &ResolvedVariant, bundle: &LocaleBundle) -> Result<InstructionalDesign, InstantiateError> {
    instantiate_with(variant, Strings::Bundle(bundle))
}

pub fn instantiate_with(
    variant: &ResolvedVariant,
    strings: Strings<'_>,
) -> Result<InstructionalDesign, InstantiateError> {
    check_locales(variant, strings.locale())?;
    check_wiring(variant)?;
    let mut b = Builder {
        strings,
        design: InstructionalDesign {
            id: variant.design_id(),
            version: variant.version,
            locale: strings.locale().clone(),
            goals: Vec::new(),
            lesson: Lesson::default(),
            content: Vec::new(),
            evaluations: Vec::new(),
            patterns: Vec::new(),
            bindings: Vec::new(),
        },
        owners: BTreeMap::new(),
        play_open: false,
    };
    for leaf in &variant.leaves {
        b.add_leaf(leaf)?;
    }
    let design = b.design;
    check_references(&design)?;
    Ok(design)
}

fn check_locales(variant: &ResolvedVariant, locale: &LocaleTag) -> Result<(), InstantiateError> {
    for leaf in &variant.leaves {
        if let Some(expected) = &leaf.binding.locale {
            if expected != locale {
                return Err(InstantiateError::LocaleMismatch {
                    pattern: leaf.pattern.id.clone(),
                    expected: expected.clone(),
                    found: locale.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Number of wires on `port` whose provider is present in `present` and offers
/// a provided port of the same name and type.
pub(crate) fn live_wires<'a>(port: &Port, wires: &[Wire], lookup: impl Fn(&PatternId) -> Option<&'a [Port]>) -> u32 {
    wires
        .iter()
        .filter(|w| w.required_port == port.name)
        .filter(|w| {
            lookup(&w.provider).is_some_and(|ports| {
                ports.iter().any(|p| {
                    p.direction == PortDirection::Provided && p.name == w.provided_port && p.port_type == port.port_type
                })
            })
        })
        .count() as u32
}

fn check_wiring(variant: &ResolvedVariant) -> Result<(), InstantiateError> {
    let present: BTreeMap<&PatternId, &Pattern> = variant.leaves.iter().map(|l| (&l.pattern.id, &l.pattern)).collect();
    for leaf in &variant.leaves {
        for port in leaf.pattern.ports(PortDirection::Required) {
            let count = live_wires(port, &leaf.binding.wires, |id| present.get(id).map(|p| p.ports.as_slice()));
            if count < port.multiplicity.min {
                return Err(InstantiateError::UnwiredPort {
                    pattern: leaf.pattern.id.clone(),
                    port: port.name.clone(),
                });
            }
            if !port.multiplicity.admits(count) {
                return Err(InstantiateError::OverwiredPort {
                    pattern: leaf.pattern.id.clone(),
                    port: port.name.clone(),
                    count,
                });
            }
        }
    }
    Ok(())
}

fn check_references(d: &InstructionalDesign) -> Result<(), InstantiateError> {
    let goals: BTreeSet<_> = d.goals.iter().map(|g| &g.id).collect();
    let content: BTreeSet<_> = d.content.iter().map(|c| &c.id).collect();
    let goal_refs = d
        .lesson
        .acts()
        .flat_map(|a| a.goal_refs.iter())
        .chain(d.lesson.instructions().flat_map(|i| i.goal_refs.iter()))
        .chain(d.evaluations.iter().flat_map(|e| e.goal_refs.iter()));
    for id in goal_refs {
        if !goals.contains(id) {
            return Err(InstantiateError::UnresolvedItem { kind: "goal", id: id.clone() });
        }
    }
    for id in d.lesson.content_refs() {
        if !content.contains(id) {
            return Err(InstantiateError::UnresolvedItem { kind: "content", id: id.clone() });
        }
    }
    Ok(())
}

struct Builder<'a> {
    strings: Strings<'a>,
    design: InstructionalDesign,
    /// item id -> declaring pattern
    owners: BTreeMap<PatternId, PatternId>,
    play_open: bool,
}

impl Builder<'_> {
    fn add_leaf(&mut self, leaf: &LeafUse) -> Result<(), InstantiateError> {
        let p = &leaf.pattern;
        if self.design.pattern(&p.id).is_none() {
            self.design.patterns.push(PatternUse {
                id: p.id.clone(),
                version: p.version,
                category: p.category,
                related: p.related.clone(),
                ports: p.ports.clone(),
            });
        }
        self.design.bindings.push(BoundLeaf { pattern: p.id.clone(), wires: leaf.binding.wires.clone() });
        let params = &leaf.binding;
        for item in &p.solution.items {
            match item {
                SolutionItem::Goal(g) => {
                    if !self.claim(&g.id, &p.id)? {
                        continue;
                    }
                    let abcd = g.abcd.as_ref().map(|a| self.abcd(a, params)).transpose()?;
                    let statement = match (&g.statement, &abcd) {
                        (Some(s), _) => self.text(s, params)?,
                        (None, Some(a)) => {
                            let objective = AbcdObjective::new(
                                a.audience.value.clone(),
                                a.behavior.value.clone(),
                                a.condition.as_ref().map(|c| c.value.clone()).unwrap_or_default(),
                                a.degree.as_ref().map(|c| c.value.clone()).unwrap_or_default(),
                            );
                            let value = render_abcd(&objective)
                                .map_err(|_| InstantiateError::MissingStatement { goal: g.id.clone() })?;
                            let localized = [&a.audience, &a.behavior]
                                .into_iter()
                                .chain(a.condition.iter())
                                .chain(a.degree.iter())
                                .any(ResolvedText::is_localized);
                            // a rendered objective counts as localized if any part is
                            ResolvedText { value, key: localized.then(|| format!("goals.{}.abcd", g.id)) }
                        }
                        (None, None) => return Err(InstantiateError::MissingStatement { goal: g.id.clone() }),
                    };
                    self.design.goals.push(Goal {
                        id: g.id.clone(),
                        statement,
                        bloom: g.bloom,
                        knowledge: g.knowledge,
                        abcd,
                        locale: self.strings.locale().clone(),
                    });
                }
                SolutionItem::Content(c) => {
                    if !self.claim(&c.id, &p.id)? {
                        continue;
                    }
                    let body = self.text(&c.body, params)?;
                    self.design.content.push(ContentItem {
                        id: c.id.clone(),
                        level: c.level,
                        body,
                        locale: self.strings.locale().clone(),
                    });
                }
                SolutionItem::Eval(e) => {
                    if !self.claim(&e.id, &p.id)? {
                        continue;
                    }
                    let item = EvalItem {
                        id: e.id.clone(),
                        kind: e.kind,
                        goal_refs: e.goals.clone(),
                        prompt: self.text(&e.prompt, params)?,
                        answer_key: self.text(&e.answer, params)?,
                        choices: e.choices.iter().map(|c| self.text(c, params)).collect::<Result<_, _>>()?,
                    };
                    self.design.evaluations.push(item);
                }
                SolutionItem::Play(play) => {
                    let title = self.opt_text(&play.title, params)?;
                    let acts = play.acts.iter().map(|a| self.act(a, params)).collect::<Result<_, _>>()?;
                    self.design.lesson.plays.push(Play { title, acts });
                    self.play_open = false;
                }
                SolutionItem::Act(a) => {
                    let act = self.act(a, params)?;
                    if !self.play_open {
                        self.design.lesson.plays.push(Play::default());
                        self.play_open = true;
                    }
                    self.design.lesson.plays.last_mut().expect("open play").acts.push(act);
                }
                // spliced during resolution
                SolutionItem::Include(_) => {}
            }
        }
        Ok(())
    }

    /// Records the owner of an item id. Returns false for a repeat from the
    /// same pattern (a repeated leaf), which is skipped.
    fn claim(&mut self, id: &PatternId, owner: &PatternId) -> Result<bool, InstantiateError> {
        match self.owners.get(id) {
            None => {
                self.owners.insert(id.clone(), owner.clone());
                Ok(true)
            }
            Some(first) if first == owner => Ok(false),
            Some(first) => {
                Err(InstantiateError::DuplicateItem { id: id.clone(), first: first.clone(), second: owner.clone() })
            }
        }
    }

    fn act(&self, a: &ActDecl, params: &Binding) -> Result<Act, InstantiateError> {
        let mut scenes = Vec::with_capacity(a.scenes.len());
        for s in &a.scenes {
            let mut instructions = Vec::with_capacity(s.instructions.len());
            for i in &s.instructions {
                instructions.push(Instruction {
                    text: self.text(&i.text, params)?,
                    content_refs: i.content.clone(),
                    principles: i.principles.clone(),
                    sub_cycle: i.phase,
                    goal_refs: i.goals.clone(),
                });
            }
            scenes.push(Scene {
                title: self.opt_text(&s.title, params)?,
                content_refs: s.content.clone(),
                instructions,
            });
        }
        Ok(Act { title: self.opt_text(&a.title, params)?, goal_refs: a.goals.clone(), scenes })
    }

    fn abcd(&self, a: &AbcdDecl, params: &Binding) -> Result<Abcd, InstantiateError> {
        Ok(Abcd {
            audience: self.text(&a.audience, params)?,
            behavior: self.text(&a.behavior, params)?,
            condition: self.opt_text(&a.condition, params)?,
            degree: self.opt_text(&a.degree, params)?,
        })
    }

    fn opt_text(&self, t: &Option<TextSource>, params: &Binding) -> Result<Option<ResolvedText>, InstantiateError> {
        t.as_ref().map(|t| self.text(t, params)).transpose()
    }

    fn text(&self, t: &TextSource, binding: &Binding) -> Result<ResolvedText, InstantiateError> {
        Ok(match t {
            TextSource::Literal(s) => ResolvedText::literal(interpolate(s, &binding.params)),
            TextSource::Key(k) => {
                let raw = match self.strings {
                    Strings::Bundle(b) => b
                        .get(k)
                        .ok_or_else(|| InstantiateError::MissingKey { key: k.clone(), locale: b.locale.clone() })?,
                    Strings::KeysOnly(_) => k.as_str(),
                };
                ResolvedText { value: interpolate(raw, &binding.params), key: Some(k.clone()) }
            }
        })
    }
}

/// Replaces `{name}` with the value of parameter `name`; other braces are kept.
pub fn interpolate(s: &str, params: &BTreeMap<String, Scalar>) -> String {
    if params.is_empty() || !s.contains('{') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}').and_then(|close| params.get(&after[..close]).map(|v| (close, v))) {
            Some((close, value)) => {
                out.push_str(&value.to_string());
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let mut params = BTreeMap::new();
        params.insert("syllable".to_string(), Scalar::Str("ka".into()));
        params.insert("n".to_string(), Scalar::Int(5));
        assert_eq!(interpolate("form {syllable} words x{n}", &params), "form ka words x5");
        assert_eq!(interpolate("{unknown} {n", &params), "{unknown} {n");
        assert_eq!(interpolate("{{n}}", &params), "{5}");
    }
}
