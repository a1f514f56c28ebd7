//! The adult-literacy lesson corpus.

use std::path::{Path, PathBuf};

use poid_core::composition::{instantiate, resolve, InstructionalDesign};
use poid_core::locale::LocaleTag;
use poid_core::pattern::PatternId;
use poid_core::repository::Repository;

pub const COMPOSITION: &str = "adult-literacy";
pub const LOCALES: [&str; 3] = ["hi", "te", "gu"];

/// Relative path and contents of every fixture file.
pub const FILES: [(&str, &str); 8] = [
    ("bundles/gu.bundle", include_str!("../fixtures/adult-literacy/bundles/gu.bundle")),
    ("bundles/hi.bundle", include_str!("../fixtures/adult-literacy/bundles/hi.bundle")),
    ("bundles/te.bundle", include_str!("../fixtures/adult-literacy/bundles/te.bundle")),
    ("compositions/adult-literacy.poid", include_str!("../fixtures/adult-literacy/compositions/adult-literacy.poid")),
    ("patterns/content.poid", include_str!("../fixtures/adult-literacy/patterns/content.poid")),
    ("patterns/evaluation.poid", include_str!("../fixtures/adult-literacy/patterns/evaluation.poid")),
    ("patterns/goals.poid", include_str!("../fixtures/adult-literacy/patterns/goals.poid")),
    ("patterns/process.poid", include_str!("../fixtures/adult-literacy/patterns/process.poid")),
];

/// Lesson shape of variant 0 (no summary act, word quiz), counted by hand
/// from `patterns/process.poid`.
pub struct Shape {
    pub plays: usize,
    /// Scenes per act; each entry lists instructions per scene.
    pub acts: &'static [&'static [usize]],
    pub goals: usize,
    pub content: usize,
    pub evaluations: usize,
}

pub const VARIANT0_SHAPE: Shape =
    Shape { plays: 1, acts: &[&[2], &[2, 1], &[2], &[2, 2], &[1, 2]], goals: 3, content: 6, evaluations: 3 };

/// The act that forms new words; it has exactly two scenes.
pub const WORD_FORMATION_ACT: usize = 3;

/// Writes the corpus under `root`.
pub fn write_corpus(root: &Path) -> std::io::Result<()> {
    for (rel, text) in FILES {
        let path = root.join(rel);
        std::fs::create_dir_all(path.parent().expect("has parent"))?;
        std::fs::write(path, text)?;
    }
    Ok(())
}

pub fn sources() -> Vec<(PathBuf, String)> {
    FILES.iter().filter(|(p, _)| p.ends_with(".poid")).map(|(p, t)| (PathBuf::from(p), t.to_string())).collect()
}

pub fn bundle_sources() -> Vec<(PathBuf, String)> {
    FILES.iter().filter(|(p, _)| p.ends_with(".bundle")).map(|(p, t)| (PathBuf::from(p), t.to_string())).collect()
}

/// In-memory repository of the corpus. Panics on any diagnostic.
pub fn repository() -> Repository {
    let (repo, diags) = Repository::from_sources(&sources(), &bundle_sources());
    assert!(diags.is_empty(), "fixture diagnostics: {diags:#?}");
    repo
}

/// Variant `index` instantiated with the bundle for `locale`.
pub fn design(index: u64, locale: &str) -> InstructionalDesign {
    let repo = repository();
    let comp = repo.composition(&PatternId::new(COMPOSITION).unwrap()).expect("composition");
    let graph = resolve(comp, &repo).expect("resolves");
    let variant = graph.pick(index).expect("variant");
    let bundle = repo.bundle(&LocaleTag::new(locale).unwrap()).expect("bundle");
    instantiate(&variant, bundle).expect("instantiates")
}
