use std::path::{Path, PathBuf};

use proptest::prelude::*;
use rand::seq::IteratorRandom;
use rand::Rng;

use poid_core::locale::LocaleBundle;
use poid_core::pattern::{LifecycleState, PatternCategory, PatternId};
use poid_core::repository::{Query, RepoError, Repository};
use poid_testkit::{fixture, gen, rng};

fn id(s: &str) -> PatternId {
    PatternId::new(s).unwrap()
}

#[test]
fn loads_the_corpus_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    fixture::write_corpus(dir.path()).unwrap();
    let (repo, diags) = Repository::load(dir.path()).unwrap();
    assert!(diags.is_empty(), "{diags:#?}");
    assert_eq!(repo.patterns().count(), 6);
    assert_eq!(repo.compositions().count(), 1);
    assert_eq!(repo.bundles().count(), 3);
    assert!(repo.source_path(&id("pasi-lesson")).unwrap().ends_with("patterns/process.poid"));
}

#[test]
fn search_filters_conjunctively() {
    let repo = fixture::repository();
    let q = |text: Option<&str>, category, lifecycle| Query { text: text.map(str::to_string), category, lifecycle };
    assert_eq!(repo.search(&q(Some("pasi"), None, None)), [id("pasi-lesson")]);
    assert_eq!(repo.search(&q(Some("PAS"), None, None)), [id("pasi-lesson")]);
    assert_eq!(repo.search(&q(None, Some(PatternCategory::Evaluation), None)), [id("dictation-quiz"), id("word-quiz")]);
    assert!(repo.search(&q(Some("pasi"), Some(PatternCategory::Goals), None)).is_empty());
    assert_eq!(repo.search(&q(None, None, Some(LifecycleState::Applied))), [id("pasi-lesson")]);
    assert_eq!(repo.search(&Query::default()).len(), 6);
}

#[test]
fn duplicate_ids_keep_the_first_file() {
    let src = |name: &str| format!("pattern dup : Goals {{\n  name \"{name}\"\n}}\n");
    let sources = vec![(PathBuf::from("b.poid"), src("second")), (PathBuf::from("a.poid"), src("first"))];
    let (repo, diags) = Repository::from_sources(&sources, &[]);
    assert_eq!(repo.pattern(&id("dup")).unwrap().name, "first");
    assert_eq!(diags.iter().map(|d| d.code).collect::<Vec<_>>(), ["C0101"]);
}

#[test]
fn bundle_problems_are_diagnosed() {
    let bundles = vec![
        (PathBuf::from("bundles/hi.bundle"), "@locale te\na = b\n".to_string()),
        (PathBuf::from("bundles/gu.bundle"), "not a bundle".to_string()),
    ];
    let inline = vec![(PathBuf::from("x.poid"), "bundle te {\n  @a = \"c\"\n}\n".to_string())];
    let (_, diags) = Repository::from_sources(&inline, &bundles);
    let mut codes: Vec<_> = diags.iter().map(|d| d.code).collect();
    codes.sort();
    assert_eq!(codes, ["C0102", "C0103", "C0104"]);
}

#[test]
fn promotion_is_persisted() {
    let dir = tempfile::tempdir().unwrap();
    fixture::write_corpus(dir.path()).unwrap();
    let extra = "pattern echo-reading : Process {\n  name \"Echo reading\"\n  lifecycle Specified\n  intent \"Learners repeat after the teacher\"\n  context \"Early reading\"\n  problem \"Decoding is slow\"\n  solution {\n    text \"Read a line, learners echo it\"\n  }\n}\n";
    std::fs::write(dir.path().join("patterns/echo.poid"), extra).unwrap();
    let (mut repo, diags) = Repository::load(dir.path()).unwrap();
    assert!(diags.is_empty(), "{diags:#?}");
    let p = repo.promote(&id("echo-reading"), LifecycleState::Validated).unwrap();
    assert_eq!(p.lifecycle, LifecycleState::Validated);
    assert!(matches!(
        repo.promote(&id("echo-reading"), LifecycleState::Maintained),
        Err(RepoError::IllegalTransition(_))
    ));
    let (reloaded, _) = Repository::load(dir.path()).unwrap();
    assert_eq!(reloaded.pattern(&id("echo-reading")).unwrap().lifecycle, LifecycleState::Validated);
    assert_eq!(reloaded.pattern(&id("echo-reading")).unwrap().name, "Echo reading");
}

#[test]
fn promotion_gate_blocks_dangling_relations() {
    let src = "pattern lonely : Process {\n  name \"Lonely\"\n  lifecycle Specified\n  intent \"i\"\n  context \"c\"\n  problem \"p\"\n  related uses nobody-here\n  solution {\n    text \"t\"\n  }\n}\n";
    let (mut repo, _) = Repository::from_sources(&[(PathBuf::from("l.poid"), src.to_string())], &[]);
    match repo.promote(&id("lonely"), LifecycleState::Validated) {
        Err(RepoError::GateFailed(f)) => assert!(f.iter().any(|f| f.rule_id == "C6"), "{f:?}"),
        other => panic!("{other:?}"),
    }
    assert_eq!(repo.pattern(&id("lonely")).unwrap().lifecycle, LifecycleState::Specified);
}

#[test]
fn save_and_relocate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut repo = fixture::repository();
    repo.relocate(dir.path());
    repo.save().unwrap();
    let (back, diags) = Repository::load(dir.path()).unwrap();
    assert!(diags.is_empty(), "{diags:#?}");
    assert_eq!(back.index(), repo.index());
    for (rel, text) in fixture::FILES {
        let saved = std::fs::read_to_string(dir.path().join(rel)).unwrap();
        if rel.ends_with(".bundle") {
            // bundles are rewritten sorted and without comments
            assert_eq!(LocaleBundle::parse(&saved).unwrap(), LocaleBundle::parse(text).unwrap(), "{rel}");
        } else {
            assert_eq!(saved, text, "{rel}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn incremental_index_equals_rebuilt(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut repo = fixture::repository();
        for _ in 0..r.gen_range(1..20) {
            match r.gen_range(0..3) {
                0 => {
                    let p = gen::pattern(&mut r);
                    repo.upsert(p, Path::new("gen.poid"));
                }
                1 => {
                    if let Some(victim) = repo.patterns().map(|p| p.id.clone()).choose(&mut r) {
                        repo.remove(&victim);
                    }
                }
                _ => {
                    if let Some(mut p) = repo.patterns().choose(&mut r).cloned() {
                        p.name = gen::any_string(&mut r);
                        p.keywords.push(gen::non_empty_string(&mut r));
                        repo.upsert(p, Path::new("ignored.poid"));
                    }
                }
            }
        }
        let mut rebuilt = repo.clone();
        rebuilt.rebuild_index();
        prop_assert_eq!(repo.index(), rebuilt.index());
    }
}
