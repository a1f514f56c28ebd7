use std::collections::BTreeSet;

use serde_json::Value;
use sha2::{Digest, Sha256};

use poid_core::codegen::*;
use poid_core::taxonomy::{bloom_compare, BloomLevel, ContentLevel, KnowledgeDimension, MappingTable};
use poid_testkit::fixture::{self, VARIANT0_SHAPE, WORD_FORMATION_ACT};

fn package(index: u64, locale: &str) -> Vec<u8> {
    emit_package(&fixture::design(index, locale), &MappingTable::default()).unwrap()
}

#[test]
fn bytes_are_deterministic() {
    assert_eq!(package(0, "hi"), package(0, "hi"));
    assert_eq!(package(2, "gu"), package(2, "gu"));
}

#[test]
fn hash_matches_an_independent_digest() {
    let bytes = package(0, "te");
    let mut v: Value = serde_json::from_slice(&bytes).unwrap();
    let stored = v["manifest"]["contentHash"].as_str().unwrap().to_string();
    v["manifest"].as_object_mut().unwrap().remove("contentHash");
    let digest = Sha256::digest(serde_json::to_string(&v).unwrap().as_bytes());
    assert_eq!(stored, hex::encode(digest));
    assert_eq!(stored.len(), 64);
}

#[test]
fn bytes_reload_unchanged() {
    let bytes = package(1, "hi");
    let pkg = CoursePackage::from_bytes(&bytes).unwrap();
    assert_eq!(pkg.to_bytes(), bytes);
    assert!(bytes.ends_with(b"}\n"));
    assert_eq!(pkg.manifest.format_version, "1.0");
}

#[test]
fn tampering_is_detected() {
    let bytes = package(0, "hi");
    let text = String::from_utf8(bytes).unwrap().replacen("Remember", "Create", 1);
    assert!(matches!(CoursePackage::from_bytes(text.as_bytes()), Err(CodegenError::HashMismatch { .. })));
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["manifest"]["formatVersion"] = "9.9".into();
    let bumped = serde_json::to_vec(&v).unwrap();
    assert!(matches!(CoursePackage::from_bytes(&bumped), Err(CodegenError::UnsupportedVersion(_))));
}

#[test]
fn package_shape_matches_the_lesson() {
    let pkg = CoursePackage::from_bytes(&package(0, "hi")).unwrap();
    let shape = VARIANT0_SHAPE;
    assert_eq!(pkg.lesson.plays.len(), shape.plays);
    let acts: Vec<Vec<usize>> =
        pkg.lesson.plays[0].acts.iter().map(|a| a.scenes.iter().map(|s| s.instructions.len()).collect()).collect();
    let want: Vec<Vec<usize>> = shape.acts.iter().map(|a| a.to_vec()).collect();
    assert_eq!(acts, want);
    assert_eq!(pkg.lesson.plays[0].acts[WORD_FORMATION_ACT].scenes.len(), 2);
    assert_eq!(
        (pkg.goals.len(), pkg.content.len(), pkg.evaluations.len()),
        (shape.goals, shape.content, shape.evaluations)
    );
    assert!(pkg.dangling_refs().is_empty());
}

#[test]
fn locale_packages_differ_only_on_localized_paths() {
    let hi = package(0, "hi");
    let localized = localized_paths(&fixture::design(0, "hi"));
    for loc in ["te", "gu"] {
        let other = package(0, loc);
        let diff = diff_packages(&hi, &other).unwrap();
        assert!(!diff.is_empty());
        let touched: BTreeSet<&str> = diff.paths().collect();
        for p in &touched {
            assert!(localized.contains(*p), "{loc}: `{p}` is not a localized path");
        }
        // strip localized leaves and compare the rest directly
        let strip = |b: &[u8]| {
            let mut flat = flatten(&serde_json::from_slice::<Value>(b).unwrap());
            flat.retain(|k, _| !localized.contains(k) && k != "manifest.contentHash");
            flat
        };
        assert_eq!(strip(&hi), strip(&other), "{loc}");
    }
    assert!(diff_packages(&hi, &hi).unwrap().is_empty());
}

#[test]
fn diff_sees_structural_changes() {
    let a = package(0, "hi");
    let b = package(2, "hi");
    let diff = diff_packages(&a, &b).unwrap();
    assert!(diff.paths().any(|p| p.starts_with("lesson.plays[0].acts[5]")), "{:?}", diff.paths().collect::<Vec<_>>());
}

#[test]
fn html_has_one_page_per_act() {
    let bytes = package(0, "gu");
    let files = render_html(&bytes).unwrap();
    let acts: usize = VARIANT0_SHAPE.acts.len();
    assert_eq!(files.len(), acts + 2, "{:?}", files.keys().collect::<Vec<_>>());
    assert!(files.contains_key("index.html") && files.contains_key("assets/style.css"));
    for a in 1..=acts {
        let page = &files[&format!("play-1/act-{a}.html")];
        assert!(page.contains("lang=\"gu\""));
        assert!(page.contains("../assets/style.css"));
    }
    assert!(files["play-1/act-1.html"].contains("act-2.html"));
}

#[test]
fn html_manifest_is_deterministic() {
    let bytes = package(0, "hi");
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let m1 = emit_html(&bytes, d1.path()).unwrap();
    let m2 = emit_html(&bytes, d2.path()).unwrap();
    assert_eq!(m1, m2);
    for f in &m1.files {
        let on_disk = std::fs::read(d1.path().join(&f.path)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&on_disk)), f.sha256);
        assert_eq!(on_disk.len() as u64, f.bytes);
    }
}

#[test]
fn gate_blocks_error_designs() {
    let mut d = fixture::design(0, "hi");
    d.evaluations.clear();
    match emit_package(&d, &MappingTable::default()) {
        Err(CodegenError::ValidationGate(f)) => assert!(f.iter().all(|f| f.rule_id == "V2")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bloom_order_is_total_over_all_pairs() {
    let mut pairs = 0;
    for (i, a) in BloomLevel::ALL.iter().enumerate() {
        for (j, b) in BloomLevel::ALL.iter().enumerate() {
            assert_eq!(bloom_compare(*a, *b), i.cmp(&j));
            assert_eq!(bloom_compare(*a, *b), bloom_compare(*b, *a).reverse());
            pairs += 1;
        }
    }
    assert_eq!(pairs, 36);
}

#[test]
fn default_mapping_is_monotone_and_exported() {
    let table = MappingTable::default();
    assert!(table.is_monotone());
    let rank = |b: BloomLevel| BloomLevel::ALL.iter().position(|x| *x == b).unwrap();
    for w in ContentLevel::ALL.windows(2) {
        assert!(rank(table.get(w[0]).0) <= rank(table.get(w[1]).0));
    }
    let pkg = CoursePackage::from_bytes(&package(0, "hi")).unwrap();
    assert_eq!(pkg.bloom_map.len(), ContentLevel::ALL.len());
    for (level, cell) in &pkg.bloom_map {
        assert_eq!((cell.bloom, cell.knowledge), table.get(*level));
    }
    let flat = MappingTable::constant(BloomLevel::Apply, KnowledgeDimension::Procedural);
    assert!(flat.is_monotone());
    let mut bad = table.clone();
    bad.set(ContentLevel::Theory, BloomLevel::Remember, KnowledgeDimension::Factual);
    assert!(!bad.is_monotone());
}
