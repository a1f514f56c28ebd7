use poid_core::codegen::CoursePackage;
use poid_testkit::fixture;
use poid_web::{build, format, variants, SAMPLE_BUNDLE, SAMPLE_SOURCE};

#[test]
fn sample_matches_fixture() {
    for (path, text) in fixture::sources() {
        assert!(SAMPLE_SOURCE.contains(text.trim_end()), "{} missing from sample", path.display());
    }
    let hi = fixture::FILES.iter().find(|(p, _)| *p == "bundles/hi.bundle").unwrap().1;
    assert_eq!(SAMPLE_BUNDLE, hi);
}

#[test]
fn sample_is_canonical() {
    assert_eq!(format(SAMPLE_SOURCE).unwrap(), SAMPLE_SOURCE);
}

#[test]
fn format_reports_errors() {
    let err = format("pattern x : {").unwrap_err();
    assert!(err.contains("error[P0"), "{err}");
    assert_eq!(
        format("pattern   x : Context {name \"X\"}").unwrap(),
        format(&format("pattern x : Context { name \"X\" }").unwrap()).unwrap()
    );
}

#[test]
fn sample_has_four_variants() {
    let v: serde_json::Value = serde_json::from_str(&variants(SAMPLE_SOURCE).unwrap()).unwrap();
    assert_eq!(v["count"], 4);
    assert_eq!(v["variants"].as_array().unwrap().len(), 4);
    assert_eq!(v["composition"], fixture::COMPOSITION);
}

#[test]
fn sample_builds_like_the_cli() {
    let json = build(SAMPLE_SOURCE, SAMPLE_BUNDLE, 0).unwrap();
    let pkg = CoursePackage::from_bytes(json.as_bytes()).unwrap();
    let expected = poid_core::codegen::emit_package(&fixture::design(0, "hi"), &Default::default()).unwrap();
    assert_eq!(json.as_bytes(), expected.as_slice());
    assert_eq!(pkg.lesson.plays[0].acts.len(), fixture::VARIANT0_SHAPE.acts.len());
    assert!(build(SAMPLE_SOURCE, SAMPLE_BUNDLE, 4).is_err());
}

#[test]
fn needs_exactly_one_composition() {
    let err = variants("pattern x : Context {\n  name \"X\"\n}\n").unwrap_err();
    assert!(err.contains("no `compose`"), "{err}");
}
