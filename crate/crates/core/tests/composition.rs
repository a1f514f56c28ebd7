use proptest::prelude::*;

use poid_core::composition::*;
use poid_core::locale::LocaleTag;
use poid_core::pattern::PatternId;
use poid_testkit::fixture::{self, VARIANT0_SHAPE, WORD_FORMATION_ACT};
use poid_testkit::rng;
use poid_testkit::tree::{brute_force, random_tree, Pick};

const CAP: usize = 10_000;

fn check_against_oracle(seed: u64) -> bool {
    let tree = random_tree(&mut rng(seed), 12);
    let Some(expected) = brute_force(&tree, CAP) else { return false };
    assert_eq!(count_variants(&tree).unwrap(), expected.len() as u64, "seed {seed}: {tree:?}");
    let got: Vec<Pick> =
        enumerate_variants(&tree, CAP as u64).unwrap().iter().map(|v| Pick::from_variant(&v.tree)).collect();
    assert_eq!(got, expected, "seed {seed}: {tree:?}");
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn enumeration_matches_brute_force(seed in any::<u64>()) {
        check_against_oracle(seed);
    }

    #[test]
    fn indexed_access_matches_enumeration(seed in any::<u64>()) {
        let tree = random_tree(&mut rng(seed), 12);
        // nested repeats can exceed u64; the oracle test covers that path
        let Ok(space) = VariantSpace::new(&tree) else { return Ok(()) };
        prop_assume!(space.count() <= 2_000);
        let all = space.enumerate(u64::MAX).unwrap();
        for (i, v) in all.iter().enumerate() {
            prop_assert_eq!(v.index, i as u64);
            prop_assert_eq!(&space.get(i as u64).unwrap(), v);
        }
        prop_assert!(space.get(space.count()).is_err());
    }
}

#[test]
fn limit_is_enforced_and_order_is_stable() {
    let a = |n: &str| CompositionNode::leaf(PatternId::new(n).unwrap());
    let tree = CompositionNode::rep(CompositionNode::Alt(vec![a("x"), a("y"), a("z")]), 2, 2);
    let all = enumerate_variants(&tree, 100).unwrap();
    assert_eq!(all.len(), 9);
    assert!(matches!(enumerate_variants(&tree, 4), Err(VariantError::LimitExceeded { count: 9, limit: 4 })));
    let space = VariantSpace::new(&tree).unwrap();
    assert_eq!(space.get(3).unwrap(), all[3]);
    assert_eq!(all[1].summary(), "x y");
}

#[test]
fn huge_spaces_overflow_cleanly() {
    let a = |n: &str| CompositionNode::leaf(PatternId::new(n).unwrap());
    let wide = CompositionNode::Alt((0..16).map(|i| a(&format!("p{i}"))).collect());
    let deep = CompositionNode::Seq(vec![CompositionNode::rep(wide, 16, 16); 2]);
    assert!(matches!(count_variants(&deep), Err(VariantError::Overflow)));
}

#[test]
fn fixture_has_four_variants() {
    let repo = fixture::repository();
    let comp = repo.composition(&PatternId::new(fixture::COMPOSITION).unwrap()).unwrap();
    let graph = resolve(comp, &repo).unwrap();
    let space = graph.variant_space().unwrap();
    assert_eq!(space.count(), 4);
    let summaries: Vec<_> = space.enumerate(10).unwrap().iter().map(Variant::summary).collect();
    assert_eq!(summaries[0], "ipcl-goals syllable-content pasi-lesson word-quiz",);
}

#[test]
fn variant_zero_has_the_expected_shape() {
    let d = fixture::design(0, "hi");
    let shape = VARIANT0_SHAPE;
    assert_eq!(d.lesson.plays.len(), shape.plays);
    let acts: Vec<Vec<usize>> =
        d.lesson.acts().map(|a| a.scenes.iter().map(|s| s.instructions.len()).collect()).collect();
    let want: Vec<Vec<usize>> = shape.acts.iter().map(|a| a.to_vec()).collect();
    assert_eq!(acts, want);
    assert_eq!(d.goals.len(), shape.goals);
    assert_eq!(d.content.len(), shape.content);
    assert_eq!(d.evaluations.len(), shape.evaluations);
    let act4 = d.lesson.acts().nth(WORD_FORMATION_ACT).unwrap();
    assert_eq!(act4.scenes.len(), 2);
}

#[test]
fn params_are_interpolated() {
    let d = fixture::design(0, "te");
    assert!(d.lesson.instructions().any(|i| i.text.value == "Say 3 familiar words aloud"));
    assert!(d.lesson.instructions().all(|i| !i.text.value.contains('{')));
}

#[test]
fn locales_differ_only_in_localized_text() {
    let hi = fixture::design(0, "hi");
    for loc in ["te", "gu"] {
        let other = fixture::design(0, loc);
        assert_ne!(hi, other);
        assert_eq!(hi.erase_localized(), other.erase_localized(), "{loc}");
    }
}

#[test]
fn missing_key_is_reported() {
    let repo = fixture::repository();
    let comp = repo.composition(&PatternId::new(fixture::COMPOSITION).unwrap()).unwrap();
    let variant = resolve(comp, &repo).unwrap().pick(0).unwrap();
    let mut bundle = repo.bundle(&LocaleTag::new("hi").unwrap()).unwrap().clone();
    bundle.entries.remove("act4.scene2.word1");
    match instantiate(&variant, &bundle) {
        Err(InstantiateError::MissingKey { key, .. }) => assert_eq!(key, "act4.scene2.word1"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn keys_only_needs_no_bundle() {
    let repo = fixture::repository();
    let comp = repo.composition(&PatternId::new(fixture::COMPOSITION).unwrap()).unwrap();
    let variant = resolve(comp, &repo).unwrap().pick(3).unwrap();
    let tag = LocaleTag::new("xx").unwrap();
    let d = instantiate_with(&variant, Strings::KeysOnly(&tag)).unwrap();
    assert_eq!(d.erase_localized(), fixture::design(3, "gu").erase_localized());
}
