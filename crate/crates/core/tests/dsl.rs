use std::path::Path;

use proptest::prelude::*;

use poid_core::dsl::{has_errors, is_valid_code, parse_file, print_canonical, tokenize_all, DeclKind};
use poid_testkit::{fixture, fuzz, gen, rng};

fn roundtrip(seed: u64) {
    let path = Path::new("gen.poid");
    let ast = gen::ast(&mut rng(seed), path);
    let text = print_canonical(&ast).expect("generated trees print");
    let (back, diags) = parse_file(&text, path);
    assert!(!has_errors(&diags), "seed {seed}: {diags:#?}\n{text}");
    assert_eq!(back, ast, "seed {seed}:\n{text}");
    assert_eq!(print_canonical(&back).unwrap(), text, "seed {seed}: printing is not a fixpoint");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        roundtrip(seed);
    }

    #[test]
    fn tokens_cover_the_input(seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = fixture::FILES[seed as usize % fixture::FILES.len()].1;
        let text = fuzz::mutate(&mut r, base);
        let (tokens, _) = tokenize_all(&text);
        let joined: String = tokens.iter().map(|t| t.text(&text)).collect();
        prop_assert_eq!(joined, text);
    }

    #[test]
    fn mutated_input_never_panics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = fixture::FILES[seed as usize % fixture::FILES.len()].1;
        let text = if seed % 4 == 0 { fuzz::noise(&mut r) } else { fuzz::mutate(&mut r, base) };
        let (ast, diags) = parse_file(&text, Path::new("fuzz.poid"));
        for d in &diags {
            prop_assert!(is_valid_code(d.code), "{}", d.code);
        }
        if ast.has_error_nodes() {
            prop_assert!(has_errors(&diags));
        }
    }
}

#[test]
fn fixture_files_are_canonical() {
    for (path, text) in fixture::sources() {
        let (ast, diags) = parse_file(&text, &path);
        assert!(diags.is_empty(), "{}: {diags:#?}", path.display());
        assert_eq!(print_canonical(&ast).unwrap(), text, "{} is not in canonical form", path.display());
    }
}

#[test]
fn comments_survive_formatting() {
    let text = "// lead\npattern a-b : Goals {\n}\n// tail\n";
    let (ast, _) = parse_file(text, Path::new("c.poid"));
    assert_eq!(ast.decls[0].comments, ["lead"]);
    assert_eq!(ast.trailing_comments, ["tail"]);
    let out = print_canonical(&ast).unwrap();
    assert!(out.starts_with("// lead\n") && out.ends_with("// tail\n"), "{out}");
}

#[test]
fn recovery_keeps_later_declarations() {
    let text = "pattern broken : Nope { }\npattern ok-one : Goals { name \"x\" }\n";
    let (ast, diags) = parse_file(text, Path::new("r.poid"));
    assert!(has_errors(&diags));
    assert!(ast.decls.iter().any(|d| matches!(&d.kind, DeclKind::Pattern(p) if p.id.as_str() == "ok-one")));
}
