use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use poid_testkit::fixture;

fn poidc(args: &[&str], cwd: &Path, config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_poidc"));
    cmd.args(args).current_dir(cwd).env_remove("POIDC_CONFIG");
    if let Some(c) = config {
        cmd.env("POIDC_CONFIG", c);
    }
    cmd.output().expect("poidc runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("repo");
    fixture::write_corpus(&root).unwrap();
    (dir, root)
}

#[test]
fn fmt_check_modes() {
    let (_d, root) = corpus();
    let o = poidc(&["fmt", "--check", "."], &root, None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let messy = root.join("patterns/messy.poid");
    std::fs::write(&messy, "pattern   messy : Context {name \"M\"}").unwrap();
    assert_eq!(code(&poidc(&["fmt", "--check", "patterns"], &root, None)), 1);
    let o = poidc(&["fmt", "patterns/messy.poid"], &root, None);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("formatted"));
    assert_eq!(
        std::fs::read_to_string(&messy).unwrap(),
        "pattern messy : Context {\n  name \"M\"\n  version 1.0.0\n  lifecycle Discovered\n}\n"
    );
    assert_eq!(code(&poidc(&["fmt", "--check", "."], &root, None)), 0);

    std::fs::write(&messy, "pattern messy : {").unwrap();
    let o = poidc(&["fmt", "--check", "."], &root, None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("error[P0"), "{}", stderr(&o));
}

#[test]
fn check_clean_then_seeded_error() {
    let (_d, root) = corpus();
    let o = poidc(&["check"], &root, None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("4 variant(s): 0 error(s)"), "{}", stdout(&o));

    // drop the only evaluation of g-form from both quizzes
    let eval = root.join("patterns/evaluation.poid");
    let text = std::fs::read_to_string(&eval).unwrap().replace("goal g-form", "goal g-read");
    std::fs::write(&eval, text).unwrap();
    let o = poidc(&["check"], &root, None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("V0002"), "{}", stderr(&o));
}

#[test]
fn warnings_block_only_when_denied() {
    let (_d, root) = corpus();
    let extra = "pattern draft-idea : Context {\n  name \"Draft\"\n  version 0.1.0\n  lifecycle Discovered\n}\n";
    std::fs::write(root.join("patterns/draft.poid"), extra).unwrap();
    let o = poidc(&["check"], &root, None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("warning[W0002]"), "{}", stderr(&o));
    assert_eq!(code(&poidc(&["check", "--deny-warnings"], &root, None)), 1);

    let cfg = root.parent().unwrap().join("poidc.conf");
    std::fs::write(&cfg, "# strict\ndeny_warnings = true\n").unwrap();
    assert_eq!(code(&poidc(&["check"], &root, Some(&cfg))), 1);
}

#[test]
fn check_json_report() {
    let (_d, root) = corpus();
    let o = poidc(&["check", "--json"], &root, None);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["errors"], 0);
}

#[test]
fn variants_count_pick_and_limit() {
    let (_d, root) = corpus();
    let o = poidc(&["variants", fixture::COMPOSITION, "--count-only"], &root, None);
    assert_eq!((code(&o), stdout(&o)), (0, "4\n".to_string()));
    let o = poidc(&["variants", fixture::COMPOSITION, "--pick", "3"], &root, None);
    assert_eq!(stdout(&o), "3\tipcl-goals syllable-content pasi-lesson summary-act dictation-quiz\n");
    assert_eq!(code(&poidc(&["variants", fixture::COMPOSITION, "--pick", "4"], &root, None)), 4);
    assert_eq!(stdout(&poidc(&["variants", fixture::COMPOSITION], &root, None)).lines().count(), 4);
    assert_eq!(code(&poidc(&["variants", fixture::COMPOSITION, "--limit", "3"], &root, None)), 3);

    let cfg = root.parent().unwrap().join("small.conf");
    std::fs::write(&cfg, "limit = 2\n").unwrap();
    assert_eq!(code(&poidc(&["variants", fixture::COMPOSITION], &root, Some(&cfg))), 3);
    assert_eq!(code(&poidc(&["variants", "no-such-thing"], &root, None)), 4);
}

#[test]
fn variants_of_a_small_product_line() {
    let dir = tempfile::tempdir().unwrap();
    let mut src = String::new();
    for p in ["a", "b", "c", "d"] {
        src.push_str(&format!("pattern {p} : Context {{\n  name \"{p}\"\n  lifecycle Validated\n}}\n"));
    }
    src.push_str("compose line {\n  seq {\n    ref a;\n    opt {\n      ref b;\n    }\n    alt {\n      ref c;\n      ref d;\n    }\n  }\n}\n");
    std::fs::write(dir.path().join("line.poid"), src).unwrap();
    let o = poidc(&["variants", "line", "--count-only"], dir.path(), None);
    assert_eq!(stdout(&o), "4\n", "{}", stderr(&o));
}

#[test]
fn build_writes_only_under_out() {
    let (d, root) = corpus();
    let out = d.path().join("site");
    let before: Vec<_> = walk(d.path());
    let o = poidc(
        &["build", fixture::COMPOSITION, "--locale", "gu", "--pick", "2", "--out", out.to_str().unwrap()],
        &root,
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let after: Vec<_> = walk(d.path());
    let new: Vec<_> = after.iter().filter(|p| !before.contains(p)).collect();
    assert!(new.iter().all(|p| p.starts_with(&out)), "{new:?}");
    for f in ["course.package.json", "manifest.json", "index.html", "assets/style.css", "play-1/act-6.html"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn build_failures_exit_one() {
    let (d, root) = corpus();
    let out = d.path().join("site");
    let out = out.to_str().unwrap();
    let bundle = root.join("bundles/hi.bundle");
    let text = std::fs::read_to_string(&bundle).unwrap();
    let trimmed: String =
        text.lines().filter(|l| !l.starts_with("act4.scene2.word1")).map(|l| format!("{l}\n")).collect();
    std::fs::write(&bundle, trimmed).unwrap();
    let o = poidc(&["build", fixture::COMPOSITION, "--locale", "hi", "--out", out], &root, None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("act4.scene2.word1"), "{}", stderr(&o));
    assert_eq!(code(&poidc(&["build", fixture::COMPOSITION, "--locale", "fr", "--out", out], &root, None)), 1);
    assert_eq!(code(&poidc(&["build", fixture::COMPOSITION, "--locale", "NOT A TAG", "--out", out], &root, None)), 4);
}

#[test]
fn usage_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&poidc(&["frobnicate"], dir.path(), None)), 4);
    assert_eq!(code(&poidc(&["build", "x"], dir.path(), None)), 4);
    assert_eq!(code(&poidc(&["check", "missing-dir"], dir.path(), None)), 4);
    assert_eq!(code(&poidc(&["--help"], dir.path(), None)), 0);
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "limit = lots\n").unwrap();
    assert_eq!(code(&poidc(&["check"], dir.path(), Some(&cfg))), 4);
}

fn walk(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(p) = stack.pop() {
        for e in std::fs::read_dir(&p).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path);
            }
        }
    }
    out.sort();
    out
}
