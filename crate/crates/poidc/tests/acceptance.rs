//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every threshold is fixed here.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::Value;

use poid_core::codegen::{diff_packages, flatten, localized_paths, CoursePackage, PACKAGE_FILE};
use poid_core::composition::{count_variants, enumerate_variants};
use poid_core::dsl::{has_errors, is_valid_code, parse_file, print_canonical};
use poid_core::taxonomy::{bloom_compare, BloomLevel, ContentLevel, MappingTable};
use poid_core::validation::{mutation_harness, MutationKind};
use poid_testkit::tree::{brute_force, random_tree, Pick};
use poid_testkit::{fixture, fuzz, gen, rng};
use poidc::{build, BuildOptions, Exit, MANIFEST_FILE};

const ROUNDTRIP_FILES: u64 = 1_000;
const ROUNDTRIP_BUDGET: Duration = Duration::from_secs(30);
const FUZZ_INPUTS: u64 = 1_000_000;
const FUZZ_PER_INPUT: Duration = Duration::from_millis(100);
const ORACLE_TREES: usize = 500;
const ORACLE_MAX_NODES: usize = 12;
const ORACLE_MAX_COUNT: usize = 10_000;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const MUTANTS: usize = 200;
const BUILD_BUDGET: Duration = Duration::from_secs(5);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn roundtrip() -> Outcome {
    let start = Instant::now();
    let path = Path::new("gen.poid");
    let mut decls = 0;
    for seed in 0..ROUNDTRIP_FILES {
        let ast = gen::ast(&mut rng(seed), path);
        decls += ast.decls.len();
        let first = print_canonical(&ast).map_err(|e| format!("seed {seed}: {e}"))?;
        let (parsed, diags) = parse_file(&first, path);
        ensure(!has_errors(&diags), || format!("seed {seed}: printed text does not parse: {:?}", diags.first()))?;
        ensure(parsed == ast, || format!("seed {seed}: parse(print(ast)) != ast"))?;
        let second = print_canonical(&parsed).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(second == first, || format!("seed {seed}: print is not byte-idempotent"))?;
        let (again, _) = parse_file(&second, path);
        ensure(again == parsed, || format!("seed {seed}: second parse differs"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ROUNDTRIP_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{ROUNDTRIP_FILES} files, {decls} declarations, {elapsed:.2?}"))
}

fn fuzz_input(seed: u64, bases: &[String]) -> String {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    match seed % 8 {
        0 => fuzz::noise(&mut r),
        _ => fuzz::mutate(&mut r, &bases[(seed / 8) as usize % bases.len()]),
    }
}

fn totality() -> Outcome {
    let start = Instant::now();
    let mut bases: Vec<String> = fixture::sources().into_iter().map(|(_, t)| t).collect();
    for seed in 0..32 {
        if let Ok(text) = print_canonical(&gen::ast(&mut rng(seed), Path::new("g.poid"))) {
            bases.push(text);
        }
    }
    let path = Path::new("fuzz.poid");
    let (worst, failures, diagnosed) = (0..FUZZ_INPUTS)
        .into_par_iter()
        .map(|seed| {
            let text = fuzz_input(seed, &bases);
            if text.len() > fuzz::MAX_LEN {
                return (Duration::ZERO, Some(format!("seed {seed}: input of {} bytes", text.len())), 0u64);
            }
            let t = Instant::now();
            let result = catch_unwind(AssertUnwindSafe(|| parse_file(&text, path)));
            let took = t.elapsed();
            let problem = match &result {
                Err(_) => Some(format!("seed {seed}: parser panicked")),
                Ok((_, diags)) => {
                    diags.iter().find(|d| !is_valid_code(d.code)).map(|d| format!("seed {seed}: bad code {}", d.code))
                }
            };
            let problem = problem.or_else(|| (took > FUZZ_PER_INPUT).then(|| format!("seed {seed}: took {took:?}")));
            let diagnosed = matches!(&result, Ok((_, d)) if !d.is_empty()) as u64;
            (took, problem, diagnosed)
        })
        .fold(
            || (Duration::ZERO, Vec::new(), 0u64),
            |(w, mut f, n), (t, p, d)| {
                f.extend(p);
                (w.max(t), f, n + d)
            },
        )
        .reduce(
            || (Duration::ZERO, Vec::new(), 0u64),
            |(w1, mut f1, n1), (w2, f2, n2)| {
                f1.extend(f2);
                (w1.max(w2), f1, n1 + n2)
            },
        );
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok(format!(
        "{FUZZ_INPUTS} inputs, {diagnosed} with diagnostics, slowest {worst:.2?}, total {:.1?}",
        start.elapsed()
    ))
}

fn variant_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut seed = 0u64;
    let mut total = 0usize;
    while checked < ORACLE_TREES {
        seed += 1;
        let tree = random_tree(&mut rng(seed), ORACLE_MAX_NODES);
        ensure(tree.node_count() <= ORACLE_MAX_NODES, || format!("seed {seed}: generator exceeded node bound"))?;
        let Some(expected) = brute_force(&tree, ORACLE_MAX_COUNT) else { continue };
        let count = count_variants(&tree).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(count == expected.len() as u64, || format!("seed {seed}: count {count}, oracle {}", expected.len()))?;
        let got: Vec<Pick> = enumerate_variants(&tree, ORACLE_MAX_COUNT as u64)
            .map_err(|e| format!("seed {seed}: {e}"))?
            .iter()
            .map(|v| Pick::from_variant(&v.tree))
            .collect();
        // same multiset, and in fact the same order
        let mut a = format_all(&got);
        let mut b = format_all(&expected);
        ensure(a == b, || format!("seed {seed}: enumeration order differs from oracle"))?;
        a.sort();
        b.sort();
        ensure(a == b, || format!("seed {seed}: enumeration differs from oracle"))?;
        checked += 1;
        total += expected.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ORACLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} trees, {total} variants, {elapsed:.2?}"))
}

fn format_all(picks: &[Pick]) -> Vec<String> {
    picks.iter().map(|p| format!("{p:?}")).collect()
}

fn mutation_score() -> Outcome {
    let seed = fixture::design(0, "hi");
    let score = mutation_harness(&seed, MUTANTS, 2024).map_err(|e| e.to_string())?;
    ensure(score.mutants.len() == MUTANTS, || format!("{} mutants", score.mutants.len()))?;
    let expected = [
        (MutationKind::DropProcessGoalRef, "V1"),
        (MutationKind::DropEvaluationGoalRef, "V2"),
        (MutationKind::AddConflict, "V3"),
        (MutationKind::AddCycle, "V4"),
        (MutationKind::InvertLadder, "V5"),
        (MutationKind::DropActivation, "V6"),
        (MutationKind::UnwirePort, "V7"),
    ];
    for (kind, rule) in expected {
        ensure(kind.expected_rule() == rule, || format!("{kind:?} maps to {}", kind.expected_rule()))?;
    }
    for m in &score.mutants {
        ensure(m.exact(), || format!("{:?} on {} fired {:?}", m.kind, m.target, m.fired))?;
    }
    let kinds: BTreeSet<_> = score.mutants.iter().map(|m| m.kind).collect();
    ensure(kinds.len() == expected.len(), || format!("only {} mutation kinds drawn", kinds.len()))?;
    Ok(format!(
        "{}/{MUTANTS} detected by exactly the intended rule, {} kinds",
        score.mutants.iter().filter(|m| m.exact()).count(),
        kinds.len()
    ))
}

struct Corpus {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

fn corpus() -> Corpus {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path().join("repo");
    fixture::write_corpus(&root).expect("corpus written");
    Corpus { _dir: dir, root }
}

fn run_build(root: &Path, locale: &str, out: &Path) -> Result<Vec<u8>, String> {
    let opts =
        BuildOptions { pick: 0, locale: locale.into(), out: out.to_path_buf(), mapping: MappingTable::default() };
    let (mut so, mut se) = (Vec::new(), Vec::new());
    match build(root, fixture::COMPOSITION, &opts, &mut so, &mut se) {
        Ok(Exit::Success) => std::fs::read(out.join(PACKAGE_FILE)).map_err(|e| e.to_string()),
        other => Err(format!("build {locale}: {other:?}\n{}", String::from_utf8_lossy(&se))),
    }
}

fn desk_reproduction() -> Outcome {
    let c = corpus();
    let out = c.root.parent().unwrap().join("out-desk");
    let start = Instant::now();
    let bytes = run_build(&c.root, "hi", &out)?;
    let elapsed = start.elapsed();
    let pkg = CoursePackage::from_bytes(&bytes).map_err(|e| e.to_string())?;
    let shape = fixture::VARIANT0_SHAPE;
    ensure(pkg.lesson.plays.len() == shape.plays, || format!("{} plays", pkg.lesson.plays.len()))?;
    let acts = &pkg.lesson.plays[0].acts;
    let got: Vec<Vec<usize>> = acts.iter().map(|a| a.scenes.iter().map(|s| s.instructions.len()).collect()).collect();
    let want: Vec<Vec<usize>> = shape.acts.iter().map(|a| a.to_vec()).collect();
    ensure(got == want, || format!("tree shape {got:?}, expected {want:?}"))?;
    ensure(acts.iter().all(|a| !a.goal_refs.is_empty()), || "an act has no goals".into())?;
    let act4 = &acts[fixture::WORD_FORMATION_ACT];
    ensure(act4.scenes.len() == 2, || format!("Act4 has {} scenes", act4.scenes.len()))?;
    let counts = (pkg.goals.len(), pkg.content.len(), pkg.evaluations.len());
    ensure(counts == (shape.goals, shape.content, shape.evaluations), || {
        format!("goals/content/evaluations {counts:?}")
    })?;
    ensure(elapsed < BUILD_BUDGET, || format!("build took {elapsed:?}"))?;
    Ok(format!(
        "{} acts, Act4 with 2 scenes, {} instructions, build {elapsed:.2?}",
        acts.len(),
        pkg.instruction_count()
    ))
}

fn locale_variants() -> Outcome {
    let c = corpus();
    let base = c.root.parent().unwrap();
    let locales = fixture::LOCALES;
    let packages: Vec<Vec<u8>> =
        locales.iter().map(|l| run_build(&c.root, l, &base.join(format!("out-{l}")))).collect::<Result<_, _>>()?;
    let localized = localized_paths(&fixture::design(0, locales[0]));
    let structural = |bytes: &[u8]| -> Result<Vec<(String, Value)>, String> {
        let v: Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        Ok(flatten(&v)
            .into_iter()
            .filter(|(k, _)| !localized.contains(k) && !k.starts_with("manifest.contentHash"))
            .collect())
    };
    let mut touched = BTreeSet::new();
    for i in 0..packages.len() {
        for j in i + 1..packages.len() {
            let diff = diff_packages(&packages[i], &packages[j]).map_err(|e| e.to_string())?;
            ensure(!diff.is_empty(), || format!("{} and {} are identical", locales[i], locales[j]))?;
            for p in diff.paths() {
                ensure(localized.contains(p), || {
                    format!("{}/{}: non-localized path `{p}` differs", locales[i], locales[j])
                })?;
                touched.insert(p.to_string());
            }
            ensure(structural(&packages[i])? == structural(&packages[j])?, || {
                format!("{}/{}: structural diff is not empty", locales[i], locales[j])
            })?;
        }
    }
    Ok(format!("{} packages, {} localized paths differ, structural diff empty", packages.len(), touched.len()))
}

fn determinism() -> Outcome {
    let c = corpus();
    let base = c.root.parent().unwrap();
    let (a, b) = (base.join("out-a"), base.join("out-b"));
    let pa = run_build(&c.root, "te", &a)?;
    let pb = run_build(&c.root, "te", &b)?;
    ensure(pa == pb, || "course.package.json differs between builds".into())?;
    let ma = std::fs::read(a.join(MANIFEST_FILE)).map_err(|e| e.to_string())?;
    let mb = std::fs::read(b.join(MANIFEST_FILE)).map_err(|e| e.to_string())?;
    ensure(ma == mb, || "HTML manifest differs between builds".into())?;
    let files =
        serde_json::from_slice::<Value>(&ma).map_err(|e| e.to_string())?["files"].as_array().map_or(0, Vec::len);
    Ok(format!("{} package bytes identical, {files} html hashes identical", pa.len()))
}

fn bloom_invariants() -> Outcome {
    // cognitive levels from simple to complex, as listed in the source text
    let order = ["Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"];
    let levels: Vec<BloomLevel> = order.iter().map(|s| s.parse().unwrap()).collect();
    let mut pairs = 0;
    for (i, a) in levels.iter().enumerate() {
        for (j, b) in levels.iter().enumerate() {
            pairs += 1;
            let c = bloom_compare(*a, *b);
            ensure(c == i.cmp(&j), || format!("{a} vs {b}: {c:?}"))?;
            ensure(c.reverse() == bloom_compare(*b, *a), || format!("{a} vs {b} not antisymmetric"))?;
            for c2 in &levels {
                if bloom_compare(*a, *b).is_le() && bloom_compare(*b, *c2).is_le() {
                    ensure(bloom_compare(*a, *c2).is_le(), || format!("{a} <= {b} <= {c2} not transitive"))?;
                }
            }
        }
    }
    ensure(pairs == 36, || format!("{pairs} pairs"))?;
    let table = MappingTable::default();
    let rank = |b: BloomLevel| levels.iter().position(|l| *l == b).unwrap();
    let ladder = ["Fact", "Case", "Rule", "Model", "Theory"].map(|s| s.parse::<ContentLevel>().unwrap());
    for w in ladder.windows(2) {
        let (lo, hi) = (table.get(w[0]).0, table.get(w[1]).0);
        ensure(rank(lo) <= rank(hi), || format!("{} -> {lo} but {} -> {hi}", w[0], w[1]))?;
    }
    ensure(table.is_monotone(), || "is_monotone disagrees".into())?;
    Ok(format!("{pairs} pairs totally ordered, mapping monotone over {} levels", ladder.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("parser round-trip", roundtrip),
        ("parser totality", totality),
        ("variant oracle", variant_oracle),
        ("validator mutation score", mutation_score),
        ("adult-literacy lesson build", desk_reproduction),
        ("three-locale packages", locale_variants),
        ("build determinism", determinism),
        ("bloom and ladder invariants", bloom_invariants),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
