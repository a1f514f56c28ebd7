//! WebAssembly bindings for the demo page in `www/`. The plain functions
//! carry the logic so they can be tested natively; the `wasm_*` exports only
//! convert errors to strings for JavaScript.

use std::path::{Path, PathBuf};

use wasm_bindgen::prelude::*;

use poid_core::codegen::emit_package;
use poid_core::composition::{instantiate, resolve, VariantError};
use poid_core::dsl::{has_errors, parse_file, print_canonical, Diagnostic};
use poid_core::locale::LocaleBundle;
use poid_core::pattern::PatternId;
use poid_core::repository::Repository;
use poid_core::taxonomy::MappingTable;

pub const SAMPLE_SOURCE: &str = include_str!("../www/sample.poid");
pub const SAMPLE_BUNDLE: &str = include_str!("../www/sample.bundle");

/// Most variants listed on the page.
pub const LIST_LIMIT: u64 = 256;

const SOURCE_PATH: &str = "input.poid";

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

/// Canonical form of `source`, or the diagnostics that prevent it.
pub fn format(source: &str) -> Result<String, String> {
    let (ast, diags) = parse_file(source, Path::new(SOURCE_PATH));
    if has_errors(&diags) {
        return Err(render(&diags));
    }
    print_canonical(&ast).map_err(|e| e.to_string())
}

fn repository(source: &str, bundle: Option<&str>) -> Result<Repository, String> {
    let bundles = match bundle {
        Some(text) => {
            let b = LocaleBundle::parse(text).map_err(|e| e.to_string())?;
            vec![(PathBuf::from(format!("{}.bundle", b.locale)), text.to_string())]
        }
        None => Vec::new(),
    };
    let (repo, diags) = Repository::from_sources(&[(PathBuf::from(SOURCE_PATH), source.to_string())], &bundles);
    if has_errors(&diags) {
        return Err(render(&diags));
    }
    Ok(repo)
}

fn only_composition(repo: &Repository) -> Result<PatternId, String> {
    let mut ids = repo.compositions().map(|c| c.id.clone());
    match (ids.next(), ids.next()) {
        (Some(id), None) => Ok(id),
        (None, _) => Err("no `compose` block in the source".into()),
        _ => Err("more than one `compose` block; keep exactly one".into()),
    }
}

fn variant_err(e: VariantError) -> String {
    e.to_string()
}

/// Variants of the single composition in `source`, as `{count, variants:
/// [{index, summary}]}` with at most [`LIST_LIMIT`] entries listed.
pub fn variants(source: &str) -> Result<String, String> {
    let repo = repository(source, None)?;
    let id = only_composition(&repo)?;
    let comp = repo.composition(&id).expect("listed");
    let graph = resolve(comp, &repo).map_err(|e| e.to_string())?;
    let space = graph.variant_space().map_err(variant_err)?;
    let shown = space.count().min(LIST_LIMIT);
    let list: Vec<serde_json::Value> = (0..shown)
        .map(|i| space.get(i).map(|v| serde_json::json!({ "index": i, "summary": v.summary() })))
        .collect::<Result<_, _>>()
        .map_err(variant_err)?;
    Ok(serde_json::json!({ "composition": id.as_str(), "count": space.count(), "variants": list }).to_string())
}

/// The course package for variant `pick`, localized with `bundle`.
pub fn build(source: &str, bundle: &str, pick: u64) -> Result<String, String> {
    let repo = repository(source, Some(bundle))?;
    let id = only_composition(&repo)?;
    let graph = resolve(repo.composition(&id).expect("listed"), &repo).map_err(|e| e.to_string())?;
    let variant = graph.pick(pick).map_err(variant_err)?;
    let b = repo.bundles().next().expect("one bundle loaded");
    let design = instantiate(&variant, b).map_err(|e| e.to_string())?;
    let bytes = emit_package(&design, &MappingTable::default()).map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = sampleSource)]
pub fn wasm_sample_source() -> String {
    SAMPLE_SOURCE.to_string()
}

#[wasm_bindgen(js_name = sampleBundle)]
pub fn wasm_sample_bundle() -> String {
    SAMPLE_BUNDLE.to_string()
}

#[wasm_bindgen(js_name = formatSource)]
pub fn wasm_format(source: &str) -> Result<String, JsValue> {
    format(source).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = listVariants)]
pub fn wasm_variants(source: &str) -> Result<String, JsValue> {
    variants(source).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = buildPackage)]
pub fn wasm_build(source: &str, bundle: &str, pick: u32) -> Result<String, JsValue> {
    build(source, bundle, u64::from(pick)).map_err(|e| JsValue::from_str(&e))
}
