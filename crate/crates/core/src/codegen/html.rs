//! Static HTML fallback rendered from package bytes only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::package::{hash_hex, CoursePackage};
use super::CodegenError;

const STYLE: &str = "body{font-family:sans-serif;max-width:48rem;margin:2rem auto;padding:0 1rem;line-height:1.5}\n\
nav{margin:1rem 0}\nnav a{margin-right:1rem}\n.scene{border-left:3px solid #888;padding-left:1rem;margin:1rem 0}\n\
.tags{color:#555;font-size:.85em}\n.notice{font-style:italic}\n";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Every written file with its hash, in path order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FileManifest {
    pub files: Vec<FileEntry>,
}

impl FileManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn page(lang: &str, title: &str, css: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"{}\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<link rel=\"stylesheet\" href=\"{css}\">\n</head>\n<body>\n{body}</body>\n</html>\n",
        esc(lang),
        esc(title)
    )
}

fn act_path(p: usize, a: usize) -> String {
    format!("play-{}/act-{}.html", p + 1, a + 1)
}

/// Renders the bundle as `path -> file contents`. Paths are relative to the
/// output directory.
pub fn render_html(package: &[u8]) -> Result<BTreeMap<String, String>, CodegenError> {
    let pkg = CoursePackage::from_bytes(package)?;
    let lang = pkg.manifest.locale.as_str();
    let mut files = BTreeMap::new();
    files.insert("assets/style.css".to_string(), STYLE.to_string());

    let acts: Vec<(usize, usize)> =
        pkg.lesson.plays.iter().enumerate().flat_map(|(pi, p)| (0..p.acts.len()).map(move |ai| (pi, ai))).collect();

    let mut index = String::new();
    let _ = writeln!(index, "<h1>{}</h1>", esc(&pkg.manifest.package_id));
    index.push_str("<h2>Goals</h2>\n<ul>\n");
    for g in &pkg.goals {
        let _ = writeln!(
            index,
            "<li id=\"goal-{}\">{} <span class=\"tags\">{} / {}</span></li>",
            esc(&g.id),
            esc(&g.statement),
            g.bloom,
            g.knowledge
        );
    }
    index.push_str("</ul>\n<h2>Lesson</h2>\n");
    if pkg.lesson.plays.is_empty() {
        index.push_str("<p class=\"notice\">This is an empty design: the lesson has no plays.</p>\n");
    }
    for (pi, play) in pkg.lesson.plays.iter().enumerate() {
        let title = play.title.clone().unwrap_or_else(|| format!("Play {}", pi + 1));
        let _ = writeln!(index, "<h3>{}</h3>\n<ol>", esc(&title));
        for (ai, act) in play.acts.iter().enumerate() {
            let title = act.title.clone().unwrap_or_else(|| format!("Act {}", ai + 1));
            let _ = writeln!(index, "<li><a href=\"{}\">{}</a></li>", act_path(pi, ai), esc(&title));
        }
        index.push_str("</ol>\n");
    }
    if !pkg.evaluations.is_empty() {
        index.push_str("<h2>Evaluations</h2>\n<ol>\n");
        for e in &pkg.evaluations {
            let _ = write!(index, "<li id=\"eval-{}\">{}", esc(&e.id), esc(&e.prompt));
            if !e.choices.is_empty() {
                index.push_str("<ul>");
                for c in &e.choices {
                    let _ = write!(index, "<li>{}</li>", esc(c));
                }
                index.push_str("</ul>");
            }
            let _ = writeln!(index, "<details><summary>Answer</summary>{}</details></li>", esc(&e.answer_key));
        }
        index.push_str("</ol>\n");
    }
    files.insert("index.html".to_string(), page(lang, &pkg.manifest.package_id, "assets/style.css", &index));

    let content: BTreeMap<&str, &super::ContentItem> = pkg.content.iter().map(|c| (c.id.as_str(), c)).collect();
    for (n, &(pi, ai)) in acts.iter().enumerate() {
        let act = &pkg.lesson.plays[pi].acts[ai];
        let title = act.title.clone().unwrap_or_else(|| format!("Play {} Act {}", pi + 1, ai + 1));
        let mut body = String::new();
        let _ = writeln!(body, "<h1>{}</h1>", esc(&title));
        let mut nav = String::from("<nav><a href=\"../index.html\">Index</a>");
        if n > 0 {
            let (p, a) = acts[n - 1];
            let _ = write!(nav, "<a href=\"../{}\">Previous</a>", act_path(p, a));
        }
        if n + 1 < acts.len() {
            let (p, a) = acts[n + 1];
            let _ = write!(nav, "<a href=\"../{}\">Next</a>", act_path(p, a));
        }
        nav.push_str("</nav>\n");
        body.push_str(&nav);
        if !act.goal_refs.is_empty() {
            let links: Vec<_> =
                act.goal_refs.iter().map(|g| format!("<a href=\"../index.html#goal-{0}\">{0}</a>", esc(g))).collect();
            let _ = writeln!(body, "<p class=\"tags\">Goals: {}</p>", links.join(", "));
        }
        for (si, scene) in act.scenes.iter().enumerate() {
            let title = scene.title.clone().unwrap_or_else(|| format!("Scene {}", si + 1));
            let _ = writeln!(body, "<section class=\"scene\">\n<h2>{}</h2>", esc(&title));
            for id in &scene.content_refs {
                if let Some(c) = content.get(id.as_str()) {
                    let _ = writeln!(body, "<p><strong>{}</strong> {}</p>", c.level, esc(&c.body));
                }
            }
            body.push_str("<ol>\n");
            for ins in &scene.instructions {
                let _ = write!(body, "<li>{}", esc(&ins.text));
                for id in &ins.content_refs {
                    if let Some(c) = content.get(id.as_str()) {
                        let _ = write!(body, " <q>{}</q>", esc(&c.body));
                    }
                }
                let mut tags: Vec<String> = ins.principles.iter().map(|p| p.to_string()).collect();
                if let Some(phase) = ins.sub_cycle {
                    tags.push(phase.to_string());
                }
                if !tags.is_empty() {
                    let _ = write!(body, " <span class=\"tags\">{}</span>", tags.join(", "));
                }
                body.push_str("</li>\n");
            }
            body.push_str("</ol>\n</section>\n");
        }
        body.push_str(&nav);
        files.insert(act_path(pi, ai), page(lang, &title, "../assets/style.css", &body));
    }
    Ok(files)
}

/// Writes the bundle under `out_dir` and returns the file manifest.
pub fn emit_html(package: &[u8], out_dir: &Path) -> Result<FileManifest, CodegenError> {
    let files = render_html(package)?;
    let mut manifest = FileManifest::default();
    for (rel, text) in files {
        let path = out_dir.join(&rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|source| CodegenError::Io { path: parent.to_path_buf(), source })?;
        }
        std::fs::write(&path, text.as_bytes()).map_err(|source| CodegenError::Io { path: path.clone(), source })?;
        manifest.files.push(FileEntry { path: rel, sha256: hash_hex(text.as_bytes()), bytes: text.len() as u64 });
    }
    Ok(manifest)
}
