//! Emits diagram descriptions of S, D and B models as dot graph text.
//! Geometry is left to external layout tools; output is deterministic so
//! documents can be golden-tested byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::behavior::BModel;
use crate::model::{SModel, Thimac};
use crate::statics::{ChangeKind, DModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramKind {
    SModel,
    DModel,
    BModel,
}

impl DiagramKind {
    pub fn token(self) -> &'static str {
        match self {
            DiagramKind::SModel => "s-model",
            DiagramKind::DModel => "d-model",
            DiagramKind::BModel => "b-model",
        }
    }

    /// Extension used for output files: `<model>.s.dot` etc.
    pub fn file_tag(self) -> &'static str {
        match self {
            DiagramKind::SModel => "s",
            DiagramKind::DModel => "d",
            DiagramKind::BModel => "b",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramDoc {
    pub kind: DiagramKind,
    pub text: String,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Nested clusters per thimac, one node per stage; solid edges are flows,
/// dashed edges triggers.
pub fn render_s(model: &SModel) -> DiagramDoc {
    let mut out = String::new();
    writeln!(out, "digraph s_model {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    let mut counter = 0usize;
    render_cluster(&model.root, 1, &mut counter, &mut out);
    for f in &model.flows {
        writeln!(out, "  {} -> {};", quote(f.src.as_str()), quote(f.dst.as_str())).unwrap();
    }
    for t in &model.triggers {
        writeln!(
            out,
            "  {} -> {} [style=dashed];",
            quote(t.src.as_str()),
            quote(t.dst.as_str())
        )
        .unwrap();
    }
    writeln!(out, "}}").unwrap();
    DiagramDoc { kind: DiagramKind::SModel, text: out }
}

fn render_cluster(thimac: &Thimac, depth: usize, counter: &mut usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    writeln!(out, "{}subgraph cluster_{} {{", indent, counter).unwrap();
    *counter += 1;
    writeln!(out, "{}  label={};", indent, quote(&thimac.label)).unwrap();
    for s in &thimac.stages {
        writeln!(
            out,
            "{}  {} [label={}];",
            indent,
            quote(s.id.as_str()),
            quote(&s.kind.token())
        )
        .unwrap();
    }
    for child in &thimac.subthimacs {
        render_cluster(child, depth + 1, counter, out);
    }
    writeln!(out, "{}}}", indent).unwrap();
}

fn kind_color(kind: ChangeKind) -> &'static str {
    match kind {
        ChangeKind::Init => "gold",
        ChangeKind::StatePath => "lightblue",
        ChangeKind::Stimulus => "palegreen",
        ChangeKind::Shift => "orange",
        ChangeKind::Condition => "lightpink",
    }
}

/// One node per change colored by kind, one edge per precedence pair.
pub fn render_d(d: &DModel) -> DiagramDoc {
    let mut out = String::new();
    writeln!(out, "digraph d_model {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=box, style=filled];").unwrap();
    for c in &d.changes {
        writeln!(
            out,
            "  {} [label={}, fillcolor={}];",
            quote(&c.id),
            quote(&format!("{}\\n({})", c.name, c.kind)),
            kind_color(c.kind)
        )
        .unwrap();
    }
    for (a, b) in &d.precedence {
        writeln!(out, "  {} -> {};", quote(a), quote(b)).unwrap();
    }
    writeln!(out, "}}").unwrap();
    DiagramDoc { kind: DiagramKind::DModel, text: out }
}

/// Events as nodes ranked by tick, arrows along the causal chains that
/// fired: an edge joins events one tick apart whose changes are adjacent
/// in the precedence relation.
pub fn render_b(b: &BModel) -> DiagramDoc {
    let mut out = String::new();
    writeln!(out, "digraph b_model {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for e in &b.events {
        writeln!(
            out,
            "  {} [label={}];",
            quote(&e.id),
            quote(&format!("{}: {} @{}", e.id, e.name, e.time.tick))
        )
        .unwrap();
    }
    let mut by_tick: BTreeMap<u64, Vec<&str>> = BTreeMap::new();
    for e in &b.events {
        by_tick.entry(e.time.tick).or_default().push(&e.id);
    }
    for ids in by_tick.values() {
        let quoted: Vec<String> = ids.iter().map(|i| quote(i)).collect();
        writeln!(out, "  {{ rank=same; {}; }}", quoted.join("; ")).unwrap();
    }
    for x in &b.events {
        for y in &b.events {
            if y.time.tick == x.time.tick + 1
                && b.precedence.contains(&(x.state.clone(), y.state.clone()))
            {
                writeln!(out, "  {} -> {};", quote(&x.id), quote(&y.id)).unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
    DiagramDoc { kind: DiagramKind::BModel, text: out }
}

/// Minimal structural dot checker used in tests: verifies the document is
/// a well-formed `digraph` and reports node ids, edges and rank groups.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct DotStats {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub dashed_edges: usize,
    pub clusters: usize,
    pub rank_groups: Vec<Vec<String>>,
}

pub fn check_dot(text: &str) -> Result<DotStats, String> {
    let mut stats = DotStats::default();
    let mut depth = 0usize;
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Err(format!("line {}: {}", lineno + 1, m));
        if !saw_header {
            if line.starts_with("digraph ") && line.ends_with('{') {
                saw_header = true;
                depth = 1;
                continue;
            }
            return err("expected `digraph <name> {`");
        }
        if line.starts_with("subgraph ") {
            if !line.ends_with('{') {
                return err("subgraph header must end with `{`");
            }
            if line.contains("cluster_") {
                stats.clusters += 1;
            }
            depth += 1;
            continue;
        }
        if line == "}" {
            if depth == 0 {
                return err("unbalanced `}`");
            }
            depth -= 1;
            continue;
        }
        if !line.ends_with(';') {
            return err("statement must end with `;`");
        }
        let stmt = &line[..line.len() - 1];
        if let Some(rest) = stmt.strip_prefix("{ rank=same;") {
            let rest = rest.trim_end_matches('}').trim();
            let group: Vec<String> = rest
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| unquote(s).ok_or(format!("line {}: bad id {s:?}", lineno + 1)))
                .collect::<Result<_, _>>()?;
            stats.rank_groups.push(group);
            continue;
        }
        if stmt.starts_with("rankdir=") || stmt.starts_with("node [") || stmt.starts_with("label=")
        {
            continue;
        }
        if let Some(pos) = stmt.find(" -> ") {
            let src = unquote(stmt[..pos].trim()).ok_or("bad edge source")?;
            let rest = stmt[pos + 4..].trim();
            let (dst_part, attrs) = match rest.find('[') {
                Some(b) => (rest[..b].trim(), &rest[b..]),
                None => (rest, ""),
            };
            let dst = unquote(dst_part).ok_or("bad edge target")?;
            if attrs.contains("style=dashed") {
                stats.dashed_edges += 1;
            }
            stats.edges.push((src, dst));
            continue;
        }
        // node statement: "<id>" [attrs]
        let (id_part, _attrs) = match stmt.find('[') {
            Some(b) => (stmt[..b].trim(), &stmt[b..]),
            None => (stmt, ""),
        };
        let id = unquote(id_part).ok_or(format!("line {}: bad node id", lineno + 1))?;
        stats.nodes.push(id);
    }
    if depth != 0 {
        return Err("unbalanced braces at end of document".to_string());
    }
    if !saw_header {
        return Err("empty document".to_string());
    }
    Ok(stats)
}

fn unquote(s: &str) -> Option<String> {
    let inner = s.strip_prefix('"')?.strip_suffix('"')?;
    Some(inner.replace("\\\"", "\"").replace("\\\\", "\\"))
}
