//! Textual language for TM models: the `.tm` model file grammar, the dotted
//! flow-string notation, and a printer whose output re-parses to an equal
//! model.
//!
//! File format (UTF-8, LF), see `docs/grammar.ebnf` for the exact EBNF:
//!
//! ```text
//! model <name>
//! thimac <segment> {
//!     stage <kind>[(input|output)]
//!     path <FlowString>
//!     thimac <segment> { ... }
//! }
//! flow <ref> -> <ref>
//! trigger <ref> -> <ref>
//! ```
//!
//! A `<ref>` is `Thimac.Path:stageKind[#index]`; `#` starts a comment.

use std::fmt;

use thiserror::Error;

use crate::model::{
    build_model, BuildError, Direction, FlowArc, SModel, Stage, StageId, StageKind, Thimac,
    ThimacId, TriggerArc,
};

/// Dotted stage-sequence notation, e.g. `Flow.create.release.transfer.output`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowString(pub String);

impl fmt::Display for FlowString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowStringError {
    #[error("flow string must begin with \"Flow.\"")]
    MissingPrefix,
    #[error("empty flow string")]
    Empty,
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("direction token {0:?} is only legal immediately after \"transfer\"")]
    StrayDirection(String),
    #[error("\"transfer\" must be followed by \"input\" or \"output\"")]
    TransferWithoutDirection,
}

/// Parses a flow string into its stage kinds. `transfer` consumes the
/// following `input`/`output` token into one stage.
pub fn parse_flow_tokens(text: &str) -> Result<Vec<StageKind>, FlowStringError> {
    let body = text.strip_prefix("Flow.").ok_or(FlowStringError::MissingPrefix)?;
    if body.is_empty() {
        return Err(FlowStringError::Empty);
    }
    let tokens: Vec<&str> = body.split('.').collect();
    let mut kinds = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let kind = match tokens[i] {
            "create" => StageKind::Create,
            "process" => StageKind::Process,
            "release" => StageKind::Release,
            "receive" => StageKind::Receive,
            "arrive" => StageKind::Arrive,
            "accept" => StageKind::Accept,
            "transfer" => {
                let dir = match tokens.get(i + 1) {
                    Some(&"input") => Direction::Input,
                    Some(&"output") => Direction::Output,
                    _ => return Err(FlowStringError::TransferWithoutDirection),
                };
                i += 1;
                StageKind::Transfer(dir)
            }
            tok @ ("input" | "output") => {
                return Err(FlowStringError::StrayDirection(tok.to_string()))
            }
            other => return Err(FlowStringError::UnknownToken(other.to_string())),
        };
        kinds.push(kind);
        i += 1;
    }
    Ok(kinds)
}

/// Renders stage kinds back into the dotted notation.
pub fn flow_string_of(kinds: &[StageKind]) -> FlowString {
    let mut parts = vec!["Flow".to_string()];
    for k in kinds {
        match k {
            StageKind::Transfer(d) => {
                parts.push("transfer".to_string());
                parts.push(d.token().to_string());
            }
            other => parts.push(other.token()),
        }
    }
    FlowString(parts.join("."))
}

/// Instantiates a flow string as stages of `owner` plus the consecutive
/// arcs between them. Grammar conformance is not checked here; that is
/// `validate_s`'s job.
pub fn parse_flow_string(
    s: &FlowString,
    owner: &mut Thimac,
) -> Result<(Vec<Stage>, Vec<FlowArc>), FlowStringError> {
    let kinds = parse_flow_tokens(&s.0)?;
    let ids = owner.push_path(&kinds);
    let stages = owner.stages[owner.stages.len() - ids.len()..].to_vec();
    let arcs = ids.windows(2).map(|w| FlowArc::new(w[0].clone(), w[1].clone())).collect();
    Ok((stages, arcs))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty model file")]
    EmptyModel,
    #[error("line {line}, col {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{0}")]
    Build(#[from] BuildError),
}

struct Cursor<'a> {
    lines: Vec<&'a str>,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor { lines: text.lines().collect(), line: 0 }
    }

    /// Next significant line with comments stripped, or None at EOF.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        while self.line < self.lines.len() {
            let raw = self.lines[self.line];
            self.line += 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let trimmed = stripped.trim();
            if !trimmed.is_empty() {
                return Some((self.line, trimmed));
            }
        }
        None
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col: 1, message: message.into() }
}

/// Parses a `.tm` model file. Never panics: returns either a model (not yet
/// validated) or a position-annotated error.
pub fn parse_model(text: &str) -> Result<SModel, ParseError> {
    let mut cursor = Cursor::new(text);
    let (line, first) = cursor.next().ok_or(ParseError::EmptyModel)?;
    let name = first
        .strip_prefix("model")
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .ok_or_else(|| syntax(line, "expected `model <name>` header"))?
        .to_string();

    let mut root: Option<Thimac> = None;
    let mut flows: Vec<FlowArc> = Vec::new();
    let mut triggers: Vec<TriggerArc> = Vec::new();

    while let Some((line, stmt)) = cursor.next() {
        if let Some(rest) = stmt.strip_prefix("thimac ") {
            if root.is_some() {
                return Err(syntax(line, "only one top-level thimac block is allowed"));
            }
            root = Some(parse_thimac_block(
                rest,
                line,
                &mut cursor,
                None,
                &mut flows,
                &mut triggers,
            )?);
        } else if let Some(rest) = stmt.strip_prefix("flow ") {
            flows.push(parse_flow_stmt(rest, line)?);
        } else if let Some(rest) = stmt.strip_prefix("trigger ") {
            let arc = parse_flow_stmt(rest, line)?;
            triggers.push(TriggerArc { src: arc.src, dst: arc.dst });
        } else {
            return Err(syntax(line, format!("unexpected statement {stmt:?}")));
        }
    }

    let root = root.ok_or_else(|| syntax(cursor.lines.len(), "missing top-level thimac block"))?;
    Ok(build_model(name, root, flows, triggers)?)
}

fn parse_thimac_block(
    header_rest: &str,
    header_line: usize,
    cursor: &mut Cursor<'_>,
    parent: Option<&ThimacId>,
    flows: &mut Vec<FlowArc>,
    triggers: &mut Vec<TriggerArc>,
) -> Result<Thimac, ParseError> {
    let rest = header_rest.trim();
    let segment = rest
        .strip_suffix('{')
        .map(str::trim)
        .ok_or_else(|| syntax(header_line, "expected `thimac <segment> {`"))?;
    if segment.is_empty() || !segment.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(syntax(header_line, format!("invalid thimac segment {segment:?}")));
    }
    let mut thimac = Thimac::new(segment);
    if let Some(pid) = parent {
        thimac.id = pid.child(segment);
        thimac.label = segment.to_string();
    }
    let my_id = thimac.id.clone();

    loop {
        let (line, stmt) = cursor
            .next()
            .ok_or_else(|| syntax(header_line, format!("unclosed thimac block {segment:?}")))?;
        if stmt == "}" {
            return Ok(thimac);
        } else if let Some(rest) = stmt.strip_prefix("thimac ") {
            let child =
                parse_thimac_block(rest, line, cursor, Some(&my_id), flows, triggers)?;
            if thimac.subthimacs.iter().any(|c| c.id == child.id) {
                return Err(syntax(line, format!("duplicate thimac id {}", child.id)));
            }
            thimac.subthimacs.push(child);
        } else if let Some(rest) = stmt.strip_prefix("stage ") {
            let kind = parse_stage_kind(rest.trim(), line)?;
            thimac.push_stage(kind);
        } else if let Some(rest) = stmt.strip_prefix("path ") {
            let fs = FlowString(rest.trim().to_string());
            let (_, arcs) = parse_flow_string(&fs, &mut thimac)
                .map_err(|e| syntax(line, e.to_string()))?;
            flows.extend(arcs);
        } else if let Some(rest) = stmt.strip_prefix("flow ") {
            flows.push(parse_flow_stmt(rest, line)?);
        } else if let Some(rest) = stmt.strip_prefix("trigger ") {
            let arc = parse_flow_stmt(rest, line)?;
            triggers.push(TriggerArc { src: arc.src, dst: arc.dst });
        } else {
            return Err(syntax(line, format!("unexpected statement {stmt:?}")));
        }
    }
}

fn parse_stage_kind(token: &str, line: usize) -> Result<StageKind, ParseError> {
    match token {
        "create" => Ok(StageKind::Create),
        "process" => Ok(StageKind::Process),
        "release" => Ok(StageKind::Release),
        "receive" => Ok(StageKind::Receive),
        "arrive" => Ok(StageKind::Arrive),
        "accept" => Ok(StageKind::Accept),
        "transfer(input)" => Ok(StageKind::Transfer(Direction::Input)),
        "transfer(output)" => Ok(StageKind::Transfer(Direction::Output)),
        other => Err(syntax(line, format!("unknown stage kind {other:?}"))),
    }
}

fn parse_flow_stmt(rest: &str, line: usize) -> Result<FlowArc, ParseError> {
    let (src, dst) = rest
        .split_once("->")
        .ok_or_else(|| syntax(line, "expected `<ref> -> <ref>`"))?;
    Ok(FlowArc::new(parse_stage_ref(src.trim(), line)?, parse_stage_ref(dst.trim(), line)?))
}

/// A stage reference is the canonical stage id syntax:
/// `Thimac.Path:kind[#index]`, with `#0` implied when omitted.
pub fn parse_stage_ref(text: &str, line: usize) -> Result<StageId, ParseError> {
    let (thimac, stage_part) = text
        .split_once(':')
        .ok_or_else(|| syntax(line, format!("stage reference {text:?} is missing `:`")))?;
    let (kind_part, index) = match stage_part.split_once('#') {
        Some((k, i)) => {
            let idx: usize = i
                .parse()
                .map_err(|_| syntax(line, format!("bad stage index {i:?} in {text:?}")))?;
            (k, idx)
        }
        None => (stage_part, 0),
    };
    let kind = parse_stage_kind(kind_part, line)?;
    Ok(StageId::new(&ThimacId(thimac.to_string()), kind, index))
}

/// Prints a model in the canonical form: nested thimac blocks with `path`
/// lines where the intra flow structure is linear, and all remaining arcs
/// as sorted `flow`/`trigger` statements. `parse_model(print_model(m))`
/// yields a model structurally equal to `m`.
pub fn print_model(model: &SModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("model {}\n\n", model.name));
    let mut covered = Vec::new();
    print_thimac(model, &model.root, 0, &mut out, &mut covered);
    let covered: std::collections::BTreeSet<(StageId, StageId)> = covered.into_iter().collect();

    let mut flow_lines: Vec<String> = model
        .flows
        .iter()
        .filter(|f| !covered.contains(&(f.src.clone(), f.dst.clone())))
        .map(|f| format!("flow {} -> {}", f.src, f.dst))
        .collect();
    flow_lines.sort();
    let mut trig_lines: Vec<String> =
        model.triggers.iter().map(|t| format!("trigger {} -> {}", t.src, t.dst)).collect();
    trig_lines.sort();

    if !flow_lines.is_empty() || !trig_lines.is_empty() {
        out.push('\n');
    }
    for l in flow_lines.into_iter().chain(trig_lines) {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn print_thimac(
    model: &SModel,
    thimac: &Thimac,
    depth: usize,
    out: &mut String,
    covered: &mut Vec<(StageId, StageId)>,
) {
    let indent = "  ".repeat(depth);
    out.push_str(&format!("{}thimac {} {{\n", indent, thimac.id.last_segment()));
    let inner = "  ".repeat(depth + 1);
    match linear_runs(model, thimac) {
        Some(runs) => {
            for run in runs {
                let kinds: Vec<StageKind> = run.iter().map(|s| s.kind).collect();
                out.push_str(&format!("{}path {}\n", inner, flow_string_of(&kinds)));
                for w in run.windows(2) {
                    covered.push((w[0].id.clone(), w[1].id.clone()));
                }
            }
        }
        None => {
            for s in &thimac.stages {
                out.push_str(&format!("{}stage {}\n", inner, s.kind.token()));
            }
        }
    }
    for child in &thimac.subthimacs {
        print_thimac(model, child, depth + 1, out, covered);
    }
    out.push_str(&format!("{}}}\n", indent));
}

/// Splits a thimac's stages into declaration-order runs that exactly match
/// its intra flow arcs. Returns None when the structure is not a disjoint
/// union of such runs (the printer then falls back to `stage` lines).
fn linear_runs<'a>(model: &'a SModel, thimac: &'a Thimac) -> Option<Vec<Vec<&'a Stage>>> {
    let local: std::collections::BTreeSet<&StageId> =
        thimac.stages.iter().map(|s| &s.id).collect();
    let intra: Vec<(&StageId, &StageId)> = model
        .flows
        .iter()
        .filter(|f| local.contains(&f.src) && local.contains(&f.dst))
        .map(|f| (&f.src, &f.dst))
        .collect();
    let mut runs: Vec<Vec<&Stage>> = Vec::new();
    let mut current: Vec<&Stage> = Vec::new();
    let mut expected = 0usize;
    for (i, stage) in thimac.stages.iter().enumerate() {
        if current.is_empty() {
            current.push(stage);
        } else {
            let prev = current.last().unwrap();
            if intra.contains(&(&prev.id, &stage.id)) {
                current.push(stage);
                expected += 1;
            } else {
                runs.push(std::mem::take(&mut current));
                current.push(stage);
            }
        }
        let _ = i;
    }
    if !current.is_empty() {
        runs.push(current);
    }
    // Every intra arc must be one of the consecutive pairs we emitted.
    if expected != intra.len() {
        return None;
    }
    Some(runs)
}

/// One flow string per maximal intra-thimac path, in deterministic order
/// (thimac walk order, then path discovery order).
pub fn to_flow_strings(model: &SModel) -> Vec<FlowString> {
    let kind_of: std::collections::BTreeMap<&StageId, StageKind> =
        model.stages().map(|s| (&s.id, s.kind)).collect();
    let mut out = Vec::new();
    for thimac in model.thimacs() {
        for path in crate::model::maximal_intra_paths(model, thimac) {
            let kinds: Vec<StageKind> = path.iter().map(|id| kind_of[id]).collect();
            out.push(flow_string_of(&kinds));
        }
    }
    out
}
