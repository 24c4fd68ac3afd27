//! Core TM domain types: thimacs, stages, arcs, the static model `S`, and
//! the structural well-formedness rules (the five-stage flow grammar).
//!
//! A thimac is the single modeling category: a named node with a dual
//! thing/machine nature that owns an ordered list of stages and a tree of
//! subthimacs. Flow arcs (solid) move things between stages; trigger arcs
//! (dashed) activate subdiagrams that have no flow between them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Direction tag carried by every transfer stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Input,
    Output,
}

impl Direction {
    pub fn token(self) -> &'static str {
        match self {
            Direction::Input => "input",
            Direction::Output => "output",
        }
    }
}

/// The generic machine actions. `Arrive`/`Accept` are the refinement of the
/// simplified `Receive` stage and only appear directly after it on a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StageKind {
    Create,
    Process,
    Release,
    Transfer(Direction),
    Receive,
    Arrive,
    Accept,
}

impl StageKind {
    /// Canonical token used in stage ids, DSL references and flow strings.
    pub fn token(self) -> String {
        match self {
            StageKind::Create => "create".to_string(),
            StageKind::Process => "process".to_string(),
            StageKind::Release => "release".to_string(),
            StageKind::Transfer(d) => format!("transfer({})", d.token()),
            StageKind::Receive => "receive".to_string(),
            StageKind::Arrive => "arrive".to_string(),
            StageKind::Accept => "accept".to_string(),
        }
    }

    pub fn is_transfer_out(self) -> bool {
        self == StageKind::Transfer(Direction::Output)
    }

    pub fn is_transfer_in(self) -> bool {
        self == StageKind::Transfer(Direction::Input)
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// Dot-separated ancestry path naming a thimac, e.g. `Car.Transmission.Neutral`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThimacId(pub String);

impl ThimacId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of dots equals the thimac's depth below the root.
    pub fn depth(&self) -> usize {
        self.0.matches('.').count()
    }

    pub fn child(&self, segment: &str) -> ThimacId {
        ThimacId(format!("{}.{}", self.0, segment))
    }

    pub fn last_segment(&self) -> &str {
        self.0.rsplit('.').next().unwrap_or(&self.0)
    }
}

impl fmt::Display for ThimacId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Stage identifier: `<thimac id>:<kind token>[#<k>]` where `#k` is the
/// occurrence index among stages of the same (kind, direction) within the
/// thimac, omitted when zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StageId(pub String);

impl StageId {
    pub fn new(owner: &ThimacId, kind: StageKind, occurrence: usize) -> StageId {
        if occurrence == 0 {
            StageId(format!("{}:{}", owner.0, kind.token()))
        } else {
            StageId(format!("{}:{}#{}", owner.0, kind.token(), occurrence))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One machine action instance owned by a thimac.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub id: StageId,
    pub kind: StageKind,
    pub owner: ThimacId,
}

/// Logical time attached to event thimacs; tick 0 is simulation start.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TimeTag {
    pub tick: u64,
    pub wall_label: Option<String>,
}

impl TimeTag {
    pub fn at(tick: u64) -> TimeTag {
        TimeTag { tick, wall_label: None }
    }

    pub fn with_label(tick: u64, label: impl Into<String>) -> TimeTag {
        TimeTag { tick, wall_label: Some(label.into()) }
    }
}

/// A named node with dual thing/machine nature. The stage list is the
/// machine side; id and label are the thing side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thimac {
    pub id: ThimacId,
    pub label: String,
    pub stages: Vec<Stage>,
    pub subthimacs: Vec<Thimac>,
    /// Present only on event thimacs built by the behavior layer.
    pub time_sub: Option<TimeTag>,
}

impl Thimac {
    /// Root-level thimac; the segment doubles as the label.
    pub fn new(segment: &str) -> Thimac {
        Thimac {
            id: ThimacId(segment.to_string()),
            label: segment.to_string(),
            stages: Vec::new(),
            subthimacs: Vec::new(),
            time_sub: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Thimac {
        self.label = label.into();
        self
    }

    /// Appends a stage, assigning the next occurrence index for its kind.
    pub fn push_stage(&mut self, kind: StageKind) -> StageId {
        let occurrence = self.stages.iter().filter(|s| s.kind == kind).count();
        let id = StageId::new(&self.id, kind, occurrence);
        self.stages.push(Stage { id: id.clone(), kind, owner: self.id.clone() });
        id
    }

    /// Appends a chain of stages and returns their ids in order.
    pub fn push_path(&mut self, kinds: &[StageKind]) -> Vec<StageId> {
        kinds.iter().map(|&k| self.push_stage(k)).collect()
    }

    /// Attaches a child, rewriting the child's subtree ids under this thimac.
    pub fn push_child(&mut self, mut child: Thimac) -> &mut Thimac {
        child.reroot(&self.id);
        self.subthimacs.push(child);
        self.subthimacs.last_mut().unwrap()
    }

    fn reroot(&mut self, parent: &ThimacId) {
        let new_id = parent.child(self.id.last_segment());
        for stage in &mut self.stages {
            let suffix = stage
                .id
                .0
                .rsplit(':')
                .next()
                .expect("stage id has a kind suffix")
                .to_string();
            stage.id = StageId(format!("{}:{}", new_id.0, suffix));
            stage.owner = new_id.clone();
        }
        self.id = new_id;
        let my_id = self.id.clone();
        for child in &mut self.subthimacs {
            child.reroot(&my_id);
        }
    }

    /// Depth-first iterator over this thimac and all descendants.
    pub fn walk(&self) -> impl Iterator<Item = &Thimac> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            for child in next.subthimacs.iter().rev() {
                stack.push(child);
            }
            Some(next)
        })
    }
}

/// Flow arc: solid arrow, conceptual movement of a thing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlowArc {
    pub src: StageId,
    pub dst: StageId,
    pub annotation: Option<String>,
}

impl FlowArc {
    pub fn new(src: StageId, dst: StageId) -> FlowArc {
        FlowArc { src, dst, annotation: None }
    }
}

/// Trigger arc: dashed arrow between subdiagrams with no flow between them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TriggerArc {
    pub src: StageId,
    pub dst: StageId,
}

/// The static model: a thimac tree plus flow and trigger arcs over stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SModel {
    pub name: String,
    pub root: Thimac,
    pub flows: Vec<FlowArc>,
    pub triggers: Vec<TriggerArc>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate thimac id {0}")]
    DuplicateThimac(String),
    #[error("duplicate stage id {0}")]
    DuplicateStage(String),
    #[error("duplicate {kind} arc {src} -> {dst}")]
    DuplicateArc { kind: &'static str, src: String, dst: String },
    #[error("{kind} arc endpoint {stage} not found")]
    UnknownStage { kind: &'static str, stage: String },
}

/// Assembles an `SModel`, resolving all arc endpoints against the thimac
/// tree. Does not validate flow grammar; `validate_s` is an explicit step.
pub fn build_model(
    name: impl Into<String>,
    root: Thimac,
    flows: Vec<FlowArc>,
    triggers: Vec<TriggerArc>,
) -> Result<SModel, BuildError> {
    let mut thimac_ids = BTreeSet::new();
    let mut stage_ids = BTreeSet::new();
    for t in root.walk() {
        if !thimac_ids.insert(t.id.clone()) {
            return Err(BuildError::DuplicateThimac(t.id.0.clone()));
        }
        for s in &t.stages {
            if !stage_ids.insert(s.id.clone()) {
                return Err(BuildError::DuplicateStage(s.id.0.clone()));
            }
        }
    }
    let mut seen_flow = BTreeSet::new();
    for f in &flows {
        for end in [&f.src, &f.dst] {
            if !stage_ids.contains(end) {
                return Err(BuildError::UnknownStage { kind: "flow", stage: end.0.clone() });
            }
        }
        if !seen_flow.insert((f.src.clone(), f.dst.clone())) {
            return Err(BuildError::DuplicateArc {
                kind: "flow",
                src: f.src.0.clone(),
                dst: f.dst.0.clone(),
            });
        }
    }
    let mut seen_trig = BTreeSet::new();
    for t in &triggers {
        for end in [&t.src, &t.dst] {
            if !stage_ids.contains(end) {
                return Err(BuildError::UnknownStage { kind: "trigger", stage: end.0.clone() });
            }
        }
        if !seen_trig.insert((t.src.clone(), t.dst.clone())) {
            return Err(BuildError::DuplicateArc {
                kind: "trigger",
                src: t.src.0.clone(),
                dst: t.dst.0.clone(),
            });
        }
    }
    let mut flows = flows;
    flows.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
    let mut triggers = triggers;
    triggers.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
    Ok(SModel { name: name.into(), root, flows, triggers })
}

impl SModel {
    pub fn thimacs(&self) -> impl Iterator<Item = &Thimac> {
        self.root.walk()
    }

    pub fn thimac(&self, id: &ThimacId) -> Option<&Thimac> {
        self.thimacs().find(|t| &t.id == id)
    }

    pub fn stages(&self) -> impl Iterator<Item = &Stage> {
        self.thimacs().flat_map(|t| t.stages.iter())
    }

    pub fn stage(&self, id: &StageId) -> Option<&Stage> {
        self.stages().find(|s| &s.id == id)
    }

    pub fn stage_count(&self) -> usize {
        self.stages().count()
    }

    /// Arcs whose endpoints lie in different thimacs.
    pub fn cross_flows(&self) -> impl Iterator<Item = &FlowArc> {
        let owners = self.stage_owners();
        self.flows.iter().filter(move |f| owners[&f.src] != owners[&f.dst])
    }

    pub fn stage_owners(&self) -> BTreeMap<StageId, ThimacId> {
        self.stages().map(|s| (s.id.clone(), s.owner.clone())).collect()
    }
}

/// Rule codes carried by validation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleCode {
    PathShape,
    CrossThimac,
    TriggerTarget,
    TriggerOverlap,
    FlowCycle,
}

impl RuleCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleCode::PathShape => "RULE_PATH_SHAPE",
            RuleCode::CrossThimac => "RULE_CROSS_THIMAC",
            RuleCode::TriggerTarget => "RULE_TRIGGER_TARGET",
            RuleCode::TriggerOverlap => "RULE_TRIGGER_OVERLAP",
            RuleCode::FlowCycle => "RULE_FLOW_CYCLE",
        }
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub rule: RuleCode,
    pub stages: Vec<StageId>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self.stages.iter().map(|s| s.as_str()).collect();
        write!(f, "{} [{}]: {}", self.rule, ids.join(", "), self.message)
    }
}

/// The two canonical path templates. A maximal intra-thimac stage sequence
/// is legal iff it spells out one of:
///
/// ```text
/// create [process] [release transfer(output)]
/// transfer(input) receive [arrive [accept]] [process] [release transfer(output)]
/// ```
///
/// Arrive/accept are accepted only as the refinement suffix of receive,
/// in the literal order the dotted flow strings use.
pub fn matches_path_template(kinds: &[StageKind]) -> bool {
    matches_generative(kinds) || matches_inbound(kinds)
}

fn matches_generative(kinds: &[StageKind]) -> bool {
    let mut rest = match kinds {
        [StageKind::Create, rest @ ..] => rest,
        _ => return false,
    };
    if let [StageKind::Process, r @ ..] = rest {
        rest = r;
    }
    matches_tail(rest)
}

fn matches_inbound(kinds: &[StageKind]) -> bool {
    let mut rest = match kinds {
        [StageKind::Transfer(Direction::Input), StageKind::Receive, rest @ ..] => rest,
        _ => return false,
    };
    if let [StageKind::Arrive, r @ ..] = rest {
        rest = r;
        if let [StageKind::Accept, r @ ..] = rest {
            rest = r;
        }
    }
    if let [StageKind::Process, r @ ..] = rest {
        rest = r;
    }
    matches_tail(rest)
}

fn matches_tail(rest: &[StageKind]) -> bool {
    match rest {
        [] => true,
        [StageKind::Release, StageKind::Transfer(Direction::Output)] => true,
        _ => false,
    }
}

/// Intra-thimac flow structure of one thimac: stages plus the flow arcs
/// whose endpoints both belong to it.
pub(crate) struct IntraGraph<'a> {
    pub stages: Vec<&'a Stage>,
    pub out: BTreeMap<StageId, Vec<StageId>>,
    pub indegree: BTreeMap<StageId, usize>,
}

pub(crate) fn intra_graph<'a>(model: &'a SModel, thimac: &'a Thimac) -> IntraGraph<'a> {
    let local: BTreeSet<&StageId> = thimac.stages.iter().map(|s| &s.id).collect();
    let mut out: BTreeMap<StageId, Vec<StageId>> = BTreeMap::new();
    let mut indegree: BTreeMap<StageId, usize> = BTreeMap::new();
    for s in &thimac.stages {
        out.entry(s.id.clone()).or_default();
        indegree.entry(s.id.clone()).or_insert(0);
    }
    for f in &model.flows {
        if local.contains(&f.src) && local.contains(&f.dst) {
            out.get_mut(&f.src).unwrap().push(f.dst.clone());
            *indegree.get_mut(&f.dst).unwrap() += 1;
        }
    }
    IntraGraph { stages: thimac.stages.iter().collect(), out, indegree }
}

/// All maximal simple paths of a thimac's intra flow graph, in a
/// deterministic order (start stages in declaration order, branches in
/// arc-sorted order). Stages on a cycle yield no path and are reported
/// separately by the validator.
pub fn maximal_intra_paths(model: &SModel, thimac: &Thimac) -> Vec<Vec<StageId>> {
    let graph = intra_graph(model, thimac);
    let mut paths = Vec::new();
    for s in &graph.stages {
        if graph.indegree[&s.id] == 0 {
            let mut current = vec![s.id.clone()];
            walk_paths(&graph, &mut current, &mut paths);
        }
    }
    paths
}

fn walk_paths(graph: &IntraGraph<'_>, current: &mut Vec<StageId>, paths: &mut Vec<Vec<StageId>>) {
    let last = current.last().unwrap().clone();
    let nexts = &graph.out[&last];
    let mut extended = false;
    for n in nexts {
        if current.contains(n) {
            continue; // cycle guard
        }
        extended = true;
        current.push(n.clone());
        walk_paths(graph, current, paths);
        current.pop();
    }
    if !extended {
        paths.push(current.clone());
    }
}

/// Checks every structural well-formedness rule and returns diagnostics in
/// a deterministic order. An empty list means the model is a valid S.
pub fn validate_s(model: &SModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let owners = model.stage_owners();
    let kind_of: BTreeMap<&StageId, StageKind> =
        model.stages().map(|s| (&s.id, s.kind)).collect();

    for thimac in model.thimacs() {
        let graph = intra_graph(model, thimac);
        // Stages unreachable from any start are on a cycle.
        let mut reachable: BTreeSet<StageId> = BTreeSet::new();
        for path in maximal_intra_paths(model, thimac) {
            reachable.extend(path.iter().cloned());
            let kinds: Vec<StageKind> = path.iter().map(|id| kind_of[id]).collect();
            if !matches_path_template(&kinds) {
                let spelled: Vec<String> = kinds.iter().map(|k| k.token()).collect();
                diags.push(Diagnostic {
                    rule: RuleCode::PathShape,
                    stages: path.clone(),
                    message: format!(
                        "flow path [{}] matches no legal template",
                        spelled.join(" -> ")
                    ),
                });
            }
        }
        for s in &graph.stages {
            if !reachable.contains(&s.id) {
                diags.push(Diagnostic {
                    rule: RuleCode::FlowCycle,
                    stages: vec![s.id.clone()],
                    message: "stage lies on an intra-thimac flow cycle".to_string(),
                });
            }
        }
    }

    for f in &model.flows {
        if owners[&f.src] != owners[&f.dst] {
            let ok = kind_of[&f.src].is_transfer_out() && kind_of[&f.dst].is_transfer_in();
            if !ok {
                diags.push(Diagnostic {
                    rule: RuleCode::CrossThimac,
                    stages: vec![f.src.clone(), f.dst.clone()],
                    message: "cross-thimac flow must connect transfer(output) to transfer(input)"
                        .to_string(),
                });
            }
        }
    }

    let flow_pairs: BTreeSet<(&StageId, &StageId)> =
        model.flows.iter().map(|f| (&f.src, &f.dst)).collect();
    for t in &model.triggers {
        match kind_of[&t.dst] {
            StageKind::Create | StageKind::Process => {}
            other => diags.push(Diagnostic {
                rule: RuleCode::TriggerTarget,
                stages: vec![t.src.clone(), t.dst.clone()],
                message: format!("trigger target must be create or process, found {other}"),
            }),
        }
        if flow_pairs.contains(&(&t.src, &t.dst)) {
            diags.push(Diagnostic {
                rule: RuleCode::TriggerOverlap,
                stages: vec![t.src.clone(), t.dst.clone()],
                message: "trigger duplicates an existing flow between the same stages".to_string(),
            });
        }
    }

    diags.sort();
    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_path_model(kinds: &[StageKind]) -> SModel {
        let mut root = Thimac::new("X");
        let ids = root.push_path(kinds);
        let flows = ids
            .windows(2)
            .map(|w| FlowArc::new(w[0].clone(), w[1].clone()))
            .collect();
        build_model("x", root, flows, vec![]).unwrap()
    }

    #[test]
    fn minimal_model_has_one_thimac_one_stage() {
        let mut root = Thimac::new("X");
        root.push_stage(StageKind::Create);
        let m = build_model("minimal", root, vec![], vec![]).unwrap();
        assert_eq!(m.thimacs().count(), 1);
        assert_eq!(m.stage_count(), 1);
        assert!(validate_s(&m).is_empty());
    }

    #[test]
    fn dangling_flow_endpoint_is_rejected() {
        let mut root = Thimac::new("X");
        let c = root.push_stage(StageKind::Create);
        let err = build_model(
            "bad",
            root,
            vec![FlowArc::new(c, StageId("X.nosuch:create".into()))],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::UnknownStage { .. }));
    }

    #[test]
    fn duplicate_sibling_segments_are_rejected() {
        let mut root = Thimac::new("X");
        root.push_child(Thimac::new("A"));
        root.push_child(Thimac::new("A"));
        let err = build_model("dup", root, vec![], vec![]).unwrap_err();
        assert_eq!(err, BuildError::DuplicateThimac("X.A".into()));
    }

    #[test]
    fn five_paper_flow_strings_validate() {
        use Direction::*;
        use StageKind::*;
        let strings: [&[StageKind]; 5] = [
            &[Create, Release, Transfer(Output)],
            &[Create, Process, Release, Transfer(Output)],
            &[Transfer(Input), Receive, Arrive, Release, Transfer(Output)],
            &[Transfer(Input), Receive, Arrive, Accept, Release, Transfer(Output)],
            &[Transfer(Input), Receive, Arrive, Accept, Process, Release, Transfer(Output)],
        ];
        for kinds in strings {
            let m = single_path_model(kinds);
            assert_eq!(validate_s(&m), vec![], "path {kinds:?}");
        }
    }

    #[test]
    fn release_before_create_is_a_path_shape_error() {
        use StageKind::*;
        let m = single_path_model(&[Release, Create]);
        let diags = validate_s(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, RuleCode::PathShape);
    }

    #[test]
    fn trigger_into_release_is_rejected() {
        use StageKind::*;
        let mut root = Thimac::new("X");
        let a = root.push_stage(Create);
        let mut y = Thimac::new("Y");
        y.push_path(&[Create, Release, Transfer(Direction::Output)]);
        root.push_child(y);
        let rel = StageId("X.Y:release".into());
        let m = build_model("t", root, vec![], vec![TriggerArc { src: a, dst: rel }]).unwrap();
        let diags = validate_s(&m);
        assert!(diags.iter().any(|d| d.rule == RuleCode::TriggerTarget));
    }

    #[test]
    fn cross_thimac_flow_must_be_transfer_pair() {
        use StageKind::*;
        let mut root = Thimac::new("X");
        let c = root.push_stage(Create);
        let mut y = Thimac::new("Y");
        let p = y.push_stage(Process);
        root.push_child(y);
        let m = build_model("c", root, vec![FlowArc::new(c, p)], vec![]).unwrap();
        let diags = validate_s(&m);
        assert!(diags.iter().any(|d| d.rule == RuleCode::CrossThimac));
    }

    #[test]
    fn arrive_without_receive_is_rejected() {
        use Direction::*;
        use StageKind::*;
        let m = single_path_model(&[Transfer(Input), Arrive, Process]);
        assert!(validate_s(&m).iter().any(|d| d.rule == RuleCode::PathShape));
    }

    #[test]
    fn intra_cycle_is_reported() {
        use StageKind::*;
        let mut root = Thimac::new("X");
        let a = root.push_stage(Create);
        let b = root.push_stage(Process);
        let m = build_model(
            "cyc",
            root,
            vec![FlowArc::new(a.clone(), b.clone()), FlowArc::new(b, a)],
            vec![],
        )
        .unwrap();
        assert!(validate_s(&m).iter().any(|d| d.rule == RuleCode::FlowCycle));
    }

    #[test]
    fn validate_is_pure() {
        use Direction::*;
        use StageKind::*;
        let m = single_path_model(&[Transfer(Input), Receive, Release, Transfer(Output)]);
        assert_eq!(validate_s(&m), validate_s(&m));
    }

    #[test]
    fn thimac_id_depth_counts_dots() {
        let mut root = Thimac::new("A");
        let mut b = Thimac::new("B");
        b.push_child(Thimac::new("C"));
        root.push_child(b);
        let m = build_model("d", root, vec![], vec![]).unwrap();
        for t in m.thimacs() {
            let expect = match t.id.as_str() {
                "A" => 0,
                "A.B" => 1,
                "A.B.C" => 2,
                other => panic!("unexpected id {other}"),
            };
            assert_eq!(t.id.depth(), expect);
        }
    }
}
