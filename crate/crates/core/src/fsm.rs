//! FSM definition format, a reference interpreter used as the correctness
//! oracle, and the compiler from an FSM into a TM static model.
//!
//! The compiler emits, for an FSM with states S, initial state i and
//! transitions T:
//!
//! - an initialization path: the root thimac creates a signal that flows
//!   into the controller's inbound path, whose process triggers the initial
//!   state's process;
//! - per state, a state thimac with one inbound arrival path
//!   transfer(in) -> receive -> process; every incoming move lands on it;
//! - per transition (s, e, t), a stimulus thimac for e
//!   (create -> release -> transfer(out)) flowing into a dedicated shift
//!   path transfer(in) -> receive -> release -> transfer(out) inside s,
//!   which delivers the gear to t's arrival path;
//! - per non-initial state, a condition thimac whose create is triggered
//!   by that state's process ("driving in ..." in the car model).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    build_model, Direction, FlowArc, SModel, StageId, StageKind, Thimac, ThimacId, TriggerArc,
};

pub const DEFAULT_ROOT: &str = "System";
pub const DEFAULT_CONTROLLER: &str = "Controller";
pub const SIGNALS_GROUP: &str = "DriverSignals";
pub const CONDITIONS_GROUP: &str = "DrivingConditions";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmState {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmTransition {
    pub from: String,
    pub event: String,
    pub to: String,
}

/// A finite state machine with at most one level of superstate nesting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmSpec {
    /// Root thimac name for the compiled model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Controller thimac name for the compiled model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controller: Option<String>,
    pub states: Vec<FsmState>,
    pub initial: String,
    pub transitions: Vec<FsmTransition>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsmError {
    #[error("invalid fsm json: {0}")]
    Json(String),
    #[error("invalid identifier {0:?}")]
    BadIdentifier(String),
    #[error("duplicate state {0}")]
    DuplicateState(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("initial state {0} must be a leaf state")]
    BadInitial(String),
    #[error("superstate nesting deeper than two levels at {0}")]
    TooDeep(String),
    #[error("transition endpoint {0} is a superstate")]
    SuperstateEndpoint(String),
    #[error("ambiguous transition: two targets for ({state}, {event})")]
    AmbiguousTransition { state: String, event: String },
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FsmSpec {
    /// Parses and validates a `.fsm.json` document.
    pub fn from_json(text: &str) -> Result<FsmSpec, FsmError> {
        let spec: FsmSpec =
            serde_json::from_str(text).map_err(|e| FsmError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fsm spec serializes")
    }

    /// States that are not the parent of any other state.
    pub fn leaf_states(&self) -> Vec<&str> {
        let parents: BTreeSet<&str> =
            self.states.iter().filter_map(|s| s.parent.as_deref()).collect();
        self.states
            .iter()
            .map(|s| s.name.as_str())
            .filter(|n| !parents.contains(n))
            .collect()
    }

    pub fn validate(&self) -> Result<(), FsmError> {
        let mut names = BTreeSet::new();
        for s in &self.states {
            if !is_identifier(&s.name) {
                return Err(FsmError::BadIdentifier(s.name.clone()));
            }
            if !names.insert(s.name.as_str()) {
                return Err(FsmError::DuplicateState(s.name.clone()));
            }
        }
        let by_name: BTreeMap<&str, &FsmState> =
            self.states.iter().map(|s| (s.name.as_str(), s)).collect();
        for s in &self.states {
            if let Some(p) = &s.parent {
                let parent =
                    by_name.get(p.as_str()).ok_or_else(|| FsmError::UnknownState(p.clone()))?;
                if parent.parent.is_some() {
                    return Err(FsmError::TooDeep(s.name.clone()));
                }
            }
        }
        let leaves: BTreeSet<&str> = self.leaf_states().into_iter().collect();
        if !leaves.contains(self.initial.as_str()) {
            if !names.contains(self.initial.as_str()) {
                return Err(FsmError::UnknownState(self.initial.clone()));
            }
            return Err(FsmError::BadInitial(self.initial.clone()));
        }
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            if !is_identifier(&t.event) {
                return Err(FsmError::BadIdentifier(t.event.clone()));
            }
            for end in [&t.from, &t.to] {
                if !names.contains(end.as_str()) {
                    return Err(FsmError::UnknownState(end.clone()));
                }
                if !leaves.contains(end.as_str()) {
                    return Err(FsmError::SuperstateEndpoint(end.clone()));
                }
            }
            if !seen.insert((t.from.as_str(), t.event.as_str())) {
                return Err(FsmError::AmbiguousTransition {
                    state: t.from.clone(),
                    event: t.event.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Outcome of offering one event to the machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Moved(String),
    NotEnabled,
}

/// The unique transition (current, ev, t) yields t; with no such transition
/// the state is unchanged and `NotEnabled` is reported.
pub fn fsm_step(spec: &FsmSpec, current: &str, event: &str) -> StepOutcome {
    spec.transitions
        .iter()
        .find(|t| t.from == current && t.event == event)
        .map(|t| StepOutcome::Moved(t.to.clone()))
        .unwrap_or(StepOutcome::NotEnabled)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmStep {
    pub event: String,
    pub outcome: StepOutcome,
    /// State after the step; unchanged when the event was not enabled.
    pub state_after: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmRun {
    pub current: String,
    pub history: Vec<FsmStep>,
}

impl FsmRun {
    /// Initial state plus the state after every enabled step.
    pub fn state_sequence(&self, initial: &str) -> Vec<String> {
        let mut seq = vec![initial.to_string()];
        for step in &self.history {
            if let StepOutcome::Moved(s) = &step.outcome {
                seq.push(s.clone());
            }
        }
        seq
    }

    pub fn not_enabled_events(&self) -> Vec<&str> {
        self.history
            .iter()
            .filter(|s| s.outcome == StepOutcome::NotEnabled)
            .map(|s| s.event.as_str())
            .collect()
    }
}

/// Folds `fsm_step` over a script starting from the initial state.
pub fn fsm_run(spec: &FsmSpec, script: &[String]) -> FsmRun {
    let mut current = spec.initial.clone();
    let mut history = Vec::new();
    for ev in script {
        let outcome = fsm_step(spec, &current, ev);
        if let StepOutcome::Moved(next) = &outcome {
            current = next.clone();
        }
        history.push(FsmStep { event: ev.clone(), outcome, state_after: current.clone() });
    }
    FsmRun { current, history }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error(transparent)]
    Fsm(#[from] FsmError),
    #[error("self-loop transition ({state}, {event}) cannot be expressed as a cross-thimac shift")]
    SelfLoop { state: String, event: String },
    #[error("internal model assembly error: {0}")]
    Build(String),
}

/// Display segment of a state: the `Gear` suffix used by the car fixtures
/// is dropped unless stripping would collide with another state.
fn state_segments(spec: &FsmSpec) -> BTreeMap<String, String> {
    let leaves = spec.leaf_states();
    let strip = |n: &str| {
        if n.len() > 4 && n.ends_with("Gear") {
            n[..n.len() - 4].to_string()
        } else {
            n.to_string()
        }
    };
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for n in &leaves {
        *counts.entry(strip(n)).or_default() += 1;
    }
    leaves
        .into_iter()
        .map(|n| {
            let s = strip(n);
            let seg = if counts[&s] > 1 { n.to_string() } else { s };
            (n.to_string(), seg)
        })
        .collect()
}

/// Compiles an FSM into a validated-by-construction S model. State thimac
/// labels carry the original FSM state names; stimulus thimacs are grouped
/// by source state and named after their event.
pub fn compile_fsm_to_s(spec: &FsmSpec) -> Result<SModel, CompileError> {
    spec.validate()?;
    for t in &spec.transitions {
        if t.from == t.to {
            return Err(CompileError::SelfLoop { state: t.from.clone(), event: t.event.clone() });
        }
    }

    use Direction::{Input, Output};
    use StageKind::{Create, Process, Receive, Release, Transfer};

    let root_name = spec.name.as_deref().unwrap_or(DEFAULT_ROOT);
    let controller_name = spec.controller.as_deref().unwrap_or(DEFAULT_CONTROLLER);
    let segments = state_segments(spec);
    let leaves: Vec<&str> = spec.leaf_states();

    let mut root = Thimac::new(root_name);
    root.push_path(&[Create, Release, Transfer(Output)]);

    let mut controller = Thimac::new(controller_name);
    controller.push_path(&[Transfer(Input), Receive, Process]);

    // State thimacs, grouped under their superstate when they have one.
    for state in &leaves {
        let mut t = Thimac::new(&segments[*state]).with_label(state.to_string());
        t.push_path(&[Transfer(Input), Receive, Process]);
        for _ in spec.transitions.iter().filter(|tr| tr.from == **state) {
            t.push_path(&[Transfer(Input), Receive, Release, Transfer(Output)]);
        }
        let parent = spec
            .states
            .iter()
            .find(|s| s.name == **state)
            .and_then(|s| s.parent.clone());
        match parent {
            Some(p) => {
                let group = controller
                    .subthimacs
                    .iter_mut()
                    .find(|g| g.id.last_segment() == p);
                match group {
                    Some(g) => {
                        g.push_child(t);
                    }
                    None => {
                        let mut g = Thimac::new(&p);
                        g.push_child(t);
                        controller.push_child(g);
                    }
                }
            }
            None => {
                controller.push_child(t);
            }
        }
    }
    root.push_child(controller);

    // Stimulus thimacs grouped by source state.
    let mut signals = Thimac::new(SIGNALS_GROUP);
    for state in &leaves {
        let outgoing: Vec<&FsmTransition> =
            spec.transitions.iter().filter(|tr| tr.from == **state).collect();
        if outgoing.is_empty() {
            continue;
        }
        let mut group = Thimac::new(&segments[*state]);
        for tr in outgoing {
            let mut stim = Thimac::new(&tr.event);
            stim.push_path(&[Create, Release, Transfer(Output)]);
            group.push_child(stim);
        }
        signals.push_child(group);
    }
    root.push_child(signals);

    // Condition thimacs for every non-initial state.
    let mut conditions = Thimac::new(CONDITIONS_GROUP);
    for state in leaves.iter().filter(|s| ***s != spec.initial) {
        let mut c = Thimac::new(&segments[**state]).with_label(state.to_string());
        c.push_stage(Create);
        conditions.push_child(c);
    }
    root.push_child(conditions);

    // Resolve thimac ids now that the tree is final.
    let root_id = ThimacId(root_name.to_string());
    let controller_id = root_id.child(controller_name);
    let state_id = |state: &str| -> ThimacId {
        let parent = spec
            .states
            .iter()
            .find(|s| s.name == state)
            .and_then(|s| s.parent.as_deref());
        match parent {
            Some(p) => controller_id.child(p).child(&segments[state]),
            None => controller_id.child(&segments[state]),
        }
    };
    let stim_id = |tr: &FsmTransition| -> ThimacId {
        root_id.child(SIGNALS_GROUP).child(&segments[&tr.from]).child(&tr.event)
    };
    let cond_id =
        |state: &str| -> ThimacId { root_id.child(CONDITIONS_GROUP).child(&segments[state]) };
    let stage = |t: &ThimacId, kind: StageKind, k: usize| StageId::new(t, kind, k);

    let mut flows = Vec::new();
    let mut triggers = Vec::new();

    flows.push(FlowArc::new(
        stage(&root_id, Transfer(Output), 0),
        stage(&controller_id, Transfer(Input), 0),
    ));
    triggers.push(TriggerArc {
        src: stage(&controller_id, Process, 0),
        dst: stage(&state_id(&spec.initial), Process, 0),
    });

    let mut shift_index: BTreeMap<&str, usize> = BTreeMap::new();
    for tr in &spec.transitions {
        let s = state_id(&tr.from);
        let t = state_id(&tr.to);
        let k = {
            let e = shift_index.entry(tr.from.as_str()).or_insert(0);
            *e += 1;
            *e // shift path k uses occurrence index k of transfer(in)/receive
        };
        let stim = stim_id(tr);
        flows.push(FlowArc::new(stage(&stim, Transfer(Output), 0), stage(&s, Transfer(Input), k)));
        flows.push(FlowArc::new(stage(&s, Transfer(Output), k - 1), stage(&t, Transfer(Input), 0)));
    }

    for state in leaves.iter().filter(|s| ***s != spec.initial) {
        triggers.push(TriggerArc {
            src: stage(&state_id(state), Process, 0),
            dst: stage(&cond_id(state), Create, 0),
        });
    }

    build_model(root_name, root, flows, triggers).map_err(|e| CompileError::Build(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::validate_s;

    #[test]
    fn step_examples_from_both_fixtures() {
        let fig1 = fixtures::fig1_fsm();
        assert_eq!(
            fsm_step(&fig1, "SecondGear", "reachThirdSpeed"),
            StepOutcome::Moved("ThirdGear".into())
        );
        assert_eq!(fsm_step(&fig1, "Reverse", "reachThirdSpeed"), StepOutcome::NotEnabled);
        let tm = fixtures::transmission_fsm();
        assert_eq!(
            fsm_step(&tm, "Neutral", "selectReverse"),
            StepOutcome::Moved("Reverse".into())
        );
    }

    #[test]
    fn empty_script_stays_in_neutral() {
        let tm = fixtures::transmission_fsm();
        let run = fsm_run(&tm, &[]);
        assert!(run.history.is_empty());
        assert_eq!(run.current, "Neutral");
        let run = fsm_run(&tm, &["selectFirst".to_string()]);
        assert_eq!(run.current, "FirstGear");
    }

    #[test]
    fn random_run_matches_independent_fold() {
        use rand::prelude::*;
        let tm = fixtures::transmission_fsm();
        let events: Vec<&str> =
            vec!["selectFirst", "selectSecond", "selectThird", "selectReverse", "selectNeutral"];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let script: Vec<String> =
            (0..50).map(|_| (*events.choose(&mut rng).unwrap()).to_string()).collect();
        let run = fsm_run(&tm, &script);

        // Independent fold over the transition table.
        let mut state = tm.initial.clone();
        let mut seq = vec![state.clone()];
        for ev in &script {
            if let Some(t) = tm.transitions.iter().find(|t| &t.from == &state && &t.event == ev) {
                state = t.to.clone();
                seq.push(state.clone());
            }
        }
        assert_eq!(run.state_sequence(&tm.initial), seq);
        assert_eq!(run.current, state);
    }

    #[test]
    fn ambiguous_transition_rejected_at_load() {
        let mut spec = fixtures::toggle_fsm();
        spec.transitions.push(FsmTransition {
            from: "On".into(),
            event: "flip".into(),
            to: "On".into(),
        });
        assert!(matches!(spec.validate(), Err(FsmError::AmbiguousTransition { .. })));
    }

    #[test]
    fn missing_json_keys_are_rejected() {
        let err = FsmSpec::from_json(r#"{"states": [{"name": "A"}]}"#).unwrap_err();
        assert!(matches!(err, FsmError::Json(_)));
    }

    #[test]
    fn compiled_transmission_validates_cleanly() {
        let model = compile_fsm_to_s(&fixtures::transmission_fsm()).unwrap();
        assert_eq!(validate_s(&model), vec![]);
        // one init trigger plus one condition trigger per non-initial state
        assert_eq!(model.triggers.len(), 5);
    }

    #[test]
    fn stimulus_count_law() {
        let spec = fixtures::transmission_fsm();
        let model = compile_fsm_to_s(&spec).unwrap();
        let stimuli = model
            .thimacs()
            .filter(|t| t.id.as_str().contains(&format!(".{SIGNALS_GROUP}.")))
            .filter(|t| !t.stages.is_empty())
            .count();
        assert_eq!(stimuli, spec.transitions.len());
        let states = model
            .thimacs()
            .filter(|t| {
                t.id.as_str().contains(".Transmission")
                    && t.stages.iter().any(|s| s.kind == StageKind::Process)
            })
            .count();
        assert_eq!(states, spec.leaf_states().len() + 1); // + controller
    }

    #[test]
    fn one_state_fsm_compiles_to_init_and_state_only() {
        let spec = FsmSpec {
            name: None,
            controller: None,
            states: vec![FsmState { name: "Only".into(), parent: None }],
            initial: "Only".into(),
            transitions: vec![],
        };
        let model = compile_fsm_to_s(&spec).unwrap();
        assert_eq!(validate_s(&model), vec![]);
        let with_stages = model.thimacs().filter(|t| !t.stages.is_empty()).count();
        // root + controller + the single state; no stimuli, no conditions
        assert_eq!(with_stages, 3);
    }

    #[test]
    fn self_loop_is_rejected_by_compile() {
        let mut spec = fixtures::toggle_fsm();
        spec.transitions.push(FsmTransition {
            from: "On".into(),
            event: "noop".into(),
            to: "On".into(),
        });
        assert!(matches!(
            compile_fsm_to_s(&spec),
            Err(CompileError::SelfLoop { .. })
        ));
    }
}
