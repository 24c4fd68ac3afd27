//! Events and the behavior model B: static states are instantiated as
//! timed events and executed by a deterministic simulator driven by
//! stimulus scripts.
//!
//! Tick semantics: the initialization change fires at tick 0 and the
//! change it triggers (the initial state's ready change) at tick 1. Each
//! scripted stimulus then fires at `max(scripted tick, last tick + 1)`,
//! its shift one tick later, and the destination state's change one tick
//! after that; the destination becomes the active region. A stimulus whose
//! gating change is not active is dropped, mirroring a finite state
//! machine ignoring an unhandled event.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

pub use crate::model::TimeTag;

use crate::model::{SModel, StageId, StageKind, ThimacId};
use crate::statics::{ChangeKind, DModel, StaticChange};

/// A static state materialized for a period: the carrier of behavior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// `E<k>`, numbered by position in the chronology.
    pub id: String,
    /// Id of the static change this event materializes.
    pub state: String,
    pub time: TimeTag,
    pub name: String,
}

/// Pure constructor: wraps a static state with a time subthimac. A wall
/// label is embedded into the event name, so the phone-call change tagged
/// "May 23, 2012, at 2:11 pm" reads "A phoned B on May 23, 2012, at 2:11 pm".
pub fn attach_time(state: &StaticChange, time: TimeTag) -> Event {
    let name = match &time.wall_label {
        Some(label) => format!("{} on {}", state.name, label),
        None => state.name.clone(),
    };
    Event { id: "E1".to_string(), state: state.id.clone(), time, name }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedStimulus {
    pub tick: u64,
    pub name: String,
}

/// The chronology of events produced by one simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BModel {
    pub events: Vec<Event>,
    /// DModel precedence restricted to changes that occurred in this run.
    pub precedence: std::collections::BTreeSet<(String, String)>,
    pub dropped: Vec<DroppedStimulus>,
    pub truncated: bool,
}

impl BModel {
    /// Trace file body: one `tick=... id=... change=... name="..."` line
    /// per event plus the final result line.
    pub fn to_trace(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            writeln!(
                out,
                "tick={} id={} change={} name=\"{}\"",
                e.time.tick, e.id, e.state, e.name
            )
            .expect("write to string");
        }
        let result = if self.truncated { "truncated" } else { "quiescent" };
        writeln!(out, "result={}", result).expect("write to string");
        out
    }
}

/// External stimulus schedule: `(tick, stimulusName)` with non-decreasing
/// ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StimulusScript {
    entries: Vec<(u64, String)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScriptError {
    #[error("script ticks must be non-decreasing (saw {prev} then {next})")]
    Decreasing { prev: u64, next: u64 },
    #[error("line {0}: expected `<tick> <stimulusName>`")]
    Malformed(usize),
}

impl StimulusScript {
    pub fn new(entries: Vec<(u64, String)>) -> Result<StimulusScript, ScriptError> {
        for w in entries.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(ScriptError::Decreasing { prev: w[0].0, next: w[1].0 });
            }
        }
        Ok(StimulusScript { entries })
    }

    pub fn empty() -> StimulusScript {
        StimulusScript { entries: Vec::new() }
    }

    /// Parses the script file format: one `<tick> <stimulusName>` per line,
    /// `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<StimulusScript, ScriptError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (tick, name) = line.split_once(char::is_whitespace).ok_or(ScriptError::Malformed(i + 1))?;
            let tick: u64 = tick.parse().map_err(|_| ScriptError::Malformed(i + 1))?;
            entries.push((tick, name.trim().to_string()));
        }
        StimulusScript::new(entries)
    }

    pub fn entries(&self) -> &[(u64, String)] {
        &self.entries
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulateError {
    #[error("unknown stimulus {0:?}: no stimulus change carries this name")]
    UnknownStimulus(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectError {
    #[error("the D model was not produced from a compiled FSM")]
    NotAnFsmModel,
}

/// One catalog entry per change, in change order. Names follow the event
/// naming pattern ("Starting the car", "Selecting from neutral to first",
/// "Driving in reverse", ...).
pub fn event_catalog(d: &DModel) -> Vec<(String, String)> {
    d.changes.iter().map(|c| (c.id.clone(), c.name.clone())).collect()
}

/// Catalog extended with regionless entries (waiting, interruptions,
/// warnings) bound to the designated empty change id. None are emitted by
/// simulation; they exist so traces can interleave external happenings.
pub fn event_catalog_extended(d: &DModel, regionless: &[String]) -> Vec<(String, String)> {
    let mut catalog = event_catalog(d);
    for name in regionless {
        catalog.push(("regionless".to_string(), name.clone()));
    }
    catalog
}

/// Resolved execution view of a D model: which changes initialize the run,
/// which stimuli exist, and how each stimulus chains into a shift and a
/// destination state change.
struct MachineView<'a> {
    d: &'a DModel,
    init_changes: Vec<usize>,
    /// Changes fired at tick 1 by the initialization triggers.
    ready_changes: Vec<usize>,
    /// stimulus change index -> (gate change, shift change, destination).
    stimuli: Vec<StimulusEntry>,
}

struct StimulusEntry {
    change: usize,
    name: String,
    gate: Option<usize>,
    shift: Option<usize>,
    dest: Option<usize>,
}

impl<'a> MachineView<'a> {
    fn new(d: &'a DModel) -> MachineView<'a> {
        let model = &d.model;
        let change_of: BTreeMap<&StageId, usize> = d
            .changes
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.stages.iter().map(move |s| (s, i)))
            .collect();
        let owner_of: BTreeMap<StageId, ThimacId> = model.stage_owners();
        let label_of: BTreeMap<&ThimacId, &str> =
            model.thimacs().map(|t| (&t.id, t.label.as_str())).collect();
        let _ = label_of;

        let init_changes: Vec<usize> = d
            .changes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ChangeKind::Init)
            .map(|(i, _)| i)
            .collect();

        let mut ready_changes: Vec<usize> = model
            .triggers
            .iter()
            .filter_map(|t| {
                let src = change_of.get(&t.src)?;
                let dst = change_of.get(&t.dst)?;
                (init_changes.contains(src) && src != dst).then_some(*dst)
            })
            .collect();
        ready_changes.sort();
        ready_changes.dedup();

        // The state-region change of a thimac: the non-shift, non-stimulus
        // change that holds stages owned by it (its arrival path).
        let region_of_thimac = |tid: &ThimacId| -> Option<usize> {
            d.changes.iter().enumerate().position(|(i, c)| {
                let _ = i;
                !matches!(c.kind, ChangeKind::Shift | ChangeKind::Stimulus)
                    && c.stages.iter().any(|s| &owner_of[s] == tid)
            })
        };

        let cross_dest_change = |c: &StaticChange| -> Option<usize> {
            model
                .flows
                .iter()
                .filter(|f| c.stages.contains(&f.src) && !c.stages.contains(&f.dst))
                .filter_map(|f| change_of.get(&f.dst).copied())
                .next()
        };

        let stimuli = d
            .changes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == ChangeKind::Stimulus)
            .map(|(i, c)| {
                let name = c
                    .stages
                    .iter()
                    .next()
                    .map(|s| owner_of[s].last_segment().to_string())
                    .unwrap_or_default();
                let shift = cross_dest_change(c)
                    .filter(|&s| d.changes[s].kind == ChangeKind::Shift);
                let gate = shift.and_then(|s| {
                    let shift_owner = d.changes[s]
                        .stages
                        .iter()
                        .next()
                        .map(|st| owner_of[st].clone())?;
                    region_of_thimac(&shift_owner)
                });
                let dest = shift.and_then(|s| cross_dest_change(&d.changes[s]));
                StimulusEntry { change: i, name, gate, shift, dest }
            })
            .collect();

        MachineView { d, init_changes, ready_changes, stimuli }
    }

    fn knows_stimulus(&self, name: &str) -> bool {
        self.stimuli.iter().any(|s| s.name == name)
    }

    fn enabled(&self, name: &str, active: Option<usize>) -> Option<&StimulusEntry> {
        self.stimuli.iter().find(|s| s.name == name && s.gate.is_some() && s.gate == active)
    }
}

/// Runs the behavior model: a pure function of the D model, the script and
/// the tick budget. Two identical runs serialize to byte-identical traces.
pub fn simulate(
    d: &DModel,
    script: &StimulusScript,
    max_ticks: u64,
) -> Result<BModel, SimulateError> {
    let mv = MachineView::new(d);
    for (_, name) in script.entries() {
        if !mv.knows_stimulus(name) {
            return Err(SimulateError::UnknownStimulus(name.clone()));
        }
    }

    let mut fired: Vec<(u64, usize)> = Vec::new();
    let mut dropped = Vec::new();
    let mut truncated = false;
    let mut emit = |fired: &mut Vec<(u64, usize)>, tick: u64, change: usize| -> bool {
        if tick > max_ticks {
            true // over budget
        } else {
            fired.push((tick, change));
            false
        }
    };

    let mut next_free = 0u64;
    'run: {
        for &c in &mv.init_changes {
            if emit(&mut fired, 0, c) {
                truncated = true;
                break 'run;
            }
            next_free = 1;
        }
        for &c in &mv.ready_changes {
            if emit(&mut fired, 1, c) {
                truncated = true;
                break 'run;
            }
            next_free = 2;
        }
        let mut active: Option<usize> = mv.ready_changes.first().copied();

        for (tick, name) in script.entries() {
            let Some(entry) = mv.enabled(name, active) else {
                dropped.push(DroppedStimulus { tick: *tick, name: name.clone() });
                continue;
            };
            let t0 = (*tick).max(next_free);
            if emit(&mut fired, t0, entry.change) {
                truncated = true;
                break 'run;
            }
            next_free = t0 + 1;
            let Some(shift) = entry.shift else { continue };
            if emit(&mut fired, t0 + 1, shift) {
                truncated = true;
                break 'run;
            }
            next_free = t0 + 2;
            let Some(dest) = entry.dest else { continue };
            if emit(&mut fired, t0 + 2, dest) {
                truncated = true;
                break 'run;
            }
            next_free = t0 + 3;
            active = Some(dest);
        }
    }

    // Non-decreasing ticks with lexicographic tie-break on the change id.
    fired.sort_by(|a, b| (a.0, &d.changes[a.1].id).cmp(&(b.0, &d.changes[b.1].id)));
    let events: Vec<Event> = fired
        .iter()
        .enumerate()
        .map(|(k, &(tick, change))| Event {
            id: format!("E{}", k + 1),
            state: d.changes[change].id.clone(),
            time: TimeTag::at(tick),
            name: d.changes[change].name.clone(),
        })
        .collect();
    let occurred: std::collections::BTreeSet<&str> =
        events.iter().map(|e| e.state.as_str()).collect();
    let precedence = d
        .precedence
        .iter()
        .filter(|(a, b)| occurred.contains(a.as_str()) && occurred.contains(b.as_str()))
        .cloned()
        .collect();
    Ok(BModel { events, precedence, dropped, truncated })
}

/// Sequence of destination states of shift events, prefixed by the initial
/// state — the bridge to the FSM interpreter oracle. State names are read
/// from the thimac labels the compiler planted.
pub fn project_to_fsm_trace(b: &BModel, d: &DModel) -> Result<Vec<String>, ProjectError> {
    let model = &d.model;
    let owner_of: BTreeMap<StageId, ThimacId> = model.stage_owners();
    let label_of: BTreeMap<&ThimacId, &str> =
        model.thimacs().map(|t| (&t.id, t.label.as_str())).collect();

    // initial state: the thimac whose process the initialization triggers
    let init_target = model
        .triggers
        .iter()
        .filter_map(|t| {
            let src_change = d.change_of_stage(&t.src)?;
            let dst_change = d.change_of_stage(&t.dst)?;
            (src_change.kind == ChangeKind::Init && src_change.id != dst_change.id)
                .then(|| owner_of[&t.dst].clone())
        })
        .next()
        .ok_or(ProjectError::NotAnFsmModel)?;

    let mut trace = vec![label_of[&init_target].to_string()];
    for e in &b.events {
        let change = d.change(&e.state).ok_or(ProjectError::NotAnFsmModel)?;
        if change.kind != ChangeKind::Shift {
            continue;
        }
        let dest = model
            .flows
            .iter()
            .filter(|f| change.stages.contains(&f.src) && !change.stages.contains(&f.dst))
            .map(|f| owner_of[&f.dst].clone())
            .next()
            .ok_or(ProjectError::NotAnFsmModel)?;
        trace.push(label_of[&dest].to_string());
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::fsm::{compile_fsm_to_s, fsm_run};
    use crate::statics::{decompose, order_changes};

    fn transmission_d() -> DModel {
        let model = compile_fsm_to_s(&fixtures::transmission_fsm()).unwrap();
        let changes = decompose(&model).unwrap();
        order_changes(&model, changes)
    }

    fn script(entries: &[(u64, &str)]) -> StimulusScript {
        StimulusScript::new(
            entries.iter().map(|(t, n)| (*t, n.to_string())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn catalog_has_22_entries_with_paper_names() {
        let d = transmission_d();
        let catalog = event_catalog(&d);
        assert_eq!(catalog.len(), 22);
        let names: Vec<&str> = catalog.iter().map(|(_, n)| n.as_str()).collect();
        for expected in ["Starting the car", "Neutral is ready", "Driving in reverse"] {
            assert!(names.contains(&expected), "missing {expected:?} in {names:?}");
        }
    }

    #[test]
    fn select_first_runs_the_documented_chain() {
        let d = transmission_d();
        let b = simulate(&d, &script(&[(2, "selectFirst")]), 100).unwrap();
        let summary: Vec<(u64, &str)> =
            b.events.iter().map(|e| (e.time.tick, e.name.as_str())).collect();
        assert_eq!(
            summary,
            vec![
                (0, "Starting the car"),
                (1, "Neutral is ready"),
                (2, "Selecting from neutral to first"),
                (3, "Shifting from neutral to first"),
                (4, "Driving in first"),
            ]
        );
        let trace = project_to_fsm_trace(&b, &d).unwrap();
        assert_eq!(trace, vec!["Neutral", "FirstGear"]);
        assert!(!b.truncated);
        assert!(b.dropped.is_empty());
    }

    #[test]
    fn empty_script_fires_init_and_ready_only() {
        let d = transmission_d();
        let b = simulate(&d, &StimulusScript::empty(), 10).unwrap();
        assert_eq!(b.events.len(), 2);
        assert_eq!(b.events[0].id, "E1");
        assert_eq!(b.events[0].time.tick, 0);
        assert_eq!(b.events[1].time.tick, 1);
    }

    #[test]
    fn disabled_stimulus_is_dropped_like_not_enabled() {
        let d = transmission_d();
        let b = simulate(&d, &script(&[(2, "selectThird")]), 100).unwrap();
        assert_eq!(b.events.len(), 2);
        assert_eq!(b.dropped.len(), 1);
        assert_eq!(b.dropped[0].name, "selectThird");
    }

    #[test]
    fn unknown_stimulus_is_an_error() {
        let d = transmission_d();
        let err = simulate(&d, &script(&[(0, "pressClutch")]), 10).unwrap_err();
        assert_eq!(err, SimulateError::UnknownStimulus("pressClutch".into()));
    }

    #[test]
    fn max_ticks_truncates_with_partial_trace() {
        let d = transmission_d();
        let b = simulate(&d, &script(&[(2, "selectFirst")]), 3).unwrap();
        assert!(b.truncated);
        assert_eq!(b.events.len(), 4); // E1..E4; the condition at tick 4 is cut
        assert!(b.to_trace().ends_with("result=truncated\n"));
    }

    #[test]
    fn projection_tracks_two_moves() {
        let d = transmission_d();
        let b = simulate(&d, &script(&[(2, "selectFirst"), (5, "selectSecond")]), 100).unwrap();
        let trace = project_to_fsm_trace(&b, &d).unwrap();
        assert_eq!(trace, vec!["Neutral", "FirstGear", "SecondGear"]);
    }

    #[test]
    fn packed_ticks_serialize_dependent_chains() {
        let d = transmission_d();
        // Both stimuli scripted at tick 2: the second chain must wait for
        // the first to finish, and the projection must match the oracle.
        let b = simulate(&d, &script(&[(2, "selectFirst"), (2, "selectNeutral")]), 100).unwrap();
        let trace = project_to_fsm_trace(&b, &d).unwrap();
        assert_eq!(trace, vec!["Neutral", "FirstGear", "Neutral"]);
        let spec = fixtures::transmission_fsm();
        let run = fsm_run(&spec, &["selectFirst".into(), "selectNeutral".into()]);
        assert_eq!(trace, run.state_sequence(&spec.initial));
        let ticks: Vec<u64> = b.events.iter().map(|e| e.time.tick).collect();
        assert!(ticks.windows(2).all(|w| w[0] < w[1]), "chains overlap: {ticks:?}");
    }

    #[test]
    fn reentering_the_initial_state_refires_ready() {
        let d = transmission_d();
        let b = simulate(&d, &script(&[(2, "selectFirst"), (5, "selectNeutral")]), 100).unwrap();
        let ready: Vec<u64> = b
            .events
            .iter()
            .filter(|e| e.name == "Neutral is ready")
            .map(|e| e.time.tick)
            .collect();
        assert_eq!(ready, vec![1, 7]);
    }

    #[test]
    fn simulate_is_deterministic_and_does_not_mutate_d() {
        let d = transmission_d();
        let before = d.clone();
        let s = script(&[(2, "selectFirst"), (4, "selectSecond"), (9, "selectThird")]);
        let a = simulate(&d, &s, 200).unwrap();
        let b = simulate(&d, &s, 200).unwrap();
        assert_eq!(a.to_trace(), b.to_trace());
        assert_eq!(d, before);
    }

    #[test]
    fn attach_time_embeds_the_wall_label() {
        let m = fixtures::phone_model();
        let changes = decompose(&m).unwrap();
        assert_eq!(changes.len(), 1);
        let ev = attach_time(&changes[0], TimeTag::with_label(0, "May 23, 2012, at 2:11 pm"));
        assert_eq!(ev.name, "A phoned B on May 23, 2012, at 2:11 pm");
        assert_eq!(ev.state, changes[0].id);
    }

    #[test]
    fn attach_time_constructor_law() {
        let m = fixtures::phone_model();
        let changes = decompose(&m).unwrap();
        for tick in [0u64, 3, 1000] {
            let t = TimeTag::at(tick);
            let ev = attach_time(&changes[0], t.clone());
            assert_eq!(ev.state, changes[0].id);
            assert_eq!(ev.time, t);
        }
    }

    #[test]
    fn projection_on_non_fsm_model_errors() {
        let m = fixtures::phone_model();
        let changes = decompose(&m).unwrap();
        let d = order_changes(&m, changes);
        let b = simulate(&d, &StimulusScript::empty(), 10).unwrap();
        assert_eq!(project_to_fsm_trace(&b, &d), Err(ProjectError::NotAnFsmModel));
    }

    #[test]
    fn script_parsing_and_validation() {
        let s = StimulusScript::parse("2 selectFirst\n# comment\n\n5 selectSecond\n").unwrap();
        assert_eq!(s.entries().len(), 2);
        assert!(matches!(
            StimulusScript::parse("5 a\n2 b\n"),
            Err(ScriptError::Decreasing { .. })
        ));
        assert!(matches!(StimulusScript::parse("nope\n"), Err(ScriptError::Malformed(1))));
    }

    #[test]
    fn chronology_respects_causal_precedence() {
        let d = transmission_d();
        let b = simulate(&d, &script(&[(2, "selectFirst"), (6, "selectSecond")]), 100).unwrap();
        // For consecutive chain events, the earlier change precedes the
        // later one and ticks strictly increase.
        for w in b.events.windows(2) {
            let pair = (w[0].state.clone(), w[1].state.clone());
            if b.precedence.contains(&pair) {
                assert!(w[0].time.tick < w[1].time.tick);
            }
        }
    }

    #[test]
    fn regionless_catalog_entries_are_optional_extensions() {
        let d = transmission_d();
        let extended = event_catalog_extended(&d, &["Waiting for driver".to_string()]);
        assert_eq!(extended.len(), 23);
        assert_eq!(extended.last().unwrap().0, "regionless");
        // none are emitted by simulation
        let b = simulate(&d, &StimulusScript::empty(), 10).unwrap();
        assert!(b.events.iter().all(|e| e.state != "regionless"));
    }
}
