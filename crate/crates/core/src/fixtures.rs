//! Bundled models: the car-transmission machine in both event
//! vocabularies, a two-state toggle, the phone-call model and a minimal
//! one-stage model. The CLI test data files are generated from these.

use crate::fsm::{FsmSpec, FsmState, FsmTransition};
use crate::model::{build_model, Direction, FlowArc, SModel, StageId, StageKind, Thimac, TriggerArc};

fn state(name: &str, parent: Option<&str>) -> FsmState {
    FsmState { name: name.to_string(), parent: parent.map(str::to_string) }
}

fn tr(from: &str, event: &str, to: &str) -> FsmTransition {
    FsmTransition { from: from.to_string(), event: event.to_string(), to: to.to_string() }
}

/// The transmission machine in the select-event vocabulary: five gear
/// states, eight transitions, the three forward gears grouped under a
/// Driving superstate.
pub fn transmission_fsm() -> FsmSpec {
    FsmSpec {
        name: Some("Car".to_string()),
        controller: Some("Transmission".to_string()),
        states: vec![
            state("Neutral", None),
            state("Driving", None),
            state("FirstGear", Some("Driving")),
            state("SecondGear", Some("Driving")),
            state("ThirdGear", Some("Driving")),
            state("Reverse", None),
        ],
        initial: "Neutral".to_string(),
        transitions: vec![
            tr("Neutral", "selectFirst", "FirstGear"),
            tr("Neutral", "selectReverse", "Reverse"),
            tr("Reverse", "selectNeutral", "Neutral"),
            tr("FirstGear", "selectNeutral", "Neutral"),
            tr("FirstGear", "selectSecond", "SecondGear"),
            tr("SecondGear", "selectFirst", "FirstGear"),
            tr("SecondGear", "selectThird", "ThirdGear"),
            tr("ThirdGear", "selectSecond", "SecondGear"),
        ],
    }
}

/// The same machine in the source state chart's vocabulary
/// (selectDrive, reachThirdSpeed, dropBelowSecondSpeed).
pub fn fig1_fsm() -> FsmSpec {
    FsmSpec {
        name: Some("Car".to_string()),
        controller: Some("Transmission".to_string()),
        states: vec![
            state("Neutral", None),
            state("Driving", None),
            state("FirstGear", Some("Driving")),
            state("SecondGear", Some("Driving")),
            state("ThirdGear", Some("Driving")),
            state("Reverse", None),
        ],
        initial: "Neutral".to_string(),
        transitions: vec![
            tr("Neutral", "selectFirst", "FirstGear"),
            tr("Neutral", "selectDrive", "FirstGear"),
            tr("Neutral", "selectSecond", "SecondGear"),
            tr("Neutral", "selectReverse", "Reverse"),
            tr("SecondGear", "reachThirdSpeed", "ThirdGear"),
            tr("SecondGear", "dropBelowSecondSpeed", "FirstGear"),
        ],
    }
}

/// Smallest machine with a cycle: two states flipping on one event each.
pub fn toggle_fsm() -> FsmSpec {
    FsmSpec {
        name: Some("Toggle".to_string()),
        controller: None,
        states: vec![state("Off", None), state("On", None)],
        initial: "Off".to_string(),
        transitions: vec![tr("Off", "turnOn", "On"), tr("On", "turnOff", "Off")],
    }
}

/// The "A phoned B" model: A creates a call that flows to B, where it is
/// received and processed. Decomposes into a single whole-model change.
pub fn phone_model() -> SModel {
    use Direction::*;
    use StageKind::*;
    let mut root = Thimac::new("APhonedB");
    let mut a = Thimac::new("A");
    a.push_path(&[Create, Release, Transfer(Output)]);
    let mut b = Thimac::new("B");
    b.push_path(&[Transfer(Input), Receive, Process]);
    root.push_child(a);
    root.push_child(b);
    let flows = vec![FlowArc::new(
        StageId("APhonedB.A:transfer(output)".into()),
        StageId("APhonedB.B:transfer(input)".into()),
    )];
    build_model("A phoned B", root, flows, vec![]).expect("phone fixture builds")
}

/// One thimac, one create stage.
pub fn minimal_model() -> SModel {
    let mut root = Thimac::new("X");
    root.push_stage(StageKind::Create);
    build_model("X", root, vec![], vec![]).expect("minimal fixture builds")
}

/// Hand-built transmission S model following the figure's layout: the car
/// starts a signal into the Transmission controller, gear-position thimacs
/// live under a Gear thimac with short names, driver signals and driving
/// conditions are grouped beside them. Structurally equivalent to the
/// compiled model and used as an independent decomposition fixture.
pub fn transmission_hand_model() -> SModel {
    use Direction::*;
    use StageKind::*;

    // (state, [(event, target)...]) in the narrative's order
    let states: [(&str, &[(&str, &str)]); 5] = [
        ("Neutral", &[("selectFirst", "First"), ("selectReverse", "Reverse")]),
        ("First", &[("selectNeutral", "Neutral"), ("selectSecond", "Second")]),
        ("Second", &[("selectFirst", "First"), ("selectThird", "Third")]),
        ("Third", &[("selectSecond", "Second")]),
        ("Reverse", &[("selectNeutral", "Neutral")]),
    ];

    let mut car = Thimac::new("Car");
    car.push_path(&[Create, Release, Transfer(Output)]);

    let mut transmission = Thimac::new("Transmission");
    transmission.push_path(&[Transfer(Input), Receive, Process]);
    let mut gear = Thimac::new("Gear");
    for (name, outgoing) in &states {
        let mut t = Thimac::new(name);
        t.push_path(&[Transfer(Input), Receive, Process]);
        for _ in outgoing.iter() {
            t.push_path(&[Transfer(Input), Receive, Release, Transfer(Output)]);
        }
        gear.push_child(t);
    }
    transmission.push_child(gear);
    car.push_child(transmission);

    let mut signals = Thimac::new("DriverSignals");
    for (name, outgoing) in &states {
        let mut group = Thimac::new(name);
        for (event, _) in outgoing.iter() {
            let mut stim = Thimac::new(event);
            stim.push_path(&[Create, Release, Transfer(Output)]);
            group.push_child(stim);
        }
        signals.push_child(group);
    }
    car.push_child(signals);

    let mut conditions = Thimac::new("DrivingConditions");
    for (name, _) in states.iter().filter(|(n, _)| *n != "Neutral") {
        let mut c = Thimac::new(name);
        c.push_stage(Create);
        conditions.push_child(c);
    }
    car.push_child(conditions);

    let gear_id = |s: &str| format!("Car.Transmission.Gear.{s}");
    let mut flows = vec![FlowArc::new(
        StageId("Car:transfer(output)".into()),
        StageId("Car.Transmission:transfer(input)".into()),
    )];
    let mut triggers = vec![TriggerArc {
        src: StageId("Car.Transmission:process".into()),
        dst: StageId(format!("{}:process", gear_id("Neutral"))),
    }];
    for (name, outgoing) in &states {
        for (k, (event, target)) in outgoing.iter().enumerate() {
            let shift_in = if k == 0 {
                StageId(format!("{}:transfer(input)#1", gear_id(name)))
            } else {
                StageId(format!("{}:transfer(input)#{}", gear_id(name), k + 1))
            };
            let shift_out = if k == 0 {
                StageId(format!("{}:transfer(output)", gear_id(name)))
            } else {
                StageId(format!("{}:transfer(output)#{}", gear_id(name), k))
            };
            flows.push(FlowArc::new(
                StageId(format!("Car.DriverSignals.{name}.{event}:transfer(output)")),
                shift_in,
            ));
            flows.push(FlowArc::new(
                shift_out,
                StageId(format!("{}:transfer(input)", gear_id(target))),
            ));
        }
        if *name != "Neutral" {
            triggers.push(TriggerArc {
                src: StageId(format!("{}:process", gear_id(name))),
                dst: StageId(format!("Car.DrivingConditions.{name}:create")),
            });
        }
    }

    build_model("Car", car, flows, triggers).expect("hand transmission fixture builds")
}
