use billiards_core::engine::{fingerprint, unlabeled_key};
use billiards_core::model::{random_instance, Instance, Limits, Mode, Model};
use billiards_core::{Engine, Rational, SystemState, Trace, Until};
use proptest::prelude::*;

fn model(seed: u64) -> Model {
    Model::new(random_instance(seed, &Limits::default()).unwrap()).unwrap()
}

fn horizon(m: &Model) -> Rational {
    m.unit_length() * Rational::from_integer(20)
}

#[test]
fn event_times_are_multiples_of_half_the_grid() {
    for seed in 1..=80 {
        let m = model(seed);
        let tick = m.grid() / Rational::from_integer(2);
        let tr = Engine::new(&m).run(&SystemState::initial(&m), Until::Time(horizon(&m)));
        let mut last = Rational::ZERO;
        for ev in &tr.events {
            assert!(
                ev.t.is_multiple_of(tick),
                "seed {seed}: event at {} off the {tick} grid",
                ev.t
            );
            assert!(ev.t > last, "seed {seed}: events not strictly increasing");
            last = ev.t;
        }
    }
}

#[test]
fn both_modes_share_the_unlabeled_configuration() {
    for seed in 1..=40 {
        let m = model(seed);
        let (o, md) = (m.with_mode(Mode::Original), m.with_mode(Mode::Modified));
        for k in 1..=15 {
            let t = m.unit_length() * Rational::new(k, 3).unwrap();
            let a = Engine::new(&o).state_at(&SystemState::initial(&o), t);
            let b = Engine::new(&md).state_at(&SystemState::initial(&md), t);
            assert_eq!(
                unlabeled_key(&o, &a),
                unlabeled_key(&md, &b),
                "seed {seed} t {t}"
            );
        }
    }
}

#[test]
fn original_mode_never_changes_cycles() {
    for seed in 1..=40 {
        let m = model(seed);
        let s = Engine::new(&m).state_at(&SystemState::initial(&m), horizon(&m));
        for (now, start) in s.billiards.iter().zip(m.initial()) {
            assert_eq!(now.cycle, start.cycle);
        }
    }
}

#[test]
fn modified_mode_keeps_home_fields() {
    for seed in 1..=40 {
        let m = model(seed).with_mode(Mode::Modified);
        let s = Engine::new(&m).state_at(&SystemState::initial(&m), horizon(&m));
        for (now, start) in s.billiards.iter().zip(m.initial()) {
            assert_eq!(now.home, start.home);
        }
    }
}

#[test]
fn replay_is_bit_exact() {
    for seed in 1..=20 {
        let m = model(seed);
        let e = Engine::new(&m);
        let a = e.run(&SystemState::initial(&m), Until::Time(horizon(&m)));
        let b = e.run(&SystemState::initial(&m), Until::Time(horizon(&m)));
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(Trace::from_jsonl(&a.to_jsonl()).unwrap(), a);
    }
}

#[test]
fn event_budget_stops_runs() {
    let m = model(3);
    let tr = Engine::new(&m).run(&SystemState::initial(&m), Until::Events(2));
    assert!(tr.events.len() <= 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn instance_files_round_trip(seed in any::<u64>()) {
        let inst = random_instance(seed, &Limits::default()).unwrap();
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back.hash(), inst.hash());
    }

    #[test]
    fn splitting_a_run_changes_nothing(seed in 1u64..500, cut in 1i128..40) {
        let m = model(seed);
        let e = Engine::new(&m);
        let h = horizon(&m);
        let mid = h * Rational::new(cut, 40).unwrap();
        let direct = e.state_at(&SystemState::initial(&m), h);
        let split = e.state_at(&e.state_at(&SystemState::initial(&m), mid), h);
        prop_assert_eq!(fingerprint(&direct), fingerprint(&split));
        prop_assert_eq!(direct, split);
    }
}
