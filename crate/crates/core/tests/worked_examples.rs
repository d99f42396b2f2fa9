use billiards_core::analysis::{
    extract_permutation, find_period, reverse_state, state_count_bound, verify_reversibility,
};
use billiards_core::model::{build_circle, build_interval, Instance, Orientation, Point};
use billiards_core::oracle::{oracle_period, oracle_run};
use billiards_core::{compare_traces, Comparison, Engine, Model, Rational, SystemState, Until};

const F: Orientation = Orientation::Forward;
const B: Orientation = Orientation::Backward;

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn interval() -> Model {
    Model::new(build_interval(&[(r("1/4"), F), (r("3/4"), B)]).unwrap()).unwrap()
}

#[test]
fn two_disjoint_pairs_resolve_in_one_event() {
    let m = Model::new(
        build_circle(
            8,
            &[(r("1/4"), F), (r("3/4"), B), (r("17/4"), F), (r("19/4"), B)],
        )
        .unwrap(),
    )
    .unwrap();
    let e = Engine::new(&m);
    let (after, ev) = e.step(&SystemState::initial(&m), r("10"));
    let ev = ev.unwrap();
    assert_eq!(ev.time, r("1/4"));
    assert_eq!(ev.groups.len(), 2);
    assert_eq!(
        ev.groups[0].point,
        Point::Edge {
            edge: 0,
            offset: r("1/2")
        }
    );
    assert_eq!(
        ev.groups[1].point,
        Point::Edge {
            edge: 4,
            offset: r("1/2")
        }
    );
    for (s, b) in after.billiards.iter().zip(m.initial()) {
        assert_eq!(s.orient, b.orient.flip());
    }
    let fast = e.run(&SystemState::initial(&m), Until::Time(r("8")));
    let slow = oracle_run(&m, r("8")).unwrap();
    assert_eq!(compare_traces(&fast, &slow).unwrap(), Comparison::Equal);
}

#[test]
fn reversed_run_retraces_the_forward_run() {
    let m = interval();
    let e = Engine::new(&m);
    let t = r("3/2");
    let end = e.state_at(&SystemState::initial(&m), t);
    let rev = reverse_state(&m, &end).unwrap();
    for s in ["1/8", "1/3", "1/2", "7/8", "1", "4/3"] {
        let back = e.state_at(&rev, r(s));
        let fwd = e.state_at(&SystemState::initial(&m), t - r(s));
        assert_eq!(
            reverse_state(&m, &back).unwrap().billiards,
            fwd.billiards,
            "s = {s}"
        );
    }
}

#[test]
fn interval_round_trip_at_one() {
    assert!(
        verify_reversibility(&Engine::new(&interval()), r("1"))
            .unwrap()
            .passed
    );
}

#[test]
fn small_periods_agree_with_the_oracle() {
    let cases = [
        (interval(), "2"),
        (
            Model::new(build_circle(4, &[(r("0"), F), (r("2"), B)]).unwrap()).unwrap(),
            "4",
        ),
        (
            Model::new(build_circle(3, &[(r("0"), F)]).unwrap()).unwrap(),
            "3",
        ),
        (
            Model::new(build_circle(2, &[(r("0"), F), (r("1"), F)]).unwrap()).unwrap(),
            "2",
        ),
    ];
    for (m, want) in cases {
        assert_eq!(find_period(&m, None).unwrap().period, r(want));
        assert_eq!(oracle_period(&m, r("100")).unwrap(), Some(r(want)));
    }
}

#[test]
fn three_on_a_triangle_permute_cyclically() {
    let m = Model::new(build_circle(3, &[(r("0"), F), (r("1"), B), (r("2"), B)]).unwrap()).unwrap();
    let rep = extract_permutation(&m).unwrap();
    assert_eq!(rep.t_mod, r("3"));
    assert_eq!(rep.permutation.order, 3);
    assert_eq!(rep.permutation.mapping, vec![2, 0, 1]);
    let period = find_period(&m, None).unwrap().period;
    assert_eq!(period, r("9"));
    assert_eq!(oracle_period(&m, r("100")).unwrap(), Some(r("9")));
    assert!((rep.t_mod * Rational::from_integer(3) / period).is_integer());
}

#[test]
fn bound_instances() {
    let tri = Model::new(build_circle(3, &[(r("1/2"), F)]).unwrap()).unwrap();
    assert_eq!(state_count_bound(&tri).unwrap(), 6);
    assert_eq!(state_count_bound(&interval()).unwrap(), 32);
    assert!(find_period(&tri, None).unwrap().period <= r("6"));
}

#[test]
fn non_unit_interval_period() {
    // Interval of length 3/2 stored as a file, not through the builder.
    let json = r#"{"vertices":["u","v"],"edges":[{"id":"e","u":"u","v":"v","length":"3/2"}],
        "cycles":[{"id":"c1","verts":["u","v"],"edges":["e","e"]},{"id":"c2","verts":["u","v"],"edges":["e","e"]}],
        "billiards":[{"id":"a","cycle":"c1","orient":1,"edge_index":1,"x":"1"},
                     {"id":"b","cycle":"c2","orient":-1,"edge_index":1,"x":"1"}],
        "mode":"original"}"#;
    let m = Model::new(Instance::from_json(json).unwrap()).unwrap();
    let p = find_period(&m, None).unwrap().period;
    assert_eq!(oracle_period(&m, r("100")).unwrap(), Some(p));
}
