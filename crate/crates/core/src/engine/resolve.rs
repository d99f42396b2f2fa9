use std::collections::HashSet;

use super::{CollisionEvent, Engine, SystemState};
use crate::model::{edge_coords, BilliardState, Mode, Model, Point};
use crate::rational::Rational;

/// Collision rule for one group. Members arrive in collision form: a
/// billiard caught on a vertex is expressed on its incoming edge with
/// `x == 0`. The rule must leave every member with `0 < x <= len`.
pub type GroupRule = fn(&Model, Mode, &mut [BilliardState]);

/// Reversal in place for the original system and for groups of three or
/// more; cycle exchange for pairs in the modified system.
pub fn standard_rule(model: &Model, mode: Mode, group: &mut [BilliardState]) {
    if mode == Mode::Modified && group.len() == 2 {
        let (a, b) = (group[0], group[1]);
        group[0] = BilliardState {
            home: a.home,
            ..reversed(model, &b)
        };
        group[1] = BilliardState {
            home: b.home,
            ..reversed(model, &a)
        };
    } else {
        for m in group.iter_mut() {
            *m = reversed(model, m);
        }
    }
}

fn reversed(model: &Model, b: &BilliardState) -> BilliardState {
    BilliardState {
        orient: b.orient.flip(),
        x: model.step_length(b) - b.x,
        ..*b
    }
}

pub(super) fn resolve(
    engine: &Engine<'_>,
    state: &SystemState,
    event: &CollisionEvent,
) -> SystemState {
    let model = engine.model();
    assert_eq!(state.time, event.time, "resolve called off the event time");
    let mut seen = HashSet::new();
    let mut out = state.clone();
    for g in &event.groups {
        assert!(
            g.members.len() >= 2,
            "collision group of size {}",
            g.members.len()
        );
        let mut members: Vec<BilliardState> = g
            .members
            .iter()
            .map(|&b| {
                assert!(
                    seen.insert(b),
                    "billiard {} in two groups",
                    model.billiard_id(b)
                );
                let s = state.billiards[b];
                assert_eq!(
                    model.point(&s),
                    g.point,
                    "group member is not at the group point"
                );
                match g.point {
                    Point::Vertex(_) => BilliardState {
                        step: model.prev_step(&s),
                        x: Rational::ZERO,
                        ..s
                    },
                    Point::Edge { .. } => s,
                }
            })
            .collect();
        (engine.rule)(model, state.mode, &mut members);
        for (&b, s) in g.members.iter().zip(members) {
            let len = model.step_length(&s);
            assert!(
                s.x.is_positive() && s.x <= len,
                "rule left x = {} outside (0, {len}]",
                s.x
            );
            out.billiards[b] = s;
        }
    }
    assert_no_comoving(model, &out);
    out
}

/// Two billiards with the same position and the same direction would move
/// together forever; valid initial data never leads there.
fn assert_no_comoving(model: &Model, state: &SystemState) {
    let mut seen = HashSet::new();
    for (b, s) in state.billiards.iter().enumerate() {
        assert!(
            seen.insert(edge_coords(model, s)),
            "billiard {} co-moves with another billiard at t = {}",
            model.billiard_id(b),
            state.time
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_interval, Instance, Orientation};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn original_midpoint_pair() {
        let m = Model::new(
            build_interval(&[
                (r("1/4"), Orientation::Forward),
                (r("3/4"), Orientation::Backward),
            ])
            .unwrap(),
        )
        .unwrap();
        let mut g = [
            BilliardState {
                cycle: 0,
                home: 0,
                orient: Orientation::Forward,
                step: 0,
                x: r("1/2"),
            },
            BilliardState {
                cycle: 1,
                home: 1,
                orient: Orientation::Backward,
                step: 0,
                x: r("1/2"),
            },
        ];
        standard_rule(&m, Mode::Original, &mut g);
        assert_eq!((g[0].orient, g[0].x), (Orientation::Backward, r("1/2")));
        assert_eq!((g[1].orient, g[1].x), (Orientation::Forward, r("1/2")));
    }

    /// Two cycles P (5 unit edges) and Q (5 unit edges) on a pentagon.
    fn pentagon() -> Model {
        let json = r#"{"vertices":["a","b","c","d","e"],
            "edges":[{"id":"ab","u":"a","v":"b","length":"1"},{"id":"bc","u":"b","v":"c","length":"1"},
                     {"id":"cd","u":"c","v":"d","length":"1"},{"id":"de","u":"d","v":"e","length":"1"},
                     {"id":"ea","u":"e","v":"a","length":"1"}],
            "cycles":[{"id":"P","verts":["a","b","c","d","e"],"edges":["ab","bc","cd","de","ea"]},
                      {"id":"Q","verts":["b","c","d","e","a"],"edges":["bc","cd","de","ea","ab"]}],
            "billiards":[{"id":"A","cycle":"P","orient":1,"edge_index":2,"x":"1/3"},
                         {"id":"B","cycle":"Q","orient":-1,"edge_index":5,"x":"1/2"}],
            "mode":"modified"}"#;
        Model::new(Instance::from_json(json).unwrap()).unwrap()
    }

    #[test]
    fn modified_pair_swaps_cycles() {
        let m = pentagon();
        let mut g = [
            BilliardState {
                cycle: 0,
                home: 0,
                orient: Orientation::Forward,
                step: 1,
                x: r("1/3"),
            },
            BilliardState {
                cycle: 1,
                home: 1,
                orient: Orientation::Backward,
                step: 4,
                x: r("2/3"),
            },
        ];
        standard_rule(&m, Mode::Modified, &mut g);
        assert_eq!(
            g[0],
            BilliardState {
                cycle: 1,
                home: 0,
                orient: Orientation::Forward,
                step: 4,
                x: r("1/3")
            }
        );
        assert_eq!(
            g[1],
            BilliardState {
                cycle: 0,
                home: 1,
                orient: Orientation::Backward,
                step: 1,
                x: r("2/3")
            }
        );
    }

    #[test]
    fn vertex_triple_departs_along_incoming_edges() {
        let m = pentagon();
        let g = [
            BilliardState {
                cycle: 0,
                home: 0,
                orient: Orientation::Forward,
                step: 1,
                x: r("0"),
            },
            BilliardState {
                cycle: 1,
                home: 1,
                orient: Orientation::Backward,
                step: 4,
                x: r("0"),
            },
            BilliardState {
                cycle: 0,
                home: 0,
                orient: Orientation::Backward,
                step: 3,
                x: r("0"),
            },
        ];
        for mode in [Mode::Original, Mode::Modified] {
            let mut h = g;
            standard_rule(&m, mode, &mut h);
            for (before, after) in g.iter().zip(&h) {
                assert_eq!(after.cycle, before.cycle);
                assert_eq!(after.step, before.step);
                assert_eq!(after.orient, before.orient.flip());
                assert_eq!(after.x, r("1"));
            }
        }
    }
}
