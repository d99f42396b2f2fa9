//! Brute-force time-stepped simulator used to cross-check the event engine.
//!
//! Time advances in ticks of `h = g / 2`, where `g` is the gcd of every edge
//! length and every initial position. Positions then stay on a grid fine
//! enough that every coincidence falls exactly on a tick; the oracle checks
//! this at run time by watching for pairs that swap order on an edge between
//! ticks. Collision handling is written independently of the engine.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::engine::{CollisionEvent, CollisionGroup, SystemState};
use crate::model::{BilliardState, Mode, Model, Point, Pose};
use crate::rational::Rational;
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub step: Rational,
    pub horizon: Rational,
}

impl OracleConfig {
    pub fn for_model(model: &Model, horizon: Rational) -> Self {
        OracleConfig {
            step: model.grid() / Rational::from_integer(2),
            horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("billiards {a} and {b} crossed on edge {edge} between ticks ending at t = {time}; step too coarse")]
    MissedCrossing {
        a: String,
        b: String,
        edge: String,
        time: Rational,
    },
    #[error("billiard {billiard} has x = {x}, not on the tick grid {step}")]
    OffGrid {
        billiard: String,
        x: Rational,
        step: Rational,
    },
}

/// Runs the oracle with the default step `g / 2`.
pub fn oracle_run(model: &Model, horizon: Rational) -> Result<Trace, OracleError> {
    oracle_run_with(model, OracleConfig::for_model(model, horizon))
}

pub fn oracle_run_with(model: &Model, cfg: OracleConfig) -> Result<Trace, OracleError> {
    let h = cfg.step;
    let init = SystemState::initial(model);
    let mut trace = Trace::new(model, init.record(model));
    let mut cur = init;
    while cur.time + h <= cfg.horizon {
        let (next, event) = advance_tick(model, &cur, h)?;
        trace.events.extend(event);
        cur = next;
    }
    if cur.time < cfg.horizon {
        // Partial tick: no coincidence can fall strictly between grid points.
        let rest = cfg.horizon - cur.time;
        cur = SystemState {
            time: cfg.horizon,
            billiards: cur.billiards.iter().map(|b| walk(model, b, rest)).collect(),
            mode: cur.mode,
        };
    }
    trace.final_state = cur.record(model);
    Ok(trace)
}

/// First tick time `T > 0` at which the full state equals the initial one,
/// or `None` if there is none up to `bound`. Periods are multiples of the
/// tick, so checking at ticks only is enough.
pub fn oracle_period(model: &Model, bound: Rational) -> Result<Option<Rational>, OracleError> {
    let h = OracleConfig::for_model(model, bound).step;
    let init = SystemState::initial(model);
    let mut cur = init.clone();
    while cur.time + h <= bound {
        cur = advance_tick(model, &cur, h)?.0;
        if cur.billiards == init.billiards {
            return Ok(Some(cur.time));
        }
    }
    Ok(None)
}

fn advance_tick(
    model: &Model,
    cur: &SystemState,
    h: Rational,
) -> Result<(SystemState, Option<crate::trace::EventRecord>), OracleError> {
    let ticked = tick(model, cur, h)?;
    check_no_crossing(model, cur, &ticked)?;
    let groups = coincidences(model, &ticked);
    if groups.is_empty() {
        return Ok((ticked, None));
    }
    let ev = CollisionEvent {
        time: ticked.time,
        groups,
    };
    let after = collide(model, &ticked, &ev);
    let rec = crate::engine::event_record(model, &ticked, &after, &ev);
    Ok((after, Some(rec)))
}

fn walk(model: &Model, b: &BilliardState, mut d: Rational) -> BilliardState {
    let mut s = *b;
    while d >= s.x {
        d = d - s.x;
        s.step = model.next_step(&s);
        s.x = model.step_length(&s);
    }
    s.x = s.x - d;
    s
}

fn tick(model: &Model, state: &SystemState, h: Rational) -> Result<SystemState, OracleError> {
    let mut out = state.clone();
    out.time = state.time + h;
    for (i, b) in out.billiards.iter_mut().enumerate() {
        if b.x < h {
            return Err(OracleError::OffGrid {
                billiard: model.billiard_id(i).to_string(),
                x: b.x,
                step: h,
            });
        }
        b.x = b.x - h;
        if b.x.is_zero() {
            b.step = model.next_step(b);
            b.x = model.step_length(b);
        }
    }
    Ok(out)
}

fn check_no_crossing(
    model: &Model,
    before: &SystemState,
    after: &SystemState,
) -> Result<(), OracleError> {
    let inside = |s: &BilliardState| match model.pose(s) {
        Pose::OnEdge { edge, offset, .. } => Some((edge, offset)),
        Pose::AtVertex { .. } => None,
    };
    let n = before.billiards.len();
    for a in 0..n {
        for b in a + 1..n {
            let (Some((e0, a0)), Some((f0, b0))) =
                (inside(&before.billiards[a]), inside(&before.billiards[b]))
            else {
                continue;
            };
            let (Some((e1, a1)), Some((f1, b1))) =
                (inside(&after.billiards[a]), inside(&after.billiards[b]))
            else {
                continue;
            };
            if e0 == f0 && e1 == f1 && e0 == e1 && a0 != b0 && a1 != b1 && (a0 < b0) != (a1 < b1) {
                return Err(OracleError::MissedCrossing {
                    a: model.billiard_id(a).to_string(),
                    b: model.billiard_id(b).to_string(),
                    edge: model.edge_id(e0).to_string(),
                    time: after.time,
                });
            }
        }
    }
    Ok(())
}

fn coincidences(model: &Model, state: &SystemState) -> Vec<CollisionGroup> {
    let mut at: BTreeMap<Point, Vec<usize>> = BTreeMap::new();
    for (i, b) in state.billiards.iter().enumerate() {
        at.entry(model.point(b)).or_default().push(i);
    }
    at.into_iter()
        .filter(|(_, v)| v.len() > 1)
        .map(|(point, members)| CollisionGroup { point, members })
        .collect()
}

fn collide(model: &Model, state: &SystemState, ev: &CollisionEvent) -> SystemState {
    let mut out = state.clone();
    for g in &ev.groups {
        // Incoming-edge form: a billiard on a vertex has x = 0 on the edge it
        // arrived along.
        let incoming: Vec<BilliardState> = g
            .members
            .iter()
            .map(|&i| {
                let b = state.billiards[i];
                if matches!(g.point, Point::Vertex(_)) {
                    let n = model.cycle(b.cycle).steps.len();
                    let step = if b.orient.sign() > 0 {
                        (b.step + n - 1) % n
                    } else {
                        (b.step + 1) % n
                    };
                    BilliardState {
                        step,
                        x: Rational::ZERO,
                        ..b
                    }
                } else {
                    b
                }
            })
            .collect();
        let flip = |b: &BilliardState| {
            let len = model.edge(model.cycle(b.cycle).steps[b.step].edge).length;
            BilliardState {
                orient: -b.orient,
                x: len - b.x,
                ..*b
            }
        };
        if state.mode == Mode::Modified && incoming.len() == 2 {
            let (p, q) = (incoming[0], incoming[1]);
            out.billiards[g.members[0]] = BilliardState {
                home: p.home,
                ..flip(&q)
            };
            out.billiards[g.members[1]] = BilliardState {
                home: q.home,
                ..flip(&p)
            };
        } else {
            for (&i, b) in g.members.iter().zip(&incoming) {
                out.billiards[i] = flip(b);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_interval, Instance, Orientation};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn interval_hand_trace() {
        let m = Model::new(
            build_interval(&[
                (r("1/4"), Orientation::Forward),
                (r("3/4"), Orientation::Backward),
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(OracleConfig::for_model(&m, r("2")).step, r("1/8"));
        let t = oracle_run(&m, r("2")).unwrap();
        let times: Vec<_> = t.events.iter().map(|e| e.t).collect();
        assert_eq!(times, vec![r("1/4"), r("5/4")]);
        assert_eq!(t.final_state.billiards, t.header.initial.billiards);
    }

    #[test]
    fn single_billiard_returns_after_a_lap() {
        let json = r#"{"vertices":["v1","v2","v3"],
            "edges":[{"id":"a","u":"v1","v":"v2","length":"1"},{"id":"b","u":"v2","v":"v3","length":"1"},
                     {"id":"c","u":"v3","v":"v1","length":"1"}],
            "cycles":[{"id":"t","verts":["v1","v2","v3"],"edges":["a","b","c"]}],
            "billiards":[{"id":"b1","cycle":"t","orient":1,"edge_index":1,"x":"1/2"}],
            "mode":"original"}"#;
        let m = Model::new(Instance::from_json(json).unwrap()).unwrap();
        let t = oracle_run(&m, r("3")).unwrap();
        assert!(t.events.is_empty());
        assert_eq!(t.final_state.billiards, t.header.initial.billiards);
    }

    #[test]
    fn coarse_step_is_caught() {
        // Gap 1/4 closes at t = 1/8; a step of 1/4 jumps straight over it.
        let m = Model::new(
            build_interval(&[
                (r("1/4"), Orientation::Forward),
                (r("1/2"), Orientation::Backward),
            ])
            .unwrap(),
        )
        .unwrap();
        let err = oracle_run_with(
            &m,
            OracleConfig {
                step: r("1/4"),
                horizon: r("1"),
            },
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::MissedCrossing { .. }), "{err:?}");
        assert!(oracle_run(&m, r("1")).is_ok());
    }

    #[test]
    fn partial_final_tick() {
        let m = Model::new(build_interval(&[(r("1/2"), Orientation::Forward)]).unwrap()).unwrap();
        let t = oracle_run(&m, r("1/3")).unwrap();
        assert_eq!(t.final_state.time, r("1/3"));
        assert_eq!(t.final_state.billiards[0].x, r("1/6"));
    }
}
