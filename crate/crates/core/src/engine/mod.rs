//! Exact event-driven dynamics.
//!
//! Billiards move at unit speed along their cycles. [`Engine::next_event`]
//! finds the first instant at which two or more billiards share a point,
//! [`Engine::resolve`] applies the collision rule of the model's [`Mode`], and
//! [`Engine::run`] strings the two together into a [`Trace`].

mod events;
mod key;
mod resolve;

use std::collections::BTreeMap;

use crate::model::{BilliardState, Mode, Model, Point};
use crate::rational::Rational;
use crate::trace::{EventRecord, GroupRecord, StateRecord, Trace};

pub use key::{canonical_key, fingerprint, parse_key, unlabeled_key, KeyError};
pub use resolve::{standard_rule, GroupRule};

/// Snapshot of the whole system. `billiards` is indexed like the model's ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemState {
    pub time: Rational,
    pub billiards: Vec<BilliardState>,
    pub mode: Mode,
}

impl SystemState {
    pub fn initial(model: &Model) -> Self {
        SystemState {
            time: Rational::ZERO,
            billiards: model.initial().to_vec(),
            mode: model.mode(),
        }
    }

    pub fn record(&self, model: &Model) -> StateRecord {
        StateRecord {
            time: self.time,
            billiards: self
                .billiards
                .iter()
                .enumerate()
                .map(|(b, s)| model.record(b, s))
                .collect(),
        }
    }

    /// Coincidence groups present at this instant, keyed by point.
    pub fn groups(&self, model: &Model) -> Vec<CollisionGroup> {
        let mut by_point: BTreeMap<Point, Vec<usize>> = BTreeMap::new();
        for (b, s) in self.billiards.iter().enumerate() {
            by_point.entry(model.point(s)).or_default().push(b);
        }
        by_point
            .into_iter()
            .filter(|(_, m)| m.len() >= 2)
            .map(|(point, members)| CollisionGroup { point, members })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionGroup {
    pub point: Point,
    /// Billiard indices, ascending.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionEvent {
    pub time: Rational,
    pub groups: Vec<CollisionGroup>,
}

/// Stopping rule for [`Engine::run`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Until {
    /// Run to exactly this time, resolving any event that lands on it.
    Time(Rational),
    /// Stop after this many events, or once the system provably never
    /// collides again.
    Events(usize),
}

pub const DEFAULT_EVENT_CAP: usize = 1_000_000;

#[derive(Clone, Copy)]
pub struct Engine<'m> {
    model: &'m Model,
    rule: GroupRule,
    event_cap: usize,
}

impl<'m> Engine<'m> {
    pub fn new(model: &'m Model) -> Self {
        Engine {
            model,
            rule: standard_rule,
            event_cap: DEFAULT_EVENT_CAP,
        }
    }

    /// Replaces the per-group collision rule. Used to run rule variants,
    /// e.g. deliberately broken ones in negative-control tests.
    pub fn with_rule(mut self, rule: GroupRule) -> Self {
        self.rule = rule;
        self
    }

    /// Traces stop (flagged truncated) after this many events.
    pub fn with_event_cap(mut self, cap: usize) -> Self {
        self.event_cap = cap;
        self
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// Length of the longest cycle; default look-ahead horizon.
    pub fn default_horizon(&self) -> Rational {
        self.model
            .cycles()
            .iter()
            .map(|c| c.length)
            .max()
            .unwrap_or(Rational::ONE)
    }

    /// Moves every billiard `dt` along its cycle with no collision handling.
    /// The caller guarantees no coincidence inside `(time, time + dt)`.
    pub fn advance(&self, state: &SystemState, dt: Rational) -> SystemState {
        assert!(!dt.is_negative(), "advance by negative time {dt}");
        SystemState {
            time: state.time + dt,
            billiards: state
                .billiards
                .iter()
                .map(|b| advance_one(self.model, b, dt))
                .collect(),
            mode: state.mode,
        }
    }

    /// First instant in `(state.time, horizon]` with a coincidence, if any.
    pub fn next_event(&self, state: &SystemState, horizon: Rational) -> Option<CollisionEvent> {
        let t = events::first_meeting(self, state, horizon)?;
        let at = self.advance(state, t - state.time);
        let groups = at.groups(self.model);
        assert!(
            !groups.is_empty(),
            "meeting predicted at {t} but no coincidence found"
        );
        Some(CollisionEvent { time: t, groups })
    }

    /// Applies the collision rule to every group of `event`. `state` must be
    /// at the event time.
    pub fn resolve(&self, state: &SystemState, event: &CollisionEvent) -> SystemState {
        resolve::resolve(self, state, event)
    }

    /// Advances to the next event within `horizon` and resolves it, or to
    /// `horizon` if there is none.
    pub fn step(
        &self,
        state: &SystemState,
        horizon: Rational,
    ) -> (SystemState, Option<CollisionEvent>) {
        self.step_detailed(state, horizon)
            .map_or_else(|s| (s, None), |(_, after, ev)| (after, Some(ev)))
    }

    /// Like [`step`](Self::step) but also returns the pre-resolution state.
    /// `Err` carries the state advanced to `horizon` when no event occurs.
    #[allow(clippy::type_complexity)]
    pub fn step_detailed(
        &self,
        state: &SystemState,
        horizon: Rational,
    ) -> Result<(SystemState, SystemState, CollisionEvent), SystemState> {
        match self.next_event(state, horizon) {
            Some(ev) => {
                let before = self.advance(state, ev.time - state.time);
                let after = self.resolve(&before, &ev);
                Ok((before, after, ev))
            }
            None => Err(self.advance(state, horizon - state.time)),
        }
    }

    /// Free-flight return time: after this long without an event, every
    /// billiard is back where it started, so no event will ever occur.
    pub fn idle_limit(&self) -> Rational {
        let unit = self.model.unit_length();
        let laps = self
            .model
            .cycles()
            .iter()
            .map(|c| (c.length / unit).numer())
            .fold(1i128, |acc, n| {
                acc / crate::rational::gcd_u(acc as u128, n as u128) as i128 * n
            });
        unit * Rational::from_integer(laps)
    }

    /// Runs from `state` and records every event.
    pub fn run(&self, state: &SystemState, until: Until) -> Trace {
        let model = self.model;
        let mut trace = Trace::new(model, state.record(model));
        let mut cur = state.clone();
        let idle = self.idle_limit();
        let mut last_event = cur.time;
        loop {
            if trace.events.len() >= self.event_cap {
                trace.truncated = true;
                break;
            }
            let horizon = match until {
                Until::Time(t) => {
                    if cur.time >= t {
                        break;
                    }
                    t
                }
                Until::Events(n) => {
                    if trace.events.len() >= n || cur.time - last_event >= idle {
                        break;
                    }
                    last_event + idle
                }
            };
            match self.step_detailed(&cur, horizon) {
                Ok((before, after, ev)) => {
                    trace.events.push(event_record(model, &before, &after, &ev));
                    last_event = ev.time;
                    cur = after;
                }
                Err(s) => cur = s,
            }
        }
        trace.final_state = cur.record(model);
        trace
    }

    /// State at absolute time `t >= state.time`.
    pub fn state_at(&self, state: &SystemState, t: Rational) -> SystemState {
        let mut cur = state.clone();
        while cur.time < t {
            cur = self.step(&cur, t).0;
        }
        cur
    }
}

pub(crate) fn event_record(
    model: &Model,
    before: &SystemState,
    after: &SystemState,
    ev: &CollisionEvent,
) -> EventRecord {
    EventRecord {
        t: ev.time,
        groups: ev
            .groups
            .iter()
            .map(|g| GroupRecord {
                point: g.point.to_record(model),
                members: g
                    .members
                    .iter()
                    .map(|&b| model.billiard_id(b).to_string())
                    .collect(),
                before: g
                    .members
                    .iter()
                    .map(|&b| model.record(b, &before.billiards[b]))
                    .collect(),
                after: g
                    .members
                    .iter()
                    .map(|&b| model.record(b, &after.billiards[b]))
                    .collect(),
            })
            .collect(),
    }
}

/// Free motion of one billiard for `dt`. Landing exactly on a vertex yields
/// the post-transition form (`x` = full length of the next edge).
pub fn advance_one(model: &Model, b: &BilliardState, dt: Rational) -> BilliardState {
    let lap = model.cycle(b.cycle).length;
    let mut remaining = if dt >= lap { dt.rem_euclid(lap) } else { dt };
    let mut cur = *b;
    while remaining >= cur.x {
        remaining = remaining - cur.x;
        cur.step = model.next_step(&cur);
        cur.x = model.step_length(&cur);
    }
    cur.x = cur.x - remaining;
    cur
}
