//! Period detection, time reversal and the modified-to-original permutation.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::engine::{canonical_key, event_record, fingerprint, unlabeled_key, Engine, SystemState};
use crate::model::{BilliardState, Mode, Model};
use crate::rational::{gcd_u, Rational};
use crate::trace::EventRecord;

/// How many trailing events a failed period search keeps for diagnosis.
pub const TAIL_EVENTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodReport {
    pub period: Rational,
    pub events_per_period: usize,
    pub recurrence_time: Rational,
    pub states_examined: usize,
    /// Least time at which the unlabeled configuration recurs, when this is
    /// shorter than `period`.
    pub unlabeled_period: Option<Rational>,
}

impl fmt::Display for PeriodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "period: {}", self.period)?;
        writeln!(f, "events_per_period: {}", self.events_per_period)?;
        writeln!(f, "recurrence_time: {}", self.recurrence_time)?;
        writeln!(f, "states_examined: {}", self.states_examined)?;
        match self.unlabeled_period {
            Some(t) => write!(f, "unlabeled_period: {t}"),
            None => write!(f, "unlabeled_period: none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(
        "no recurrence up to t = {bound} ({states_examined} states examined, {events} events)"
    )]
    BoundExhausted {
        bound: Rational,
        states_examined: usize,
        events: usize,
        tail: Vec<EventRecord>,
    },
    #[error("state at t = {repeat} repeats an earlier non-initial state; the dynamics are not invertible (engine bug)")]
    Preperiodic { repeat: Rational },
    #[error("t = {0} is an event time; pick another")]
    EventAtTime(Rational),
    #[error("state at t = {0} has billiards in coincidence")]
    MidCollision(Rational),
    #[error("state count bound overflows u128")]
    BoundOverflow,
    #[error("billiard {billiard} does not occupy any initial slot at t = {time}")]
    SlotMismatch { billiard: String, time: Rational },
}

/// Upper bound on distinct modified-mode states sampled at multiples of the
/// unit length: k! orderings of cycle assignments times 2·n choices of
/// orientation and edge for every billiard.
pub fn state_count_bound(model: &Model) -> Result<u128, AnalysisError> {
    let unit = model.unit_length();
    let k = model.billiard_count() as u128;
    let mut b: u128 = 1;
    for i in 2..=k {
        b = b.checked_mul(i).ok_or(AnalysisError::BoundOverflow)?;
    }
    for s in model.initial() {
        let n = (model.cycle(s.home).length / unit).numer() as u128;
        b = b.checked_mul(2 * n).ok_or(AnalysisError::BoundOverflow)?;
    }
    Ok(b)
}

/// `unit_length · state_count_bound`.
pub fn default_bound(model: &Model) -> Result<Rational, AnalysisError> {
    let b = i128::try_from(state_count_bound(model)?).map_err(|_| AnalysisError::BoundOverflow)?;
    model
        .unit_length()
        .checked_mul(Rational::from_integer(b))
        .map_err(|_| AnalysisError::BoundOverflow)
}

/// Least `T > 0` with `state(T) == state(0)`, using the standard rule.
pub fn find_period(model: &Model, bound: Option<Rational>) -> Result<PeriodReport, AnalysisError> {
    find_period_with(&Engine::new(model), bound)
}

/// Between events the motion is free, so instead of sampling on a grid the
/// search computes the exact instants in each free stretch at which the
/// first billiard is back in its initial slot, and compares the full state
/// only there. Post-event states are also fingerprinted to catch a repeat
/// that bypasses the initial state.
pub fn find_period_with(
    engine: &Engine<'_>,
    bound: Option<Rational>,
) -> Result<PeriodReport, AnalysisError> {
    let model = engine.model();
    let bound = match bound {
        Some(b) => b,
        None => default_bound(model)?,
    };
    let init = SystemState::initial(model);
    let mut search = Search {
        model,
        starts: model
            .cycles()
            .iter()
            .map(|c| {
                let mut acc = Rational::ZERO;
                c.steps
                    .iter()
                    .map(|st| {
                        let here = acc;
                        acc = acc + model.edge(st.edge).length;
                        here
                    })
                    .collect()
            })
            .collect(),
        init_unlabeled: unlabeled_key(model, &init),
        init,
        seen: HashSet::new(),
        unlabeled_period: None,
        examined: 0,
    };
    let chunk = engine.default_horizon() * Rational::from_integer(4);
    let mut tail: VecDeque<EventRecord> = VecDeque::new();
    let mut events = 0usize;
    let mut cur = search.init.clone();
    while cur.time < bound {
        let limit = (cur.time + chunk).min(bound);
        let next = engine.next_event(&cur, limit);
        let end = next.as_ref().map_or(limit, |e| e.time);
        if let Some(found) = search.free_stretch(engine, &cur, end, next.is_none(), events) {
            return Ok(found);
        }
        cur = engine.advance(&cur, end - cur.time);
        if let Some(ev) = next {
            let after = engine.resolve(&cur, &ev);
            events += 1;
            if tail.len() == TAIL_EVENTS {
                tail.pop_front();
            }
            tail.push_back(event_record(model, &cur, &after, &ev));
            cur = after;
            if let Some(found) = search.check(&cur, events) {
                return Ok(found);
            }
            if !search.seen.insert(fingerprint(&cur)) {
                return Err(AnalysisError::Preperiodic { repeat: cur.time });
            }
        }
    }
    Err(AnalysisError::BoundExhausted {
        bound,
        states_examined: search.examined,
        events,
        tail: tail.into_iter().collect(),
    })
}

struct Search<'m> {
    model: &'m Model,
    /// Arc length from the first cycle vertex to the start of each step.
    starts: Vec<Vec<Rational>>,
    init: SystemState,
    init_unlabeled: Vec<(String, crate::model::Orientation, usize, Rational)>,
    seen: HashSet<u128>,
    unlabeled_period: Option<Rational>,
    examined: usize,
}

impl Search<'_> {
    fn check(&mut self, s: &SystemState, events: usize) -> Option<PeriodReport> {
        self.examined += 1;
        if self.unlabeled_period.is_none() && unlabeled_key(self.model, s) == self.init_unlabeled {
            self.unlabeled_period = Some(s.time);
        }
        (s.billiards == self.init.billiards).then(|| {
            debug_assert_eq!(
                canonical_key(self.model, s),
                canonical_key(self.model, &self.init)
            );
            PeriodReport {
                period: s.time,
                events_per_period: events,
                recurrence_time: s.time,
                states_examined: self.examined,
                unlabeled_period: self.unlabeled_period.filter(|&u| u < s.time),
            }
        })
    }

    /// Distance along the cycle, in the direction of travel, from the first
    /// cycle vertex.
    fn arc(&self, b: &BilliardState) -> Rational {
        let start = self.starts[b.cycle][b.step];
        match b.orient {
            crate::model::Orientation::Forward => start + self.model.step_length(b) - b.x,
            crate::model::Orientation::Backward => start + b.x,
        }
    }

    /// Free-flight time in `(0, lap]` until `b` occupies `slot`, if it ever does.
    fn delay(&self, b: &BilliardState, slot: &BilliardState) -> Option<Rational> {
        if b.cycle != slot.cycle || b.orient != slot.orient {
            return None;
        }
        let lap = self.model.cycle(b.cycle).length;
        let diff = match b.orient {
            crate::model::Orientation::Forward => self.arc(slot) - self.arc(b),
            crate::model::Orientation::Backward => self.arc(b) - self.arc(slot),
        };
        let d = diff.rem_euclid(lap);
        Some(if d.is_zero() { lap } else { d })
    }

    /// Checks every instant in `(from.time, end)` (or `(from.time, end]`
    /// when `inclusive`) at which some billiard occupies the first initial
    /// slot.
    fn free_stretch(
        &mut self,
        engine: &Engine<'_>,
        from: &SystemState,
        end: Rational,
        inclusive: bool,
        events: usize,
    ) -> Option<PeriodReport> {
        let slot = self.init.billiards[0];
        let movers: Vec<&BilliardState> = if self.unlabeled_period.is_none() {
            from.billiards.iter().collect()
        } else {
            vec![&from.billiards[0]]
        };
        let mut times = Vec::new();
        for b in movers {
            let Some(d) = self.delay(b, &slot) else {
                continue;
            };
            let lap = self.model.cycle(b.cycle).length;
            let mut t = from.time + d;
            while t < end || (inclusive && t == end) {
                times.push(t);
                t = t + lap;
            }
        }
        times.sort();
        times.dedup();
        times
            .into_iter()
            .find_map(|t| self.check(&engine.advance(from, t - from.time), events))
    }
}

/// Flips every billiard in place. A billiard sitting on the start vertex of
/// its edge is moved to the neighbouring cycle edge it will now enter.
pub fn reverse_state(model: &Model, state: &SystemState) -> Result<SystemState, AnalysisError> {
    if !state.groups(model).is_empty() {
        return Err(AnalysisError::MidCollision(state.time));
    }
    let billiards = state
        .billiards
        .iter()
        .map(|b| {
            let len = model.step_length(b);
            let flipped = BilliardState {
                orient: b.orient.flip(),
                ..*b
            };
            if b.x == len {
                let step = model.next_step(&flipped);
                BilliardState {
                    step,
                    x: model.step_length(&BilliardState { step, ..flipped }),
                    ..flipped
                }
            } else {
                BilliardState {
                    x: len - b.x,
                    ..flipped
                }
            }
        })
        .collect();
    Ok(SystemState {
        time: Rational::ZERO,
        billiards,
        mode: state.mode,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversibilityReport {
    pub t: Rational,
    pub passed: bool,
    pub forward_events: usize,
    pub backward_events: usize,
    /// Billiards whose final state differs from their initial one.
    pub mismatched: Vec<String>,
}

/// Runs `t` forward, reverses, runs `t` again and reverses; the result must
/// be the initial state.
pub fn verify_reversibility(
    engine: &Engine<'_>,
    t: Rational,
) -> Result<ReversibilityReport, AnalysisError> {
    let model = engine.model();
    let init = SystemState::initial(model);
    let (there, forward_events) = run_avoiding(engine, &init, t)?;
    let (back, backward_events) = run_avoiding(engine, &reverse_state(model, &there)?, t)?;
    let end = reverse_state(model, &back)?;
    let mismatched: Vec<String> = init
        .billiards
        .iter()
        .zip(&end.billiards)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| model.billiard_id(i).to_string())
        .collect();
    Ok(ReversibilityReport {
        t,
        passed: mismatched.is_empty(),
        forward_events,
        backward_events,
        mismatched,
    })
}

fn run_avoiding(
    engine: &Engine<'_>,
    from: &SystemState,
    dt: Rational,
) -> Result<(SystemState, usize), AnalysisError> {
    let end = from.time + dt;
    let mut cur = from.clone();
    let mut events = 0;
    while cur.time < end {
        match engine.step_detailed(&cur, end) {
            Ok((_, after, ev)) => {
                if ev.time == end {
                    return Err(AnalysisError::EventAtTime(dt));
                }
                events += 1;
                cur = after;
            }
            Err(s) => cur = s,
        }
    }
    Ok((cur, events))
}

/// Permutation of billiard labels. `mapping[b]` is the billiard whose
/// initial slot `b` occupies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilliardPermutation {
    pub mapping: Vec<usize>,
    pub order: u64,
}

impl BilliardPermutation {
    pub fn from_mapping(mapping: Vec<usize>) -> Self {
        let mut order: u64 = 1;
        let mut done = vec![false; mapping.len()];
        for start in 0..mapping.len() {
            let mut len = 0u64;
            let mut i = start;
            while !done[i] {
                done[i] = true;
                i = mapping[i];
                len += 1;
            }
            if len > 0 {
                order = order / gcd_u(order as u128, len as u128) as u64 * len;
            }
        }
        BilliardPermutation { mapping, order }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(billiard id, id of the slot it occupies)`, in index order.
    pub fn id_pairs<'a>(&self, model: &'a Model) -> Vec<(&'a str, &'a str)> {
        self.mapping
            .iter()
            .enumerate()
            .map(|(i, &j)| (model.billiard_id(i), model.billiard_id(j)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationReport {
    /// Recurrence time of the modified system.
    pub t_mod: Rational,
    pub permutation: BilliardPermutation,
}

/// Runs the modified system to its period `T_mod`, then reads off how the
/// original system has permuted the initial slots at `T_mod`.
///
/// Both systems have the same unlabeled configuration at all times, so at
/// `T_mod` the original billiards sit on the initial slots in some order.
pub fn extract_permutation(model: &Model) -> Result<PermutationReport, AnalysisError> {
    let modified = model.with_mode(Mode::Modified);
    let t_mod = find_period(&modified, None)?.period;
    let original = model.with_mode(Mode::Original);
    let init = SystemState::initial(&original);
    let at = Engine::new(&original).state_at(&init, t_mod);
    let slot = |b: &BilliardState| (b.cycle, b.orient, b.step, b.x);
    let mapping = at
        .billiards
        .iter()
        .enumerate()
        .map(|(i, b)| {
            init.billiards
                .iter()
                .position(|s| slot(s) == slot(b))
                .ok_or_else(|| AnalysisError::SlotMismatch {
                    billiard: original.billiard_id(i).to_string(),
                    time: t_mod,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PermutationReport {
        t_mod,
        permutation: BilliardPermutation::from_mapping(mapping),
    })
}
