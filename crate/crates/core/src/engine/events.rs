//! Earliest coincidence time under free flight.
//!
//! Each billiard's free trajectory is cut into per-edge segments. Two
//! billiards can only meet where their segments overlap in time: either
//! head-on inside a shared edge, or at a common vertex at a segment boundary.
//! The search proceeds window by window so a far horizon costs nothing until
//! it is needed.
//!
//! From any state, all positions are multiples of `g` (the gcd of the edge
//! lengths and current positions), and every billiard's offset along its edge
//! has the same parity in units of `g / 2` at any time. Meetings therefore
//! happen after whole multiples of `g / 2`, and the search runs in integer
//! units of that tick. Exact rationals are used when the scaled values do not
//! fit in an `i64`.

use std::ops::{Add, Sub};

use super::{Engine, SystemState};
use crate::model::{BilliardState, Model, Orientation};
use crate::rational::Rational;

trait Coord: Copy + Ord + Add<Output = Self> + Sub<Output = Self> {
    const ZERO: Self;
    /// Exact half of a value known to be even in tick units.
    fn half(self) -> Self;
}

impl Coord for i64 {
    const ZERO: i64 = 0;
    fn half(self) -> i64 {
        assert!(
            self % 2 == 0,
            "odd separation {self}: tick parity argument violated"
        );
        self / 2
    }
}

impl Coord for Rational {
    const ZERO: Rational = Rational::ZERO;
    fn half(self) -> Rational {
        self / Rational::from_integer(2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum At<T> {
    Vertex(usize),
    Edge(usize, T),
}

#[derive(Clone, Copy, Debug)]
struct Segment<T> {
    edge: usize,
    t0: T,
    t1: T,
    /// Offset from `u` at `t0`.
    s0: T,
    dir: Orientation,
}

#[derive(Clone, Copy, Debug)]
struct Mover<T> {
    cycle: usize,
    orient: Orientation,
    step: usize,
    x: T,
}

fn mover<T>(b: &BilliardState, x: T) -> Mover<T> {
    Mover {
        cycle: b.cycle,
        orient: b.orient,
        step: b.step,
        x,
    }
}

struct Frame<'a, T> {
    model: &'a Model,
    /// Edge lengths in search units.
    lens: Vec<T>,
}

impl<T: Coord> Frame<'_, T> {
    fn next(&self, m: &Mover<T>) -> Mover<T> {
        let n = self.model.cycle(m.cycle).steps.len();
        let step = match m.orient {
            Orientation::Forward => (m.step + 1) % n,
            Orientation::Backward => (m.step + n - 1) % n,
        };
        Mover {
            step,
            x: self.lens[self.model.cycle(m.cycle).steps[step].edge],
            ..*m
        }
    }

    /// Edge, offset from `u` and direction of travel, as in `edge_coords`.
    fn coords(&self, m: &Mover<T>) -> (usize, T, Orientation) {
        let st = self.model.cycle(m.cycle).steps[m.step];
        let target = match m.orient {
            Orientation::Forward => st.to,
            Orientation::Backward => st.from,
        };
        if target == self.model.edge(st.edge).v {
            (st.edge, self.lens[st.edge] - m.x, Orientation::Forward)
        } else {
            (st.edge, m.x, Orientation::Backward)
        }
    }

    fn offset_at(&self, seg: &Segment<T>, t: T) -> T {
        let d = t - seg.t0;
        match seg.dir {
            Orientation::Forward => seg.s0 + d,
            Orientation::Backward => seg.s0 - d,
        }
    }

    fn point(&self, seg: &Segment<T>, t: T) -> At<T> {
        let s = self.offset_at(seg, t);
        let e = self.model.edge(seg.edge);
        if s == T::ZERO {
            At::Vertex(e.u)
        } else if s == self.lens[seg.edge] {
            At::Vertex(e.v)
        } else {
            At::Edge(seg.edge, s)
        }
    }

    fn segments(&self, b: &Mover<T>, from: T, until: T) -> Vec<Segment<T>> {
        let mut out = Vec::new();
        let mut cur = *b;
        let mut t = from;
        loop {
            let (edge, s0, dir) = self.coords(&cur);
            let t1 = t + cur.x;
            out.push(Segment {
                edge,
                t0: t,
                t1,
                s0,
                dir,
            });
            if t1 >= until {
                return out;
            }
            cur = self.next(&cur);
            t = t1;
        }
    }

    fn advance(&self, b: &Mover<T>, mut dt: T) -> Mover<T> {
        let mut cur = *b;
        while dt >= cur.x {
            dt = dt - cur.x;
            cur = self.next(&cur);
        }
        cur.x = cur.x - dt;
        cur
    }

    /// Earliest `t` in `(now, limit]` at which the two free trajectories meet.
    fn pair_meeting(&self, a: &[Segment<T>], b: &[Segment<T>], now: T, limit: T) -> Option<T> {
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (sa, sb) = (&a[i], &b[j]);
            let lo = sa.t0.max(sb.t0);
            let hi = sa.t1.min(sb.t1).min(limit);
            if lo <= hi {
                let mut best: Option<T> = None;
                let mut offer = |t: T| {
                    if t > now && best.is_none_or(|b| t < b) {
                        best = Some(t);
                    }
                };
                if sa.edge == sb.edge && sa.dir != sb.dir {
                    // Head-on: the gap closes at speed 2.
                    let (pa, pb) = (self.offset_at(sa, lo), self.offset_at(sb, lo));
                    let gap = match sa.dir {
                        Orientation::Forward => pb - pa,
                        Orientation::Backward => pa - pb,
                    };
                    if gap >= T::ZERO {
                        let t = lo + gap.half();
                        if t <= hi {
                            offer(t);
                        }
                    }
                }
                for t in [lo, hi] {
                    if self.point(sa, t) == self.point(sb, t) {
                        offer(t);
                    }
                }
                // Segments are time-ordered, so the first hit is the earliest.
                if best.is_some() {
                    return best;
                }
            }
            match sa.t1.cmp(&sb.t1) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        None
    }

    /// Search relative to the current instant, which is time zero here.
    fn first_meeting(
        &self,
        movers: Vec<Mover<T>>,
        first_window: T,
        widest: T,
        horizon: T,
    ) -> Option<T> {
        let n = movers.len();
        let mut window = first_window;
        let mut now = T::ZERO;
        let mut cur = movers;
        loop {
            let limit = if horizon - now > window {
                now + window
            } else {
                horizon
            };
            let segs: Vec<Vec<Segment<T>>> =
                cur.iter().map(|b| self.segments(b, now, limit)).collect();
            let mut best: Option<T> = None;
            for a in 0..n {
                for b in a + 1..n {
                    if let Some(t) = self.pair_meeting(&segs[a], &segs[b], T::ZERO, limit) {
                        if best.is_none_or(|x| t < x) {
                            best = Some(t);
                        }
                    }
                }
            }
            if best.is_some() || limit >= horizon {
                return best;
            }
            let dt = limit - now;
            cur = cur.iter().map(|b| self.advance(b, dt)).collect();
            now = limit;
            window = if widest - window > window {
                window + window
            } else {
                widest
            };
        }
    }
}

fn scaled(v: Rational, tick: Rational) -> Option<i64> {
    let q = v.checked_div(tick).ok()?;
    if !q.is_integer() {
        return None;
    }
    i64::try_from(q.numer())
        .ok()
        .filter(|n| n.unsigned_abs() < 1 << 60)
}

/// Integer-unit search; `None` when the scaled problem does not fit.
fn integer_search(
    model: &Model,
    state: &SystemState,
    first_window: Rational,
    widest: Rational,
    span: Rational,
) -> Option<Option<Rational>> {
    let lengths = model.edges().iter().map(|e| e.length);
    let g = Rational::gcd_set(lengths.chain(state.billiards.iter().map(|b| b.x))).ok()?;
    let tick = g.checked_div(Rational::from_integer(2)).ok()?;
    let lens = model
        .edges()
        .iter()
        .map(|e| scaled(e.length, tick))
        .collect::<Option<Vec<i64>>>()?;
    let movers = state
        .billiards
        .iter()
        .map(|b| Some(mover(b, scaled(b.x, tick)?)))
        .collect::<Option<Vec<_>>>()?;
    let horizon = i64::try_from(span.checked_div(tick).ok()?.floor())
        .unwrap_or(i64::MAX)
        .min(1 << 60);
    if horizon <= 0 {
        return Some(None);
    }
    let frame = Frame { model, lens };
    let found = frame.first_meeting(
        movers,
        scaled(first_window, tick)?,
        scaled(widest, tick)?,
        horizon,
    );
    Some(found.map(|n| tick * Rational::from_integer(n as i128)))
}

fn rational_search(
    model: &Model,
    state: &SystemState,
    first_window: Rational,
    widest: Rational,
    span: Rational,
) -> Option<Rational> {
    let frame = Frame {
        model,
        lens: model.edges().iter().map(|e| e.length).collect(),
    };
    let movers = state.billiards.iter().map(|b| mover(b, b.x)).collect();
    frame.first_meeting(movers, first_window, widest, span)
}

pub(super) fn first_meeting(
    engine: &Engine<'_>,
    state: &SystemState,
    horizon: Rational,
) -> Option<Rational> {
    let model = engine.model();
    if state.billiards.len() < 2 || horizon <= state.time {
        return None;
    }
    let widest = engine.default_horizon();
    // One edge's worth of look-ahead first; most events are close.
    let first_window = model
        .edges()
        .iter()
        .map(|e| e.length)
        .max()
        .unwrap_or(widest);
    let span = horizon - state.time;
    let dt = match integer_search(model, state, first_window, widest, span) {
        Some(found) => found,
        None => rational_search(model, state, first_window, widest, span),
    };
    dt.map(|dt| state.time + dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_instance, Limits};

    #[test]
    fn integer_and_rational_searches_agree() {
        let mut compared = 0;
        for seed in 0..300u64 {
            let m = Model::new(random_instance(seed, &Limits::default()).unwrap()).unwrap();
            let e = Engine::new(&m);
            // Off-grid start: the tick is derived from the state itself.
            let s = e.state_at(
                &SystemState::initial(&m),
                Rational::new(seed as i128 % 7 + 1, 5).unwrap(),
            );
            if !s.groups(&m).is_empty() {
                continue;
            }
            let widest = e.default_horizon();
            let first = m.edges().iter().map(|e| e.length).max().unwrap();
            let span = Rational::from_integer(30);
            let fast = integer_search(&m, &s, first, widest, span).expect("fits in i64");
            assert_eq!(
                fast,
                rational_search(&m, &s, first, widest, span),
                "seed {seed}"
            );
            compared += 1;
        }
        assert!(compared > 250);
    }
}
