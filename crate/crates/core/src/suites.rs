//! Property suites run by `verify` and by the acceptance tests.
//!
//! Each suite takes one instance (and a seed for its own random choices) and
//! reports pass or fail with a one-line detail. Engine assertions that fire
//! inside a suite are caught and reported as failures.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{default_bound, extract_permutation, find_period, verify_reversibility};
use crate::engine::{canonical_key, unlabeled_key, Engine, SystemState, Until};
use crate::model::{subdivide, Mode, Model};
use crate::oracle::oracle_run;
use crate::rational::Rational;
use crate::trace::{compare_traces, Comparison};

/// Multiples of the unit length covered by the trace-level suites.
pub const HORIZON_UNITS: i128 = 20;
/// Random instants checked by the equivalence suite.
pub const RANDOM_TIMES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Periodicity,
    Reversibility,
    Oracle,
    Equivalence,
    XInvariance,
    Divisibility,
    Subdivision,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Periodicity,
        Suite::Reversibility,
        Suite::Oracle,
        Suite::Equivalence,
        Suite::XInvariance,
        Suite::Divisibility,
        Suite::Subdivision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Periodicity => "periodicity",
            Suite::Reversibility => "reversibility",
            Suite::Oracle => "oracle",
            Suite::Equivalence => "equivalence",
            Suite::XInvariance => "x-invariance",
            Suite::Divisibility => "divisibility",
            Suite::Subdivision => "subdivision",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub passed: bool,
    pub detail: String,
}

/// Runs one suite on `model`. `seed` drives any random choices the suite makes.
pub fn run_suite(suite: Suite, model: &Model, seed: u64) -> SuiteOutcome {
    let run = || match suite {
        Suite::Periodicity => periodicity(model),
        Suite::Reversibility => reversibility(model, seed),
        Suite::Oracle => oracle(model),
        Suite::Equivalence => equivalence(model, seed),
        Suite::XInvariance => x_invariance(model),
        Suite::Divisibility => divisibility(model),
        Suite::Subdivision => subdivision(model),
    };
    let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        Err(format!("panicked: {msg}"))
    });
    match result {
        Ok(detail) => SuiteOutcome {
            suite,
            passed: true,
            detail,
        },
        Err(detail) => SuiteOutcome {
            suite,
            passed: false,
            detail,
        },
    }
}

type Check = Result<String, String>;

fn horizon(model: &Model) -> Rational {
    model.unit_length() * Rational::from_integer(HORIZON_UNITS)
}

/// The orbit returns exactly, within the state-count bound, and a fresh run
/// to the reported period lands on the initial state.
pub fn periodicity(model: &Model) -> Check {
    let rep = find_period(model, None).map_err(|e| e.to_string())?;
    let limit = default_bound(model).map_err(|e| e.to_string())?;
    if rep.period > limit {
        return Err(format!("period {} exceeds bound {limit}", rep.period));
    }
    let init = SystemState::initial(model);
    let back = Engine::new(model).state_at(&init, rep.period);
    if canonical_key(model, &back) != canonical_key(model, &init) {
        return Err(format!(
            "state at reported period {} differs from the initial state",
            rep.period
        ));
    }
    Ok(format!(
        "period {} ({} events)",
        rep.period, rep.events_per_period
    ))
}

/// A non-event time: event times are multiples of `grid / 2`, so a third of
/// the way between two of them is always free.
fn free_time(model: &Model, rng: &mut ChaCha8Rng) -> Rational {
    let tick = model.grid() / Rational::from_integer(2);
    let ticks = (horizon(model) / tick).floor().max(1);
    let k = rng.gen_range(0..ticks);
    tick * (Rational::from_integer(k) + Rational::new(1, 3).expect("nonzero"))
}

pub fn reversibility(model: &Model, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = free_time(model, &mut rng);
    let rep = verify_reversibility(&Engine::new(model), t).map_err(|e| e.to_string())?;
    if rep.passed {
        Ok(format!("t = {t}, {} events each way", rep.forward_events))
    } else {
        Err(format!(
            "t = {t}: billiards {} do not return",
            rep.mismatched.join(", ")
        ))
    }
}

pub fn oracle(model: &Model) -> Check {
    let h = horizon(model);
    let fast = Engine::new(model).run(&SystemState::initial(model), Until::Time(h));
    let slow = oracle_run(model, h).map_err(|e| format!("oracle: {e}"))?;
    let tick = model.grid() / Rational::from_integer(2);
    if let Some(e) = slow.events.iter().find(|e| !e.t.is_multiple_of(tick)) {
        return Err(format!(
            "oracle event at t = {} is off the {tick} grid",
            e.t
        ));
    }
    match compare_traces(&fast, &slow).map_err(|e| e.to_string())? {
        Comparison::Equal => Ok(format!("{} events agree up to t = {h}", fast.events.len())),
        Comparison::Diverged(d) => Err(format!("engine and oracle diverge: {d}")),
    }
}

/// Original and modified runs have equal unlabeled configurations at every
/// event (before and after resolution) and at random instants.
pub fn equivalence(model: &Model, seed: u64) -> Check {
    let orig = model.with_mode(Mode::Original);
    let modi = model.with_mode(Mode::Modified);
    let (eo, em) = (Engine::new(&orig), Engine::new(&modi));
    let h = horizon(model);
    let same =
        |a: &SystemState, b: &SystemState| unlabeled_key(&orig, a) == unlabeled_key(&modi, b);
    let (mut a, mut b) = (SystemState::initial(&orig), SystemState::initial(&modi));
    let mut events = 0;
    while a.time < h {
        match (eo.step_detailed(&a, h), em.step_detailed(&b, h)) {
            (Ok((pa, na, ea)), Ok((pb, nb, eb))) => {
                if ea.time != eb.time {
                    return Err(format!("event times differ: {} vs {}", ea.time, eb.time));
                }
                if !same(&pa, &pb) || !same(&na, &nb) {
                    return Err(format!("configurations differ at event t = {}", ea.time));
                }
                events += 1;
                (a, b) = (na, nb);
            }
            (Err(sa), Err(sb)) => (a, b) = (sa, sb),
            _ => return Err(format!("only one mode has an event after t = {}", a.time)),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TIMES {
        let t = h * Rational::new(rng.gen_range(1..1000), 1000).expect("nonzero");
        let sa = eo.state_at(&SystemState::initial(&orig), t);
        let sb = em.state_at(&SystemState::initial(&modi), t);
        if !same(&sa, &sb) {
            return Err(format!("configurations differ at t = {t}"));
        }
    }
    Ok(format!(
        "{events} events and {RANDOM_TIMES} random instants agree"
    ))
}

/// Runs on equal-length edges (subdividing first if needed): in the
/// modified system every billiard has its initial `x` at each multiple of
/// the edge length, and no pair collision changes `x`.
pub fn x_invariance(model: &Model) -> Check {
    let uniform = model.edges().windows(2).all(|w| w[0].length == w[1].length);
    let work = if uniform {
        model.with_mode(Mode::Modified)
    } else {
        let sub = subdivide(model);
        Model::new(sub.instance)
            .map_err(|e| format!("subdivided instance invalid: {e}"))?
            .with_mode(Mode::Modified)
    };
    let unit = work.edges()[0].length;
    let e = Engine::new(&work);
    let init = SystemState::initial(&work);
    let h = unit * Rational::from_integer(HORIZON_UNITS);
    let trace = e.run(&init, Until::Time(h));
    for ev in &trace.events {
        for g in ev.groups.iter().filter(|g| g.members.len() == 2) {
            for (before, after) in g.before.iter().zip(&g.after) {
                if before.x != after.x {
                    return Err(format!(
                        "{} changes x from {} to {} at t = {}",
                        before.id, before.x, after.x, ev.t
                    ));
                }
            }
        }
    }
    let mut cur = init.clone();
    for k in 1..=HORIZON_UNITS {
        cur = e.state_at(&cur, unit * Rational::from_integer(k));
        for (i, (now, start)) in cur.billiards.iter().zip(&init.billiards).enumerate() {
            if now.x != start.x {
                return Err(format!(
                    "{} has x = {} at t = {}, started at {}",
                    work.billiard_id(i),
                    now.x,
                    cur.time,
                    start.x
                ));
            }
        }
    }
    Ok(format!("x fixed at {HORIZON_UNITS} multiples of {unit}"))
}

/// The original period divides `T_mod` times the order of the recovered
/// permutation, and the original system is back home at that time.
pub fn divisibility(model: &Model) -> Check {
    let orig = model.with_mode(Mode::Original);
    let perm = extract_permutation(&orig).map_err(|e| e.to_string())?;
    let period = find_period(&orig, None).map_err(|e| e.to_string())?.period;
    let product = perm.t_mod * Rational::from_integer(perm.permutation.order as i128);
    if !(product / period).is_integer() {
        return Err(format!(
            "period {period} does not divide {} * {}",
            perm.t_mod, perm.permutation.order
        ));
    }
    let init = SystemState::initial(&orig);
    let there = Engine::new(&orig).state_at(&init, product);
    if there.billiards != init.billiards {
        return Err(format!("original system is not home at t = {product}"));
    }
    Ok(format!(
        "period {period} divides {} * {}",
        perm.t_mod, perm.permutation.order
    ))
}

/// Same period after subdivision, and the two runs agree event by event
/// under the state bijection.
pub fn subdivision(model: &Model) -> Check {
    let sub = subdivide(model);
    let fine = Model::new(sub.instance.clone())
        .map_err(|e| format!("subdivided instance invalid: {e}"))?;
    let p = find_period(model, None).map_err(|e| e.to_string())?.period;
    let q = find_period(&fine, None)
        .map_err(|e| format!("subdivided: {e}"))?
        .period;
    if p != q {
        return Err(format!("period {p} becomes {q} after subdivision"));
    }
    let (ec, ef) = (Engine::new(model), Engine::new(&fine));
    let h = horizon(model);
    let (mut a, mut b) = (SystemState::initial(model), SystemState::initial(&fine));
    let mut events = 0;
    let maps = |a: &SystemState, b: &SystemState| {
        a.billiards
            .iter()
            .zip(&b.billiards)
            .all(|(x, y)| sub.from_sub(model, y) == *x && sub.to_sub(model, x) == *y)
    };
    if !maps(&a, &b) {
        return Err("initial states do not correspond".into());
    }
    while a.time < h {
        match (ec.step_detailed(&a, h), ef.step_detailed(&b, h)) {
            (Ok((_, na, ea)), Ok((_, nb, eb))) => {
                if ea.time != eb.time || ea.groups.len() != eb.groups.len() {
                    return Err(format!("events differ at t = {}", ea.time));
                }
                // Group order follows point order, which differs between graphs.
                let mut mapped: Vec<_> = eb
                    .groups
                    .iter()
                    .map(|g| (sub.point_to_original(g.point), g.members.clone()))
                    .collect();
                mapped.sort();
                let coarse: Vec<_> = ea
                    .groups
                    .iter()
                    .map(|g| (g.point, g.members.clone()))
                    .collect();
                if mapped != coarse {
                    return Err(format!("collision groups differ at t = {}", ea.time));
                }
                if !maps(&na, &nb) {
                    return Err(format!("states differ after the event at t = {}", ea.time));
                }
                events += 1;
                (a, b) = (na, nb);
            }
            (Err(sa), Err(sb)) => {
                if !maps(&sa, &sb) {
                    return Err(format!("states differ at t = {}", sa.time));
                }
                (a, b) = (sa, sb);
            }
            _ => return Err(format!("only one graph has an event after t = {}", a.time)),
        }
    }
    Ok(format!("period {p}; {events} events agree up to t = {h}"))
}
