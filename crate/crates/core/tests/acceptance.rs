//! Acceptance sweep. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use billiards_core::analysis::find_period;
use billiards_core::model::{
    build_circle, build_interval, default_tetrahedron, random_instance, subdivide, Limits, Model,
    Orientation,
};
use billiards_core::oracle::{oracle_period, oracle_run};
use billiards_core::suites::{run_suite, Suite};
use billiards_core::{compare_traces, Comparison, Engine, Rational, SystemState, Until};
use rayon::prelude::*;

/// Period of `gen --kind tetrahedron`, first derived by the engine and the
/// tick oracle independently.
const TETRAHEDRON_PERIOD: &str = "7";

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn random_model(seed: u64) -> Model {
    Model::new(random_instance(seed, &Limits::default()).expect("generator")).expect("valid")
}

/// Runs `suite` on every seed; returns the failing seeds with details.
fn sweep(suite: Suite, seeds: &[u64]) -> Result<String, String> {
    let outcomes: Vec<_> = seeds
        .par_iter()
        .map(|&s| (s, run_suite(suite, &random_model(s), s)))
        .collect();
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|(_, o)| !o.passed)
        .map(|(s, o)| format!("seed {s}: {}", o.detail))
        .collect();
    if failed.is_empty() {
        Ok(format!("{} instances", seeds.len()))
    } else {
        Err(format!(
            "{} of {} failed; first: {}",
            failed.len(),
            seeds.len(),
            failed[0]
        ))
    }
}

fn seeds(n: u64) -> Vec<u64> {
    (1..=n).collect()
}

fn exact_periods() -> Result<String, String> {
    let f = Orientation::Forward;
    let b = Orientation::Backward;
    let cases = [
        (
            "interval",
            build_interval(&[(r("1/4"), f), (r("3/4"), b)]).unwrap(),
            "2",
        ),
        (
            "C4",
            build_circle(4, &[(r("0"), f), (r("2"), b)]).unwrap(),
            "4",
        ),
        ("C3 single", build_circle(3, &[(r("0"), f)]).unwrap(), "3"),
    ];
    let mut seen = Vec::new();
    for (name, inst, want) in cases {
        let got = find_period(&Model::new(inst).unwrap(), None)
            .map_err(|e| format!("{name}: {e}"))?
            .period;
        if got != r(want) {
            return Err(format!("{name}: period {got}, expected {want}"));
        }
        seen.push(format!("{name}={got}"));
    }
    Ok(seen.join(" "))
}

fn subdivision_sweep() -> Result<String, String> {
    // Instances where subdivision actually splits an edge.
    let picked: Vec<u64> = (1..)
        .filter(|&s| {
            let m = random_model(s);
            let sub = subdivide(&m);
            (0..m.edges().len()).any(|e| sub.count(e) > 1)
        })
        .take(50)
        .collect();
    sweep(Suite::Subdivision, &picked)
}

fn tetrahedron() -> Result<String, String> {
    let m = Model::new(default_tetrahedron()).unwrap();
    let rep = find_period(&m, None).map_err(|e| e.to_string())?;
    let by_oracle =
        oracle_period(&m, rep.period * Rational::from_integer(2)).map_err(|e| e.to_string())?;
    if by_oracle != Some(rep.period) {
        return Err(format!(
            "engine period {}, oracle {:?}",
            rep.period, by_oracle
        ));
    }
    let fast = Engine::new(&m).run(&SystemState::initial(&m), Until::Time(rep.period));
    let slow = oracle_run(&m, rep.period).map_err(|e| e.to_string())?;
    if compare_traces(&fast, &slow).map_err(|e| e.to_string())? != Comparison::Equal {
        return Err("engine and oracle traces differ over one period".into());
    }
    if rep.period != r(TETRAHEDRON_PERIOD) {
        return Err(format!(
            "period {} differs from recorded {TETRAHEDRON_PERIOD}",
            rep.period
        ));
    }
    Ok(format!(
        "period {} ({} events), oracle agrees",
        rep.period, rep.events_per_period
    ))
}

type Criterion = (&'static str, Box<dyn Fn() -> Result<String, String>>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "1 periodicity",
            Box::new(|| sweep(Suite::Periodicity, &seeds(200))),
        ),
        (
            "2 reversibility",
            Box::new(|| sweep(Suite::Reversibility, &seeds(100))),
        ),
        (
            "3 oracle equivalence",
            Box::new(|| sweep(Suite::Oracle, &seeds(100))),
        ),
        (
            "4 unlabeled equivalence",
            Box::new(|| sweep(Suite::Equivalence, &seeds(50))),
        ),
        (
            "5 x-preservation",
            Box::new(|| sweep(Suite::XInvariance, &seeds(50))),
        ),
        ("6 exact periods", Box::new(exact_periods)),
        ("7 subdivision invariance", Box::new(subdivision_sweep)),
        (
            "8 permutation divisibility",
            Box::new(|| sweep(Suite::Divisibility, &seeds(50))),
        ),
        ("9 tetrahedron", Box::new(tetrahedron)),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let result = check();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name:<28} {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name:<28} {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {} of 9 criteria passed in {:.1}s",
        9 - failures,
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
