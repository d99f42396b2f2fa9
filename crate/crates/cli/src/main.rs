mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use billiards_core::model::{
    build_circle, build_interval, build_tetrahedron, default_tetrahedron, random_instance,
    subdivide, Instance, Limits, Mode,
};
use billiards_core::suites::{run_suite, Suite, SuiteOutcome, HORIZON_UNITS};
use billiards_core::{
    extract_permutation, find_period, Engine, Model, Rational, SystemState, Until,
};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use rayon::prelude::*;

use args::{Cli, Command, Kind};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Exits with status 2 and the usage line, like a clap parse error.
fn usage_error(kind: ErrorKind, msg: &str) -> ! {
    Cli::command().error(kind, msg).exit()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(path: &Path) -> Result<Model> {
    Model::new(read_instance(path)?).with_context(|| format!("invalid instance {}", path.display()))
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Validate { instance } => {
            let m = load(&instance)?;
            println!(
                "valid: {} vertices, {} edges, {} cycles, {} billiards, mode {}",
                m.instance().graph.vertices.len(),
                m.edges().len(),
                m.cycles().len(),
                m.billiard_count(),
                m.mode()
            );
            println!("instance_hash: {}", m.instance_hash());
            Ok(true)
        }
        Command::Simulate {
            instance,
            t_max,
            max_events,
            trace,
            mode,
        } => {
            let mut m = load(&instance)?;
            if let Some(mode) = mode {
                m = m.with_mode(mode.into());
            }
            let until = match (t_max, max_events) {
                (_, Some(n)) => Until::Events(n as usize),
                (Some(t), None) => Until::Time(t),
                (None, None) => {
                    Until::Time(m.unit_length() * Rational::from_integer(HORIZON_UNITS))
                }
            };
            let tr = Engine::new(&m).run(&SystemState::initial(&m), until);
            emit(trace.as_deref(), &tr.to_jsonl())?;
            if trace.is_some() {
                println!("events: {}", tr.events.len());
                println!("final_time: {}", tr.final_state.time);
                println!("truncated: {}", tr.truncated);
            }
            Ok(true)
        }
        Command::FindPeriod {
            instance,
            bound,
            mode,
            permutation,
        } => {
            let mut m = load(&instance)?;
            if let Some(mode) = mode {
                m = m.with_mode(mode.into());
            }
            let rep = find_period(&m, bound)?;
            println!("instance_hash: {}", m.instance_hash());
            println!("mode: {}", m.mode());
            println!("{rep}");
            if permutation {
                print!("{}", permutation_text(&m)?);
            }
            Ok(true)
        }
        Command::Verify {
            instance,
            seeds,
            suite,
            limits,
            seed,
        } => {
            let suites = suite.0;
            let runs: Vec<(String, Result<Vec<SuiteOutcome>>)> = match (instance, seeds) {
                (Some(path), _) => vec![(
                    String::new(),
                    load(&path).map(|m| run_suites(&suites, &m, seed)),
                )],
                (None, Some(seeds)) => seeds
                    .into_par_iter()
                    .map(|s| {
                        (
                            format!("seed {s}: "),
                            random_model(s, &limits.limits.0).map(|m| run_suites(&suites, &m, s)),
                        )
                    })
                    .collect(),
                (None, None) => usage_error(
                    ErrorKind::MissingRequiredArgument,
                    "verify needs an instance or --seeds",
                ),
            };
            let (mut passed, mut total) = (0, 0);
            for (prefix, r) in runs {
                match r {
                    Ok(outcomes) => {
                        for o in outcomes {
                            total += 1;
                            passed += usize::from(o.passed);
                            let verdict = if o.passed { "PASS" } else { "FAIL" };
                            println!("{prefix}{} {verdict}: {}", o.suite, o.detail);
                        }
                    }
                    Err(e) => {
                        total += 1;
                        println!("{prefix}FAIL: {e:#}");
                    }
                }
            }
            println!("summary: {passed}/{total} passed");
            Ok(passed == total)
        }
        Command::Subdivide { instance, out } => {
            let m = load(&instance)?;
            let sub = subdivide(&m);
            emit(out.as_deref(), &(sub.instance.to_json() + "\n"))?;
            if out.is_some() {
                println!("piece: {}", sub.piece);
                println!(
                    "edges: {} -> {}",
                    m.edges().len(),
                    sub.instance.graph.edges.len()
                );
            }
            Ok(true)
        }
        Command::Gen {
            kind,
            balls,
            m,
            placements,
            seed,
            limits,
            mode,
            out,
        } => {
            let mut inst = match kind {
                Kind::Interval => {
                    let Some(b) = balls else {
                        usage_error(
                            ErrorKind::MissingRequiredArgument,
                            "--kind interval needs --balls",
                        )
                    };
                    build_interval(&b.0)?
                }
                Kind::Circle => {
                    let (Some(b), Some(m)) = (balls, m) else {
                        usage_error(
                            ErrorKind::MissingRequiredArgument,
                            "--kind circle needs --m and --balls",
                        )
                    };
                    build_circle(m as usize, &b.0)?
                }
                Kind::Tetrahedron => match placements {
                    Some(p) => build_tetrahedron(&p.0)?,
                    None => default_tetrahedron(),
                },
                Kind::Random => random_instance(seed, &limits.limits.0)?,
            };
            if let Some(mode) = mode {
                inst = inst.with_mode(mode.into());
            }
            emit(out.as_deref(), &(inst.to_json() + "\n"))?;
            Ok(true)
        }
        Command::Batch {
            seeds,
            limits,
            suite,
            out,
        } => {
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let suites = suite.map(|s| s.0).unwrap_or_default();
            let lim = limits.limits.0;
            let results: Vec<(u64, Result<BatchReport>)> = seeds
                .into_par_iter()
                .map(|s| (s, batch_one(s, &lim, &suites)))
                .collect();
            let mut ok = true;
            for (s, r) in results {
                match r {
                    Ok((inst, report, good)) => {
                        fs::write(out.join(format!("seed-{s}.json")), inst.to_json() + "\n")?;
                        fs::write(out.join(format!("seed-{s}.txt")), &report)?;
                        println!("seed {s}: {}", if good { "ok" } else { "FAIL" });
                        ok &= good;
                    }
                    Err(e) => {
                        println!("seed {s}: FAIL: {e:#}");
                        ok = false;
                    }
                }
            }
            Ok(ok)
        }
    }
}

fn random_model(seed: u64, limits: &Limits) -> Result<Model> {
    Ok(Model::new(random_instance(seed, limits)?)?)
}

fn run_suites(suites: &[Suite], model: &Model, seed: u64) -> Vec<SuiteOutcome> {
    suites.iter().map(|&s| run_suite(s, model, seed)).collect()
}

fn permutation_text(model: &Model) -> Result<String> {
    let p = extract_permutation(model)?;
    let mut s = String::new();
    writeln!(s, "t_mod: {}", p.t_mod)?;
    writeln!(s, "permutation_order: {}", p.permutation.order)?;
    let pairs: Vec<String> = p
        .permutation
        .id_pairs(model)
        .iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    writeln!(s, "permutation: {}", pairs.join(" "))?;
    Ok(s)
}

/// Instance, report text, and whether every check passed.
type BatchReport = (Instance, String, bool);

fn batch_one(seed: u64, limits: &Limits, suites: &[Suite]) -> Result<BatchReport> {
    let m = random_model(seed, limits)?;
    let mut s = String::new();
    writeln!(s, "seed: {seed}")?;
    writeln!(s, "instance_hash: {}", m.instance_hash())?;
    let mut good = true;
    for mode in [Mode::Original, Mode::Modified] {
        writeln!(s, "[{mode}]")?;
        match find_period(&m.with_mode(mode), None) {
            Ok(rep) => writeln!(s, "{rep}")?,
            Err(e) => {
                writeln!(s, "error: {e}")?;
                good = false;
            }
        }
    }
    if good {
        writeln!(s, "[permutation]")?;
        s.push_str(&permutation_text(&m)?);
    }
    if !suites.is_empty() {
        writeln!(s, "[suites]")?;
        for o in run_suites(suites, &m, seed) {
            good &= o.passed;
            writeln!(
                s,
                "{} {}: {}",
                o.suite,
                if o.passed { "PASS" } else { "FAIL" },
                o.detail
            )?;
        }
    }
    Ok((m.instance().clone(), s, good))
}
