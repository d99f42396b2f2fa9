//! Command-line grammar and value parsers.

use std::ops::RangeInclusive;
use std::path::PathBuf;

use billiards_core::model::{Limits, Mode, Orientation, TetraPlacement};
use billiards_core::suites::Suite;
use billiards_core::Rational;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "graph-billiards",
    version,
    about = "Exact billiards on directed cycles of a metric graph"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check an instance file; exit 1 with the first problem if it is invalid.
    Validate { instance: PathBuf },
    /// Run the event engine and write the trace as JSON lines.
    Simulate {
        instance: PathBuf,
        /// Stop at this time (default: 20 unit lengths).
        #[arg(long, value_parser = rational, conflicts_with = "max_events")]
        t_max: Option<Rational>,
        /// Stop after this many collision events.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_events: Option<u64>,
        /// Trace file; stdout when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Find the least exact period of an instance.
    FindPeriod {
        instance: PathBuf,
        /// Give up after this much simulated time (default: unit length times the state-count bound).
        #[arg(long, value_parser = positive_rational)]
        bound: Option<Rational>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Also report how the original system permutes labels over one modified period.
        #[arg(long)]
        permutation: bool,
    },
    /// Run property suites on one instance or on a range of random instances.
    Verify {
        #[arg(required_unless_present = "seeds", conflicts_with = "seeds")]
        instance: Option<PathBuf>,
        /// Inclusive seed range such as 1..100.
        #[arg(long, value_parser = seed_range)]
        seeds: Option<RangeInclusive<u64>>,
        /// Comma-separated suite names, or "all".
        #[arg(long, default_value = "all", value_parser = suite_list)]
        suite: SuiteList,
        #[command(flatten)]
        limits: LimitsArg,
        /// Seed for the suites' own random choices when checking a file.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split every edge into pieces of one common length.
    Subdivide {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Billiards for interval and circle as "x:orient,...", e.g. "1/4:+,3/4:-".
        /// Positions are measured from the first vertex along the cycle.
        #[arg(long, value_parser = balls)]
        balls: Option<Balls>,
        /// Number of unit edges of the circle.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: Option<u64>,
        /// Four tetrahedron billiards as "edge_index:x:orient,...".
        #[arg(long, value_parser = placements)]
        placements: Option<Placements>,
        /// Seed for random instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        limits: LimitsArg,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep random instances and write one instance and one report per seed.
    Batch {
        #[arg(long, value_parser = seed_range)]
        seeds: RangeInclusive<u64>,
        #[command(flatten)]
        limits: LimitsArg,
        /// Suites to run on each instance in addition to the period search.
        #[arg(long, value_parser = suite_list)]
        suite: Option<SuiteList>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Interval,
    Circle,
    Tetrahedron,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Original,
    Modified,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Original => Mode::Original,
            ModeArg::Modified => Mode::Modified,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct LimitsArg {
    /// Random instance limits as "key=value,...". Keys: vertices, edges,
    /// cycles, cycle-len, billiards, denominator, length.
    #[arg(long, value_parser = limits, default_value = "")]
    pub limits: LimitsValue,
}

#[derive(Debug, Clone, Copy)]
pub struct LimitsValue(pub Limits);

#[derive(Debug, Clone)]
pub struct SuiteList(pub Vec<Suite>);

#[derive(Debug, Clone)]
pub struct Balls(pub Vec<(Rational, Orientation)>);

#[derive(Debug, Clone)]
pub struct Placements(pub [TetraPlacement; 4]);

fn rational(s: &str) -> Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| e.to_string())
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let r = rational(s)?;
    if r > Rational::ZERO {
        Ok(r)
    } else {
        Err(format!("{r} is not positive"))
    }
}

fn orientation(s: &str) -> Result<Orientation, String> {
    match s.trim() {
        "+" | "+1" | "1" => Ok(Orientation::Forward),
        "-" | "-1" => Ok(Orientation::Backward),
        other => Err(format!("orientation {other:?}: expected + or -")),
    }
}

fn seed_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("{s:?}: expected a..b"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty seed range {a}..{b}"));
    }
    Ok(a..=b)
}

fn suite_list(s: &str) -> Result<SuiteList, String> {
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim) {
        if name == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(name.parse::<Suite>()?);
        }
    }
    out.sort_by_key(|s| Suite::ALL.iter().position(|x| x == s));
    out.dedup();
    Ok(SuiteList(out))
}

fn balls(s: &str) -> Result<Balls, String> {
    s.split(',')
        .map(|item| {
            let (x, o) = item
                .split_once(':')
                .ok_or_else(|| format!("{item:?}: expected x:orient"))?;
            Ok((rational(x)?, orientation(o)?))
        })
        .collect::<Result<Vec<_>, String>>()
        .map(Balls)
}

fn placements(s: &str) -> Result<Placements, String> {
    let list = s
        .split(',')
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            let [i, x, o] = parts[..] else {
                return Err(format!("{item:?}: expected edge_index:x:orient"));
            };
            Ok(TetraPlacement {
                edge_index: i.trim().parse().map_err(|e| format!("{i:?}: {e}"))?,
                x: rational(x)?,
                orient: orientation(o)?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let n = list.len();
    list.try_into()
        .map(Placements)
        .map_err(|_| format!("expected 4 placements, got {n}"))
}

fn limits(s: &str) -> Result<LimitsValue, String> {
    let mut l = Limits::default();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("{item:?}: expected key=value"))?;
        let n: u32 = v.trim().parse().map_err(|e| format!("{item:?}: {e}"))?;
        match k.trim() {
            "vertices" => l.max_vertices = n as usize,
            "edges" => l.max_edges = n as usize,
            "cycles" => l.max_cycles = n as usize,
            "cycle-len" => l.max_cycle_len = n as usize,
            "billiards" => l.max_billiards = n as usize,
            "denominator" => l.max_denominator = n,
            "length" => l.max_length = n,
            other => return Err(format!("unknown limit {other:?}")),
        }
    }
    Ok(LimitsValue(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges_are_inclusive() {
        assert_eq!(seed_range("1..100").unwrap(), 1..=100);
        assert_eq!(seed_range("3..=3").unwrap(), 3..=3);
        assert!(seed_range("5..2").is_err());
        assert!(seed_range("7").is_err());
    }

    #[test]
    fn suite_lists_expand_and_order() {
        let all = suite_list("all").unwrap().0;
        assert_eq!(all, Suite::ALL.to_vec());
        let two = suite_list("oracle,reversibility,oracle").unwrap().0;
        assert_eq!(two, vec![Suite::Reversibility, Suite::Oracle]);
        assert!(suite_list("nope").is_err());
    }

    #[test]
    fn ball_lists() {
        let b = balls("1/4:+, 3/4:-").unwrap().0;
        assert_eq!(
            b,
            vec![
                (Rational::new(1, 4).unwrap(), Orientation::Forward),
                (Rational::new(3, 4).unwrap(), Orientation::Backward)
            ]
        );
        assert!(balls("1/4").is_err());
        assert!(balls("1/4:x").is_err());
    }

    #[test]
    fn placement_lists_need_four() {
        assert!(placements("1:1/2:+,2:1/3:-,3:1/4:+,1:1:+").is_ok());
        assert!(placements("1:1/2:+").is_err());
    }

    #[test]
    fn limit_overrides() {
        let l = limits("vertices=4, length=3").unwrap().0;
        assert_eq!(
            (l.max_vertices, l.max_length, l.max_edges),
            (4, 3, Limits::default().max_edges)
        );
        assert!(limits("colour=1").is_err());
        assert_eq!(limits("").unwrap().0, Limits::default());
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
