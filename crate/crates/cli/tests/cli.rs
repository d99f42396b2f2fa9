use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graph-billiards"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generated_interval_has_period_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("interval.json");
    let g = bin(&[
        "gen",
        "--kind",
        "interval",
        "--balls",
        "1/4:+,3/4:-",
        "--out",
        path(&file),
    ]);
    assert!(g.status.success());
    let o = bin(&["find-period", path(&file)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).lines().any(|l| l == "period: 2"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn loop_edge_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("loop.json");
    fs::write(
        &file,
        r#"{"vertices":["a","b"],
            "edges":[{"id":"ab","u":"a","v":"b","length":"1"},{"id":"spin","u":"a","v":"a","length":"1"}],
            "cycles":[{"id":"c","verts":["a","b"],"edges":["ab","ab"]}],
            "billiards":[{"id":"b1","cycle":"c","orient":1,"edge_index":1,"x":"1/2"}],
            "mode":"original"}"#,
    )
    .unwrap();
    let o = bin(&["validate", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("spin"));
}

#[test]
fn unreadable_and_malformed_files_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        bin(&["validate", path(&dir.path().join("missing.json"))])
            .status
            .code(),
        Some(1)
    );
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(bin(&["find-period", path(&junk)]).status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_two() {
    for args in [
        &["gen", "--kind", "interval"][..],
        &["gen", "--kind", "square"],
        &["verify", "--seeds", "9..1"],
        &["find-period"],
        &["find-period", "x.json", "--bound", "-1"],
        &["simulate", "x.json", "--t-max", "1", "--max-events", "3"],
    ] {
        assert_eq!(bin(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_for_every_subcommand() {
    for sub in [
        "validate",
        "simulate",
        "find-period",
        "verify",
        "subdivide",
        "gen",
        "batch",
    ] {
        let o = bin(&[sub, "--help"]);
        assert!(o.status.success(), "{sub}");
        assert!(stdout(&o).contains("Usage"));
    }
}

#[test]
fn generated_files_round_trip_and_are_deterministic() {
    let cases: [&[&str]; 4] = [
        &["gen", "--kind", "random", "--seed", "17"],
        &["gen", "--kind", "tetrahedron"],
        &[
            "gen",
            "--kind",
            "circle",
            "--m",
            "5",
            "--balls",
            "0:+,5/2:-",
        ],
        &[
            "gen",
            "--kind",
            "tetrahedron",
            "--placements",
            "1:1/2:+,2:1/3:-,3:1/4:+,1:1:-",
            "--mode",
            "modified",
        ],
    ];
    let dir = tempfile::tempdir().unwrap();
    for args in cases {
        let a = bin(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, bin(args).stdout);
        let file = dir.path().join("g.json");
        fs::write(&file, &a.stdout).unwrap();
        assert!(bin(&["validate", path(&file)]).status.success());
        // Subdividing a generated instance gives another valid instance.
        let sub = dir.path().join("s.json");
        assert!(bin(&["subdivide", path(&file), "--out", path(&sub)])
            .status
            .success());
        assert!(bin(&["validate", path(&sub)]).status.success());
    }
}

#[test]
fn simulate_writes_a_replayable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("t.json");
    fs::write(&inst, bin(&["gen", "--kind", "tetrahedron"]).stdout).unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let o = bin(&["simulate", path(&inst), "--t-max", "7", "--trace", path(&a)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("events: 7"), "{}", stdout(&o));
    bin(&["simulate", path(&inst), "--t-max", "7", "--trace", path(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let capped = stdout(&bin(&["simulate", path(&inst), "--max-events", "3"]));
    assert_eq!(capped.lines().count(), 5);
}

#[test]
fn tetrahedron_period_and_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("t.json");
    fs::write(&inst, bin(&["gen", "--kind", "tetrahedron"]).stdout).unwrap();
    let out = stdout(&bin(&["find-period", path(&inst), "--permutation"]));
    assert!(out.contains("period: 7\n"), "{out}");
    assert!(out.contains("t_mod: 28\n"), "{out}");
    assert!(out.contains("permutation_order: 1\n"), "{out}");
}

#[test]
fn undersized_bound_fails() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.json");
    fs::write(
        &inst,
        bin(&["gen", "--kind", "interval", "--balls", "1/4:+,3/4:-"]).stdout,
    )
    .unwrap();
    let o = bin(&["find-period", path(&inst), "--bound", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_sweep_passes_in_seed_order() {
    let o = bin(&["verify", "--seeds", "1..4", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    let seeds: Vec<u64> = out
        .lines()
        .filter_map(|l| l.strip_prefix("seed ")?.split(':').next()?.parse().ok())
        .collect();
    assert!(seeds.windows(2).all(|w| w[0] <= w[1]));
    assert!(out.ends_with("summary: 28/28 passed\n"));
    assert_eq!(
        o.stdout,
        bin(&["verify", "--seeds", "1..4", "--suite", "all"]).stdout
    );
}

#[test]
fn verify_single_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("c.json");
    fs::write(
        &inst,
        bin(&[
            "gen",
            "--kind",
            "circle",
            "--m",
            "3",
            "--balls",
            "0:+,1:-,2:-",
        ])
        .stdout,
    )
    .unwrap();
    let o = bin(&[
        "verify",
        path(&inst),
        "--suite",
        "reversibility,divisibility",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("summary: 2/2 passed\n"));
}

#[test]
fn batch_writes_one_report_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = bin(&[
        "batch",
        "--seeds",
        "5..7",
        "--limits",
        "billiards=3",
        "--suite",
        "oracle",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    for s in 5..=7 {
        let report = fs::read_to_string(out.join(format!("seed-{s}.txt"))).unwrap();
        assert!(report.starts_with(&format!("seed: {s}\n")));
        assert!(report.contains("[original]\nperiod: "));
        assert!(report.contains("oracle PASS"));
        assert!(out.join(format!("seed-{s}.json")).exists());
    }
}
