use std::fs;

use evgrad::checker::TypingMode;
use evgrad::dynamizer::SampleOptions;
use evgrad::harness::{run_benchmark_suite, write_csv, BenchOptions, HarnessError, RunRecord, CSV_HEADER};
use evgrad::runtime::{Counters, Mode, Outcome};
use tempfile::TempDir;

fn record(benchmark: &str, ratio: f64, outcome: Outcome) -> RunRecord {
    RunRecord {
        benchmark: benchmark.into(),
        config: "c".into(),
        ratio,
        mode: Mode::G,
        dfo: false,
        typing: TypingMode::Gradual,
        disabled: String::new(),
        time_s: 0.0123456789,
        reps: 3,
        counters: Counters { trans_ops: 7, ..Counters::default() },
        outcome,
    }
}

fn csv(records: &[RunRecord]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    write_csv(records, &mut out).unwrap();
    String::from_utf8(out).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn empty_report_is_just_the_header() {
    let rows = csv(&[]);
    assert_eq!(rows, vec![CSV_HEADER.iter().map(|s| s.to_string()).collect::<Vec<_>>()]);
}

#[test]
fn rows_are_sorted_and_formatted() {
    let rows = csv(&[
        record("tak", 2.0 / 3.0, Outcome::Value("1".into())),
        record("array", 1.0, Outcome::CastError),
        record("tak", 0.1, Outcome::GermError),
        record("array", 0.0, Outcome::OtherError),
    ]);
    let keys: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0].as_str(), r[2].as_str())).collect();
    assert_eq!(keys, [("array", "0.0000"), ("array", "1.0000"), ("tak", "0.1000"), ("tak", "0.6667")]);
    let time: Vec<&str> = rows[1..].iter().map(|r| r[6].as_str()).collect();
    assert_eq!(time, ["0.012346", "", "", "0.012346"]);
    let outcome: Vec<&str> = rows[1..].iter().map(|r| r[13].as_str()).collect();
    assert_eq!(outcome, ["other-error", "cast-error", "germ-error", "value"]);
    assert_eq!(rows[1][3..6], ["g", "false", "gradual"]);
    assert_eq!(rows[1][8], "7");
}

fn suite_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("inc.gtp"), "let f : int -> int = fun (x:int) -> x + 1 in print_int (f (read_int ()))").unwrap();
    fs::write(dir.path().join("pair.gtp"), "let p : (int * bool) = (read_int (), true) in #0 p").unwrap();
    fs::write(
        dir.path().join("suite.toml"),
        "[[benchmark]]\nname = \"inc\"\nfile = \"inc.gtp\"\ninput = \"41\"\n\n\
         [[benchmark]]\nname = \"pair\"\nfile = \"pair.gtp\"\ninput = \"100\"\nquick_input = \"1\"\n",
    )
    .unwrap();
    dir
}

fn opts() -> BenchOptions {
    BenchOptions {
        reps: 2,
        endpoint_reps: 3,
        sampling: SampleOptions { samples_per_node: 2, bins: 2, seed: 9 },
        ..BenchOptions::default()
    }
}

#[test]
fn suite_runs_every_configuration_in_every_mode() {
    let dir = suite_dir();
    let records = run_benchmark_suite(dir.path(), &opts()).unwrap();
    // inc has 4 type nodes and pair 3: (2n + 2) configurations each
    assert_eq!(records.len(), (10 + 8) * 3);
    for r in &records {
        let expected = if r.config == "typed" || r.config == "untyped" { 3 } else { 2 };
        assert_eq!(r.reps, expected, "{r:?}");
        let value = if r.benchmark == "inc" { "()" } else { "100" };
        assert_eq!(r.outcome, Outcome::Value(value.into()), "{r:?}");
    }
    let quick = run_benchmark_suite(dir.path(), &BenchOptions { quick: true, only: vec!["pair".into()], ..opts() }).unwrap();
    assert_eq!(quick.len(), 8 * 3);
    assert!(quick.iter().all(|r| r.outcome == Outcome::Value("1".into())));
}

#[test]
fn unknown_benchmark_is_an_error() {
    let dir = suite_dir();
    let err = run_benchmark_suite(dir.path(), &BenchOptions { only: vec!["nope".into()], ..opts() }).unwrap_err();
    assert!(matches!(err, HarnessError::UnknownBenchmark(n) if n == "nope"));
}
