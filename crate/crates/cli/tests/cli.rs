use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn evgrad(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evgrad"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::null())
        .output()
        .expect("binary runs")
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_prints_output_and_value() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "print_int 3;\n1 + 1");
    let o = evgrad(&["run", "p.gtp"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "3\n2\n");
}

#[test]
fn run_reads_input_file() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "read_int () * 2");
    file(&dir, "in.txt", "21\n");
    let o = evgrad(&["run", "p.gtp", "--input", "in.txt"], dir.path());
    assert_eq!(stdout(&o), "42\n");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    file(&dir, "syntax.gtp", "let x = in");
    file(&dir, "static.gtp", "1 + true");
    file(&dir, "blame.gtp", "(fun (x:?) -> x + 1) false");
    file(&dir, "runtime.gtp", "1 / 0");
    let cases = [
        (vec!["run", "syntax.gtp"], 2),
        (vec!["run", "static.gtp"], 2),
        (vec!["run", "blame.gtp"], 3),
        (vec!["run", "runtime.gtp"], 4),
        (vec!["run", "missing.gtp"], 66),
        (vec!["run", "blame.gtp", "--mode", "fast"], 64),
        (vec!["run", "blame.gtp", "--no-opt", "inline"], 64),
        (vec!["frobnicate"], 64),
        (vec!["--help"], 0),
    ];
    for (args, expected) in cases {
        let o = evgrad(&args, dir.path());
        assert_eq!(code(&o), expected, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn errors_carry_locations() {
    let dir = TempDir::new().unwrap();
    file(&dir, "blame.gtp", "let y = 1 in\n(fun (x:?) -> x + 1) false");
    let o = evgrad(&["run", "blame.gtp"], dir.path());
    assert!(stderr(&o).starts_with("blame.gtp:2:"), "{}", stderr(&o));
}

#[test]
fn static_typing_rejects_unknown() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "(fun (x:?) -> x) 1");
    assert_eq!(code(&evgrad(&["run", "p.gtp"], dir.path())), 0);
    assert_eq!(code(&evgrad(&["run", "p.gtp", "--typing", "static"], dir.path())), 2);
    assert_eq!(code(&evgrad(&["check", "p.gtp", "--typing", "static"], dir.path())), 2);
}

#[test]
fn check_prints_type() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "fun (x:int) -> x < 2");
    let o = evgrad(&["check", "p.gtp"], dir.path());
    assert_eq!(stdout(&o).trim(), "int->bool");
}

#[test]
fn counters_go_to_stderr_as_json() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "let f : ? = fun (x:int) -> x in f 1");
    let o = evgrad(&["run", "p.gtp", "--counters"], dir.path());
    assert_eq!(stdout(&o), "1\n");
    let json = stderr(&o);
    for key in ["trans_ops", "proxy_allocs", "heap_allocs", "float_boxes", "germ_checks"] {
        assert!(json.contains(&format!("\"{key}\"")), "{json}");
    }
}

#[test]
fn emit_stages() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "let x : ? = 1 in x + 2");
    for stage in ["ast", "elab", "anf", "core"] {
        let o = evgrad(&["emit", "p.gtp", "--emit", stage], dir.path());
        assert_eq!(code(&o), 0, "{stage}: {}", stderr(&o));
        assert!(!stdout(&o).trim().is_empty(), "{stage}");
    }
}

#[test]
fn dynamize_writes_configurations() {
    let dir = TempDir::new().unwrap();
    file(&dir, "id.gtp", "let f : int -> int = fun (x:int) -> x in f 1");
    let o = evgrad(&["dynamize", "id.gtp", "--seed", "3", "--bins", "4", "--out-dir", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = fs::read_to_string(dir.path().join("out/manifest.csv")).unwrap();
    // n = 4 type nodes, so 10 * 4 samples plus both endpoints
    assert_eq!(manifest.lines().count(), 1 + 42);
    assert!(manifest.starts_with("config,kind,ratio,bin,seed,file"));
    for line in manifest.lines().skip(1) {
        let name = line.rsplit(',').next().unwrap();
        let o = evgrad(&["check", &format!("out/{name}")], dir.path());
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
    }
}

#[test]
fn dynamize_rejects_imprecise_programs() {
    let dir = TempDir::new().unwrap();
    file(&dir, "p.gtp", "let f : ? -> int = fun (x:int) -> x in f 1");
    assert_eq!(code(&evgrad(&["dynamize", "p.gtp", "--out-dir", "out"], dir.path())), 2);
}

#[test]
fn bench_emits_csv() {
    let dir = TempDir::new().unwrap();
    file(&dir, "id.gtp", "let f : int -> int = fun (x:int) -> x in print_int (f (read_int ()))");
    file(&dir, "suite.toml", "[[benchmark]]\nname = \"id\"\nfile = \"id.gtp\"\ninput = \"5\"\n");
    let o = evgrad(&["bench", ".", "--reps", "1", "--endpoint-reps", "1", "--bins", "4", "--mode", "g,mv", "--out", "r.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "benchmark,config,ratio,mode,dfo,typing,time_s,reps,trans_ops,proxy_allocs,heap_allocs,float_boxes,germ_checks,outcome"
    );
    assert_eq!(lines.count(), 42 * 2);
    assert_eq!(code(&evgrad(&["bench", ".", "--only", "nope"], dir.path())), 66);
    // ten bins cannot all be hit with four type nodes
    assert_eq!(code(&evgrad(&["bench", ".", "--out", "r.csv"], dir.path())), 2);
}
