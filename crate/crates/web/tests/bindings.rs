use evgrad_web::{dynamize, emit, run};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

const INTRO: &str = "let add1 = fun (x:int) -> x + 1 in\nlet f : ?->int = fun g -> g(1) in\n";

#[test]
fn run_reports_value_output_and_counters() {
    for mode in ["g", "mc", "mv"] {
        let r = parse(run(&format!("print_int 7;\n{INTRO}f(add1)"), mode, false, "gradual", ""));
        assert_eq!(r["outcome"], "value");
        assert_eq!(r["value"], "2");
        assert_eq!(r["output"], "7\n");
        assert!(r["counters"]["trans_ops"].is_u64());
    }
}

#[test]
fn run_reports_failures_with_locations() {
    let r = parse(run(&format!("{INTRO}not(f(add1))"), "g", false, "gradual", ""));
    assert_eq!(r["outcome"], "static-error");
    assert!(r["error"].as_str().unwrap().starts_with("3:"), "{r}");
    let r = parse(run("let x = ref (4 :: ?) in\nlet y: ref[bool] = x in\ny := true;\n!y", "mv", false, "gradual", ""));
    assert_eq!(r["outcome"], "cast-error");
    assert!(r["error"].as_str().unwrap().starts_with("2:"), "{r}");
    let r = parse(run("1", "fast", false, "gradual", ""));
    assert_eq!(r["outcome"], "usage-error");
}

#[test]
fn run_reads_input() {
    let r = parse(run("read_int () + 1", "g", false, "gradual", "41"));
    assert_eq!(r["value"], "42");
}

#[test]
fn emit_every_stage() {
    for stage in ["ast", "elab", "anf", "core"] {
        let r = parse(emit("let x : ? = 1 in x + 2", stage, false, "gradual"));
        assert!(r["text"].as_str().is_some_and(|t| !t.is_empty()), "{stage}: {r}");
    }
    let r = parse(emit("1", "llvm", false, "gradual"));
    assert!(r["error"].as_str().unwrap().contains("unknown stage"));
}

#[test]
fn dynamize_lists_configurations() {
    let r = parse(dynamize("let f : int -> int = fun (x:int) -> x in f 1", 5, 4, 10));
    assert_eq!(r["type_nodes"], 4);
    let configs = r["configs"].as_array().unwrap();
    assert_eq!(configs.len(), 42);
    assert_eq!(configs[41]["kind"], "untyped");
    let r = parse(dynamize("let f : int -> int = fun (x:int) -> x in f 1", 5, 10, 10));
    assert!(r["error"].as_str().unwrap().contains("cannot be reached"));
}
