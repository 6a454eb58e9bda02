use evgrad::checker::TypingMode;
use evgrad::pipeline::{run_capture, CompileError, CompileOptions, Passes};
use evgrad::runtime::{Counters, Mode, Outcome, RunOptions, RuntimeError};

fn run_with(src: &str, mode: Mode, dfo: bool, passes: Passes) -> Result<(Outcome, String, Counters, Option<RuntimeError>), CompileError> {
    let copts = CompileOptions { typing: TypingMode::Gradual, dfo, passes };
    let ropts = RunOptions { mode, dfo, ..RunOptions::default() };
    let (report, out) = run_capture(src, &copts, &ropts, "")?;
    Ok((report.outcome(), out, report.counters, report.result.err()))
}

fn run(src: &str, mode: Mode) -> (Outcome, String, Counters) {
    let (o, out, c, _) = run_with(src, mode, false, Passes::default()).expect("compiles");
    (o, out, c)
}

fn value(v: &str) -> Outcome {
    Outcome::Value(v.to_string())
}

const ADD1: &str = "let add1 = fun (x:int) -> x + 1 in\nlet f : ? -> int = fun g -> g(1) in\n";

#[test]
fn optimistic_application_succeeds() {
    for mode in Mode::ALL {
        assert_eq!(run(&format!("{ADD1}f(add1)"), mode).0, value("2"), "{mode}");
    }
}

#[test]
fn int_result_used_as_bool_is_rejected_statically() {
    let err = run_with(&format!("{ADD1}not(f(add1))"), Mode::G, false, Passes::default()).unwrap_err();
    assert!(matches!(err, CompileError::Type(_)), "{err}");
}

#[test]
fn applying_a_boolean_fails_at_runtime() {
    for mode in Mode::ALL {
        for passes in [Passes::default(), Passes::without("germs").unwrap()] {
            let (o, _, c, _) = run_with(&format!("{ADD1}f(true)"), mode, false, passes).unwrap();
            assert!(o.is_blame(), "{mode}: {o:?}");
            assert_eq!(c.cast_errors, 1);
        }
    }
}

#[test]
fn increment_of_unknown_argument() {
    for mode in Mode::ALL {
        let (o, _, _, e) = run_with("(fun (x:?) -> x + 1) false", mode, false, Passes::default()).unwrap();
        assert_eq!(o, Outcome::CastError, "{mode}");
        let e = e.unwrap().to_string();
        assert!(e.contains("bool") && e.contains("int"), "{e}");
        assert_eq!(run("(fun (x:?) -> x + 1) 10", mode).0, value("11"));
    }
}

const FIG_REF: &str = "let x = ref (4 :: ?) in\nlet y: ref[bool] = x in\ny := true;\n!y";

#[test]
fn guarded_reference_aliases_keep_separate_obligations() {
    let (o, _, c) = run(FIG_REF, Mode::G);
    assert_eq!(o, value("true"));
    assert!(c.proxy_allocs >= 1);
    assert_eq!(run(FIG_REF, Mode::MC).0, value("true"));
}

#[test]
fn monotonic_reference_fails_on_second_line() {
    let (o, _, _, e) = run_with(FIG_REF, Mode::MV, false, Passes::default()).unwrap();
    assert_eq!(o, Outcome::CastError);
    let span = e.unwrap().span().unwrap();
    assert_eq!(span.line_col(FIG_REF).0, 2);
}

const CLOSURE_OK: &str = "let f : ?->? = fun x -> x in\nprint_int(f 10);\nprint_bool(f true)";
const CLOSURE_FAIL: &str = "let f : ?->? = fun x -> x in\nlet g : int->int = f in\nprint_int(g 10); print_bool(f true)";

#[test]
fn untyped_identity_serves_both_types() {
    for mode in Mode::ALL {
        let (o, out, _) = run(CLOSURE_OK, mode);
        assert_eq!(out, "10\ntrue\n", "{mode}");
        assert_eq!(o, value("()"));
    }
}

#[test]
fn monotonic_closure_remembers_precise_alias() {
    for mode in [Mode::MC, Mode::MV] {
        let (o, out, _) = run(CLOSURE_FAIL, mode);
        assert!(o.is_blame(), "{mode}: {o:?}");
        assert_eq!(out, "10\n");
    }
    let (o, out, c) = run(CLOSURE_FAIL, Mode::G);
    assert_eq!(out, "10\ntrue\n");
    assert_eq!(o, value("()"));
    assert!(c.closure_proxies >= 1);
}

#[test]
fn monotonic_values_never_allocate_proxies() {
    for src in [FIG_REF, CLOSURE_OK, CLOSURE_FAIL] {
        assert_eq!(run(src, Mode::MV).2.proxy_allocs, 0);
        assert_eq!(run(src, Mode::MC).2.closure_proxies, 0);
    }
}

#[test]
fn germ_check_does_not_allocate() {
    let src = "let v : ? = vector 3 0 in let w = (fun (u:?) -> u.[1]) in w v";
    let (o, _, c) = run(src, Mode::G);
    assert_eq!(o, value("0"));
    assert!(c.germ_checks >= 1);
    assert_eq!(c.proxy_allocs, 0, "{c:?}");
    let (_, _, _, _) = run_with(src, Mode::G, false, Passes::without("germs").unwrap()).unwrap();
}

#[test]
fn germ_failure_on_integer() {
    let (o, _, _, e) = run_with("let x : ? = 5 in x 1", Mode::G, false, Passes::default()).unwrap();
    assert_eq!(o, Outcome::GermError);
    assert!(matches!(e, Some(RuntimeError::Germ { .. })));
}

#[test]
fn heap_operations() {
    assert_eq!(run("let v = vector 3 0 in v.[2]", Mode::MV).0, value("0"));
    assert_eq!(run("#1 (1, true)", Mode::G).0, value("true"));
    let stream = "type stream = SNil | SCons of int * (int -> stream)\n\
                  match SCons(1, fun (n:int) -> SNil) with | SNil -> 0 | SCons(h, t) -> h";
    assert_eq!(run(stream, Mode::MV).0, value("1"));
}

#[test]
fn ordinary_runtime_errors() {
    let (o, _, _, e) = run_with("let v = vector 2 0 in v.[2]", Mode::G, false, Passes::default()).unwrap();
    assert_eq!(o, Outcome::OtherError);
    assert!(matches!(e, Some(RuntimeError::IndexOutOfBounds { index: 2, len: 2, .. })));
    let (o, _, _, e) = run_with("10 / (5 - 5)", Mode::G, false, Passes::default()).unwrap();
    assert_eq!(o, Outcome::OtherError);
    assert!(matches!(e, Some(RuntimeError::DivisionByZero { .. })));
}

#[test]
fn depth_limit_reports_stack_overflow() {
    let src = "let rec f : int -> int = fun (n:int) -> if n = 0 then 0 else 1 + f (n - 1) in f 100000";
    let copts = CompileOptions::default();
    let ropts = RunOptions { max_depth: 1000, ..RunOptions::default() };
    let (report, _) = run_capture(src, &copts, &ropts, "").unwrap();
    assert!(matches!(report.result, Err(RuntimeError::StackOverflow { limit: 1000, .. })));
    let (report, _) = run_capture(src, &copts, &RunOptions::default(), "").unwrap();
    assert_eq!(report.result.unwrap(), "100000");
}

#[test]
fn tail_calls_run_in_constant_depth() {
    let src = "let rec count : (int, int) -> int = fun (n:int, acc:int) -> if n = 0 then acc else count (n - 1) (acc + 1) in count 200000 0";
    let ropts = RunOptions { max_depth: 100, ..RunOptions::default() };
    let (report, _) = run_capture(src, &CompileOptions::default(), &ropts, "").unwrap();
    assert_eq!(report.result.unwrap(), "200000");
}

#[test]
fn integer_arithmetic_wraps() {
    let max = (1i64 << 62) - 1;
    let min = -(1i64 << 62);
    assert_eq!(run(&format!("{max} + 1"), Mode::G).0, value(&min.to_string()));
}

#[test]
fn floats_box_without_dfo_and_stay_immediate_with_it() {
    let src = "let acc : ref[float] = ref 0.0 in loop i = 1 to 1000 do acc := !acc +. 1.0 done; !acc";
    let (o, _, c, _) = run_with(src, Mode::G, false, Passes::default()).unwrap();
    assert_eq!(o, value("1000.0"));
    assert!(c.float_boxes >= 1000, "{c:?}");
    let (o, _, c, _) = run_with(src, Mode::G, true, Passes::default()).unwrap();
    assert_eq!(o, value("1000.0"));
    assert_eq!(c.float_boxes, 0, "{c:?}");
}

#[test]
fn dfo_boxes_at_the_untyped_boundary() {
    let src = "let x : float = 1.5 in let y : ? = x in let z : float = y in z +. 1.0";
    let (o, _, c, _) = run_with(src, Mode::G, true, Passes::default()).unwrap();
    assert_eq!(o, value("2.5"));
    assert_eq!(c.float_boxes, 1, "{c:?}");
}

#[test]
fn reads_input_tokens() {
    let copts = CompileOptions::default();
    let (report, out) = run_capture("print_int (read_int () * 2)", &copts, &RunOptions::default(), " 21\n").unwrap();
    assert_eq!(out, "42\n");
    assert!(report.result.is_ok());
    let (report, _) = run_capture("read_int ()", &copts, &RunOptions::default(), "").unwrap();
    assert!(matches!(report.result, Err(RuntimeError::Input { .. })));
}

#[test]
fn statically_typed_programs_perform_no_checks() {
    let src = "let f = fun (x:int) -> x * 2 in let v : vec[int] = vector 4 1 in loop i = 0 to 3 do v.[i] <- f v.[i] done; v.[3]";
    let copts = CompileOptions { typing: TypingMode::Static, ..CompileOptions::default() };
    for mode in Mode::ALL {
        let ropts = RunOptions { mode, ..RunOptions::default() };
        let (report, _) = run_capture(src, &copts, &ropts, "").unwrap();
        assert_eq!(report.result.as_deref(), Ok("2"));
        let c = report.counters;
        assert_eq!((c.trans_ops, c.germ_checks, c.proxy_allocs), (0, 0, 0), "{mode}: {c:?}");
    }
}
