use evgrad::checker::TypingMode;
use evgrad::midend::{Comp, CoreProgram, EvSource};
use evgrad::pipeline::{compile, emit, CompileOptions, Passes, Stage};
use evgrad::types::germ_kind;

fn opts(passes: Passes) -> CompileOptions {
    CompileOptions { passes, ..CompileOptions::default() }
}

fn core(src: &str, passes: Passes) -> CoreProgram {
    compile(src, &opts(passes)).expect("compiles")
}

fn count(p: &CoreProgram, pred: impl Fn(&Comp) -> bool) -> usize {
    p.count_comps(&mut |c| pred(c))
}

const RUNNING: &str = "let f = fun (x:?) -> x * 2\nin print_int (f true)";

#[test]
fn dynamic_elaboration_ascribes_arguments_and_results() {
    let text = emit(RUNNING, &opts(Passes::without("prune").unwrap()), Stage::Anf).unwrap();
    assert!(text.contains("let t1:int = <int>x_0 in"), "{text}");
    assert!(text.contains("ascribe(t2, cod(self))"), "{text}");
    assert!(text.contains("ascribe(true, dom(0, f_0))"), "{text}");
}

#[test]
fn precise_codomain_is_pruned() {
    let text = emit(RUNNING, &opts(Passes::default()), Stage::Anf).unwrap();
    assert!(!text.contains("cod(self)"), "{text}");
    assert!(text.contains("dom(0, f_0)"), "{text}");
}

#[test]
fn precise_domain_is_pruned() {
    let src = "let g : ? = 0 in let f : int -> int = fun (x:int) -> x + 1 in let h = (fun (k:int->int) -> k 1) in h f";
    let p = core(src, Passes::default());
    let doms = count(&p, |c| matches!(c, Comp::DynAscribe { source: EvSource::Dom(..), .. }));
    assert_eq!(doms, 0, "{p}");
    let q = core(src, Passes::without("prune").unwrap());
    assert!(count(&q, |c| matches!(c, Comp::DynAscribe { .. })) > 0, "{q}");
}

#[test]
fn fully_static_program_keeps_no_dynamic_ascription() {
    let src = "let rec tak : (int, int, int) -> int = fun (x:int, y:int, z:int) -> \
               if y < x then tak (tak (x - 1) y z) (tak (y - 1) z x) (tak (z - 1) x y) else z in \
               let v : vec[int] = vector 2 0 in v.[0] <- tak 6 4 2; v.[0]";
    for direct in [true, false] {
        let passes = Passes { direct, ..Passes::default() };
        let p = core(src, passes);
        assert!(p.fully_static);
        let dyns = count(&p, |c| matches!(c, Comp::DynAscribe { .. } | Comp::Ascribe { .. } | Comp::CheckGerm { .. }));
        assert_eq!(dyns, 0, "{p}");
    }
}

#[test]
fn germ_ascriptions_become_checks() {
    let src = "let f = fun (x:?, y:?) -> x y in f (fun (z:?) -> z) 1";
    let p = core(src, Passes::default());
    let germ_ascriptions = count(&p, |c| matches!(c, Comp::Ascribe { target, .. } if germ_kind(target).is_some()));
    assert_eq!(germ_ascriptions, 0, "{p}");
    assert!(count(&p, |c| matches!(c, Comp::CheckGerm { .. })) >= 1, "{p}");
    let text = emit(src, &opts(Passes::default()), Stage::Anf).unwrap();
    assert!(text.contains("checkfun x_0"), "{text}");
    let q = core(src, Passes::without("germs").unwrap());
    assert_eq!(count(&q, |c| matches!(c, Comp::CheckGerm { .. })), 0);
}

#[test]
fn untyped_program_checks_every_elimination() {
    let src = "let v = vector 3 0 in let r = ref v in let t = (1, 2) in (!r).[0] + #1 t";
    let copts = CompileOptions { typing: TypingMode::Dynamic, ..CompileOptions::default() };
    let p = compile(src, &copts).unwrap();
    let checks = count(&p, |c| matches!(c, Comp::CheckGerm { .. }));
    assert!(checks >= 3, "{p}");
}

#[test]
fn captured_variables_fill_the_environment() {
    let src = "let a = 1 in let b = 2 in let f = (fun (x:int) -> x + a + b) in let g = f in g 3";
    let p = core(src, Passes::default());
    assert_eq!(p.codes.len(), 1);
    assert_eq!(p.codes[0].captured.len(), 2);
    let text = p.to_string();
    assert!(text.contains("(code0; a_0, b_0)"), "{text}");
}

#[test]
fn known_recursive_function_is_called_directly() {
    let src = "let rec fact : int -> int = fun (n:int) -> if n = 0 then 1 else n * fact (n - 1) in fact 5";
    let p = core(src, Passes::default());
    assert!(p.codes[0].direct);
    assert!(p.codes[0].rec_var.is_some());
    assert_eq!(count(&p, |c| matches!(c, Comp::DirectCall { .. })), 2, "{p}");
    let q = core(src, Passes::without("direct").unwrap());
    assert_eq!(count(&q, |c| matches!(c, Comp::DirectCall { .. })), 0);
}

#[test]
fn escaping_function_is_not_called_directly() {
    let src = "let f = fun (x:int) -> x in let apply = fun (g:int->int) -> g 2 in f 1 + apply f";
    let p = core(src, Passes::default());
    let f_code = &p.codes[0];
    assert!(!f_code.direct, "{p}");
}

#[test]
fn closure_ascribed_to_unknown_stays_a_closure() {
    let src = "let f = (fun (x:int) -> x) :: ? in f 1";
    let p = core(src, Passes::default());
    assert_eq!(count(&p, |c| matches!(c, Comp::MakeClosure { .. })), 1);
    assert_eq!(count(&p, |c| matches!(c, Comp::DirectCall { .. })), 0, "{p}");
}

#[test]
fn recursive_binding_under_several_ascriptions() {
    let src = "let rec f : ? -> int = fun (n:?) : ? -> if n < 1 then 0 else n + f (n - 1) in f 4";
    for passes in [Passes::default(), Passes::without("simplify").unwrap()] {
        let (report, _) = evgrad::pipeline::run_capture(src, &opts(passes), &Default::default(), "").unwrap();
        assert_eq!(report.result.unwrap(), "10");
    }
}
