use std::cell::{OnceCell, RefCell};
use std::io::Write;
use std::rc::Rc;

use super::value::{Body, Closure, Value, VariantVal};
use super::{Counters, RunOptions, RuntimeError};
use crate::evidence::ContentKind;
use crate::midend::{Atom, Block, Code, Comp, CoreProgram, EvSource, Loc, Stmt, Var};
use crate::span::Span;
use crate::surface::{BinOp, PrimOp};
use crate::types::{germ_kind, head_admits, meet, precision_le, ElimKind, Type};

/// Errors are boxed to keep the evaluator's recursive frames small.
type R<T> = Result<T, Box<RuntimeError>>;

const INT_BITS: u32 = 63;

fn wrap(n: i64) -> i64 {
    (n << (64 - INT_BITS)) >> (64 - INT_BITS)
}

enum Flow {
    Done(Value),
    /// A call in tail position, performed by the enclosing `call` loop.
    Tail { code: u32, callee: Value, args: Vec<Value> },
}

struct Frame {
    slots: Vec<Value>,
    closure: Option<Rc<Closure>>,
    /// The called handle; its evidence supplies `cod(self)`.
    this: Value,
}

pub(super) struct Machine<'a> {
    prog: &'a CoreProgram,
    opts: &'a RunOptions,
    pub(super) counters: Counters,
    depth: usize,
    depth_limit: usize,
    float_var: Vec<bool>,
    input: std::str::SplitAsciiWhitespace<'a>,
    out: &'a mut dyn Write,
}

fn content_ev(ev: &Type, kind: ContentKind) -> Type {
    match (kind, ev) {
        (ContentKind::Ref, Type::Ref(t)) | (ContentKind::Vec, Type::Vec(t)) => (**t).clone(),
        (ContentKind::TupleProj(i), Type::Tuple(ts)) => ts.get(i).cloned().unwrap_or(Type::Dyn),
        _ => Type::Dyn,
    }
}

impl<'a> Machine<'a> {
    pub(super) fn new(
        prog: &'a CoreProgram,
        opts: &'a RunOptions,
        depth_limit: usize,
        input: &'a str,
        out: &'a mut dyn Write,
    ) -> Self {
        let float_var = prog.vars.iter().map(|v| v.ty == Type::Float).collect();
        Machine {
            prog,
            opts,
            counters: Counters::default(),
            depth: 0,
            depth_limit,
            float_var,
            input: input.split_ascii_whitespace(),
            out,
        }
    }

    pub(super) fn run(&mut self) -> R<Value> {
        let mut frame = Frame {
            slots: vec![Value::Unit; self.prog.main_frame as usize],
            closure: None,
            this: Value::Unit,
        };
        let v = match self.block(&self.prog.main, &mut frame, false)? {
            Flow::Done(v) => v,
            Flow::Tail { .. } => unreachable!("main is never in tail position"),
        };
        self.out.flush().map_err(|e| Box::new(RuntimeError::Output(e.to_string())))?;
        Ok(v)
    }

    // ---- allocation and representation ----

    fn alloc(&mut self, ev: Type, body: Body) -> Value {
        self.counters.heap_allocs += 1;
        Value::obj(ev, body)
    }

    fn box_float(&mut self, x: f64) -> Value {
        self.counters.float_boxes += 1;
        self.alloc(Type::Float, Body::Float(x))
    }

    /// A freshly created float: immediate under DFO, boxed otherwise.
    fn new_float(&mut self, x: f64) -> Value {
        if self.opts.dfo {
            Value::Float(x)
        } else {
            self.box_float(x)
        }
    }

    /// Under DFO, float-typed positions hold immediates and every other
    /// position holds boxes.
    fn represent(&mut self, v: Value, var: &Var) -> Value {
        if !self.opts.dfo {
            return v;
        }
        let float_pos = self.float_var[var.id.0 as usize];
        match v {
            Value::Float(x) if !float_pos => self.box_float(x),
            Value::Obj(ref o) if float_pos => match o.body {
                Body::Float(x) => Value::Float(x),
                _ => v,
            },
            v => v,
        }
    }

    // ---- variables ----

    fn load(&self, v: &Var, f: &Frame) -> Value {
        match v.loc {
            Loc::Local(i) => f.slots[i as usize].clone(),
            Loc::Env(i) => f.closure.as_ref().expect("environment access outside a closure").env[i as usize].clone(),
            Loc::Rec => f
                .closure
                .as_ref()
                .and_then(|c| c.rec.get())
                .expect("recursive binding without self")
                .clone(),
            Loc::Free => panic!("variable {} has no location; run closure conversion first", self.prog.var(v.id).name),
        }
    }

    fn atom(&mut self, a: &Atom, f: &Frame) -> Value {
        match a {
            Atom::Var(v) => self.load(v, f),
            Atom::Int(n) => Value::Int(wrap(*n)),
            Atom::Bool(b) => Value::Bool(*b),
            Atom::Unit => Value::Unit,
            Atom::Float(x) => self.new_float(*x),
        }
    }

    fn atoms(&mut self, xs: &[Atom], f: &Frame) -> Vec<Value> {
        xs.iter().map(|a| self.atom(a, f)).collect()
    }

    fn int(&mut self, a: &Atom, f: &Frame) -> i64 {
        match self.atom(a, f) {
            Value::Int(n) => n,
            v => panic!("expected an integer, found {v:?}"),
        }
    }

    fn float(&mut self, a: &Atom, f: &Frame) -> f64 {
        let v = self.atom(a, f);
        v.as_float().unwrap_or_else(|| panic!("expected a float, found {v:?}"))
    }

    fn boolean(&mut self, a: &Atom, f: &Frame) -> bool {
        match self.atom(a, f) {
            Value::Bool(b) => b,
            v => panic!("expected a boolean, found {v:?}"),
        }
    }

    // ---- evidence ----

    /// Ascribes `v` to evidence `ev`, combining it with the value's current
    /// evidence. `germ` marks an ascription whose evidence is exactly the
    /// germ of an elimination: its only obligation is the head constructor.
    /// Accesses to a structure's contents (`read`, `write`) proxy only when
    /// they refine the value's evidence.
    fn ascribe(&mut self, v: Value, ev: &Type, germ: Option<&ElimKind>, span: Span, context: &'static str) -> R<Value> {
        self.counters.trans_ops += 1;
        let cast = |from: Type| Box::new(RuntimeError::Cast { span, context, from, to: ev.clone() });
        let o = match &v {
            Value::Obj(o) if o.body.is_mutable_ev() => o.clone(),
            _ => {
                if ev.is_dyn() {
                    return Ok(v);
                }
                let cur = v.evidence();
                let ok = match germ {
                    Some(kind) => head_admits(&cur, kind),
                    None => meet(&cur, ev).is_some(),
                };
                return if ok { Ok(v) } else { Err(cast(cur)) };
            }
        };
        if ev.is_dyn() {
            return Ok(v);
        }
        let cur = o.ev.borrow().clone();
        let new = match germ {
            Some(kind) if head_admits(&cur, kind) => cur.clone(),
            Some(_) => return Err(cast(cur)),
            None => match meet(&cur, ev) {
                Some(t) => t,
                None => return Err(cast(cur)),
            },
        };
        let refined = new != cur;
        if refined {
            self.counters.ev_refinements += 1;
        }
        let closure = matches!(o.body, Body::Closure(_));
        let monotonic = if closure { self.opts.mode.monotonic_closures() } else { self.opts.mode.monotonic_structures() };
        if monotonic {
            if refined {
                debug_assert!(precision_le(&new, &cur), "evidence must only grow more precise");
                *o.ev.borrow_mut() = new;
            }
            Ok(v)
        } else if !refined && matches!(context, "read" | "write") {
            Ok(v)
        } else {
            self.counters.proxy_allocs += 1;
            if closure {
                self.counters.closure_proxies += 1;
            }
            Ok(self.alloc(new, o.body.share()))
        }
    }

    fn source_ev(&mut self, source: &EvSource, f: &Frame) -> (Type, &'static str) {
        match source {
            EvSource::Dom(i, callee) => {
                let ev = self.atom(callee, f).evidence();
                let dom = match &ev {
                    Type::Fun(ps, _) => ps.get(*i).cloned().unwrap_or(Type::Dyn),
                    _ => Type::Dyn,
                };
                (dom, "argument")
            }
            EvSource::Cod => {
                let cod = match f.this.evidence() {
                    Type::Fun(_, r) => (*r).clone(),
                    _ => Type::Dyn,
                };
                (cod, "return")
            }
            EvSource::Content(kind, s) => (content_ev(&self.atom(s, f).evidence(), *kind), "read"),
            EvSource::Store(kind, s) => (content_ev(&self.atom(s, f).evidence(), *kind), "write"),
        }
    }

    fn check_germ(&mut self, v: Value, kind: &ElimKind, span: Span) -> R<Value> {
        self.counters.germ_checks += 1;
        let found = v.evidence();
        if head_admits(&found, kind) {
            Ok(v)
        } else {
            Err(Box::new(RuntimeError::Germ { span, kind: kind.clone(), found }))
        }
    }

    // ---- calls ----

    fn closure_of(v: &Value) -> Rc<Closure> {
        match v {
            Value::Obj(o) => match &o.body {
                Body::Closure(c) => c.clone(),
                _ => panic!("applying a non-function {v:?}"),
            },
            _ => panic!("applying a non-function {v:?}"),
        }
    }

    fn call(&mut self, mut code: u32, mut callee: Value, mut args: Vec<Value>, span: Span) -> R<Value> {
        self.depth += 1;
        if self.depth > self.depth_limit {
            return Err(Box::new(RuntimeError::StackOverflow { span, limit: self.depth_limit }));
        }
        loop {
            let c: &Code = &self.prog.codes[code as usize];
            let closure = Self::closure_of(&callee);
            let mut slots = vec![Value::Unit; c.frame_size as usize];
            for (p, a) in c.params.iter().zip(args) {
                let Loc::Local(i) = p.loc else { unreachable!("parameters live in the frame") };
                slots[i as usize] = self.represent(a, p);
            }
            let mut frame = Frame { slots, closure: Some(closure), this: callee };
            match self.block(&c.body, &mut frame, true)? {
                Flow::Done(v) => {
                    self.depth -= 1;
                    return Ok(v);
                }
                Flow::Tail { code: c2, callee: f2, args: a2 } => {
                    code = c2;
                    callee = f2;
                    args = a2;
                }
            }
        }
    }

    fn call_target(&mut self, s: &Stmt, f: &Frame) -> (u32, Value, Vec<Value>) {
        match &s.comp {
            Comp::App { callee, args } => {
                let fv = self.atom(callee, f);
                let code = Self::closure_of(&fv).code;
                (code, fv, self.atoms(args, f))
            }
            Comp::DirectCall { code, callee, args } => {
                let fv = self.atom(callee, f);
                (code.0, fv, self.atoms(args, f))
            }
            _ => unreachable!("not a call"),
        }
    }

    // ---- evaluation ----

    fn block(&mut self, b: &Block, f: &mut Frame, tail: bool) -> R<Flow> {
        let n = b.stmts.len();
        for (i, s) in b.stmts.iter().enumerate() {
            let last = tail && i + 1 == n && b.ret.and_then(|a| a.var_id()) == Some(s.var.id);
            let v = match &s.comp {
                Comp::App { .. } | Comp::DirectCall { .. } => {
                    let (code, callee, args) = self.call_target(s, f);
                    if last {
                        return Ok(Flow::Tail { code, callee, args });
                    }
                    self.call(code, callee, args, s.span)?
                }
                Comp::If { cond, then_block, else_block } => {
                    let b = if self.boolean(cond, f) { then_block } else { else_block };
                    match self.block(b, f, last)? {
                        Flow::Done(v) => v,
                        tail_call => return Ok(tail_call),
                    }
                }
                Comp::Match { .. } => match self.match_(s, f, last)? {
                    Flow::Done(v) => v,
                    tail_call => return Ok(tail_call),
                },
                Comp::Loop { var, lo, hi, body } => {
                    let lo = self.int(lo, f);
                    let hi = self.int(hi, f);
                    let Loc::Local(slot) = var.loc else { unreachable!("loop variables live in the frame") };
                    for i in lo..=hi {
                        f.slots[slot as usize] = Value::Int(i);
                        self.block(body, f, false)?;
                    }
                    Value::Unit
                }
                _ => self.comp(s, f)?,
            };
            let v = self.represent(v, &s.var);
            if let Loc::Local(i) = s.var.loc {
                f.slots[i as usize] = v;
            }
        }
        Ok(Flow::Done(self.atom(&b.result(), f)))
    }

    #[inline(never)]
    /// Computations that do not evaluate nested blocks.
    fn comp(&mut self, s: &Stmt, f: &mut Frame) -> R<Value> {
        let span = s.span;
        let v = match &s.comp {
            Comp::Atom(a) => self.atom(a, f),
            Comp::Lambda(_) => panic!("lambda left in a closure-converted program"),
            Comp::MakeClosure { code, captured, ev } => {
                let env = self.atoms(captured, f);
                let clo = Rc::new(Closure { code: code.0, env, rec: OnceCell::new() });
                let v = self.alloc(ev.ty().clone(), Body::Closure(clo.clone()));
                if s.rec {
                    let _ = clo.rec.set(v.clone());
                }
                v
            }
            Comp::App { .. } | Comp::DirectCall { .. } => unreachable!("calls are evaluated by block"),
            Comp::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs, f, span)?,
            Comp::Prim { op, args } => self.prim(*op, args, f, span)?,
            Comp::MakeRef { init, ty } => {
                let v = self.atom(init, f);
                let ev = if self.opts.mode.monotonic_structures() { Type::reference(v.evidence()) } else { ty.clone() };
                self.alloc(ev, Body::Ref(Rc::new(RefCell::new(v))))
            }
            Comp::Deref(r) => match self.atom(r, f) {
                Value::Obj(o) => match &o.body {
                    Body::Ref(cell) => cell.borrow().clone(),
                    _ => panic!("dereferencing a non-reference"),
                },
                v => panic!("dereferencing {v:?}"),
            },
            Comp::Assign { target, value } => {
                let v = self.atom(value, f);
                match self.atom(target, f) {
                    Value::Obj(o) => match &o.body {
                        Body::Ref(cell) => *cell.borrow_mut() = v,
                        _ => panic!("assigning to a non-reference"),
                    },
                    t => panic!("assigning to {t:?}"),
                }
                Value::Unit
            }
            Comp::MakeVec { len, init, ty } => {
                let n = self.int(len, f);
                if n < 0 {
                    return Err(Box::new(RuntimeError::NegativeLength { span, len: n }));
                }
                let v = self.atom(init, f);
                let ev = if self.opts.mode.monotonic_structures() { Type::vector(v.evidence()) } else { ty.clone() };
                self.alloc(ev, Body::Vec(Rc::new(RefCell::new(vec![v; n as usize]))))
            }
            Comp::VecGet { vec, index } => {
                let i = self.int(index, f);
                let items = self.vector(vec, f);
                let items = items.borrow();
                match usize::try_from(i).ok().and_then(|k| items.get(k)) {
                    Some(v) => v.clone(),
                    None => return Err(Box::new(RuntimeError::IndexOutOfBounds { span, index: i, len: items.len() })),
                }
            }
            Comp::VecSet { vec, index, value } => {
                let i = self.int(index, f);
                let v = self.atom(value, f);
                let items = self.vector(vec, f);
                let mut items = items.borrow_mut();
                let len = items.len();
                match usize::try_from(i).ok().and_then(|k| items.get_mut(k)) {
                    Some(slot) => *slot = v,
                    None => return Err(Box::new(RuntimeError::IndexOutOfBounds { span, index: i, len })),
                }
                Value::Unit
            }
            Comp::Tuple { items, ty } => {
                let vs = self.atoms(items, f);
                let ev = if self.opts.mode.monotonic_structures() {
                    Type::tuple(vs.iter().map(Value::evidence).collect())
                } else {
                    ty.clone()
                };
                self.alloc(ev, Body::Tuple(vs.into()))
            }
            Comp::Proj { tuple, index } => match self.atom(tuple, f) {
                Value::Obj(o) => match &o.body {
                    Body::Tuple(items) => items[*index].clone(),
                    _ => panic!("projecting from a non-tuple"),
                },
                v => panic!("projecting from {v:?}"),
            },
            Comp::Ctor { variant, ctor, tag, args } => {
                let fields = self.atoms(args, f);
                let body = Body::Variant(Rc::new(VariantVal { ctor: ctor.clone(), tag: *tag, fields }));
                self.alloc(Type::Named(variant.clone()), body)
            }
            Comp::Ascribe { atom, ev, target, .. } => {
                let v = self.atom(atom, f);
                let germ = if ev.ty() == target { germ_kind(target) } else { None };
                self.ascribe(v, ev.ty(), germ.as_ref(), span, "ascription")?
            }
            Comp::DynAscribe { atom, source } => {
                let v = self.atom(atom, f);
                let (ev, context) = self.source_ev(source, f);
                self.ascribe(v, &ev, None, span, context)?
            }
            Comp::CheckGerm { atom, kind } => {
                let v = self.atom(atom, f);
                self.check_germ(v, kind, span)?
            }
            Comp::If { .. } | Comp::Loop { .. } | Comp::Match { .. } => unreachable!("control flow is evaluated by block"),
        };
        Ok(v)
    }

    fn vector(&mut self, a: &Atom, f: &Frame) -> Rc<RefCell<Vec<Value>>> {
        match self.atom(a, f) {
            Value::Obj(o) => match &o.body {
                Body::Vec(items) => items.clone(),
                _ => panic!("indexing a non-vector"),
            },
            v => panic!("indexing {v:?}"),
        }
    }

    fn match_(&mut self, s: &Stmt, f: &mut Frame, tail: bool) -> R<Flow> {
        let Comp::Match { scrutinee, arms, .. } = &s.comp else { unreachable!() };
        let v = match self.atom(scrutinee, f) {
            Value::Obj(o) => match &o.body {
                Body::Variant(v) => v.clone(),
                _ => panic!("matching on a non-variant"),
            },
            v => panic!("matching on {v:?}"),
        };
        let arm = arms.iter().find(|a| a.tag == v.tag).expect("exhaustive match");
        for (b, x) in arm.binders.iter().zip(&v.fields) {
            if let Some(b) = b {
                let x = self.represent(x.clone(), b);
                let Loc::Local(i) = b.loc else { unreachable!("match binders live in the frame") };
                f.slots[i as usize] = x;
            }
        }
        self.block(&arm.body, f, tail)
    }

    fn binary(&mut self, op: BinOp, lhs: &Atom, rhs: &Atom, f: &Frame, span: Span) -> R<Value> {
        use BinOp::*;
        Ok(match op {
            Add | Sub | Mul | Div | Mod | Eq | Ne | Lt | Le | Gt | Ge => {
                let a = self.int(lhs, f);
                let b = self.int(rhs, f);
                match op {
                    Add => Value::Int(wrap(a.wrapping_add(b))),
                    Sub => Value::Int(wrap(a.wrapping_sub(b))),
                    Mul => Value::Int(wrap(a.wrapping_mul(b))),
                    Div | Mod if b == 0 => return Err(Box::new(RuntimeError::DivisionByZero { span })),
                    Div => Value::Int(wrap(a.wrapping_div(b))),
                    Mod => Value::Int(wrap(a.wrapping_rem(b))),
                    Eq => Value::Bool(a == b),
                    Ne => Value::Bool(a != b),
                    Lt => Value::Bool(a < b),
                    Le => Value::Bool(a <= b),
                    Gt => Value::Bool(a > b),
                    _ => Value::Bool(a >= b),
                }
            }
            FAdd | FSub | FMul | FDiv => {
                let a = self.float(lhs, f);
                let b = self.float(rhs, f);
                let x = match op {
                    FAdd => a + b,
                    FSub => a - b,
                    FMul => a * b,
                    _ => a / b,
                };
                self.new_float(x)
            }
            FEq | FLt | FLe | FGt | FGe => {
                let a = self.float(lhs, f);
                let b = self.float(rhs, f);
                Value::Bool(match op {
                    FEq => a == b,
                    FLt => a < b,
                    FLe => a <= b,
                    FGt => a > b,
                    _ => a >= b,
                })
            }
            And | Or => {
                let a = self.boolean(lhs, f);
                let b = self.boolean(rhs, f);
                Value::Bool(if op == And { a && b } else { a || b })
            }
        })
    }

    fn print(&mut self, text: std::fmt::Arguments) -> R<Value> {
        self.out.write_fmt(text).map_err(|e| Box::new(RuntimeError::Output(e.to_string())))?;
        Ok(Value::Unit)
    }

    fn read_token(&mut self, span: Span, what: &str) -> R<&'a str> {
        self.input
            .next()
            .ok_or_else(|| Box::new(RuntimeError::Input { span, message: format!("end of input while reading {what}") }))
    }

    fn prim(&mut self, op: PrimOp, args: &[Atom], f: &Frame, span: Span) -> R<Value> {
        use PrimOp::*;
        match op {
            PrintInt => {
                let n = self.int(&args[0], f);
                self.print(format_args!("{n}\n"))
            }
            PrintBool => {
                let b = self.boolean(&args[0], f);
                self.print(format_args!("{b}\n"))
            }
            PrintFloat => {
                let x = self.float(&args[0], f);
                self.print(format_args!("{x:?}\n"))
            }
            ReadInt => {
                let tok = self.read_token(span, "an integer")?;
                tok.parse::<i64>()
                    .map(|n| Value::Int(wrap(n)))
                    .map_err(|_| Box::new(RuntimeError::Input { span, message: format!("expected an integer, found {tok:?}") }))
            }
            ReadFloat => {
                let tok = self.read_token(span, "a float")?;
                let x = tok
                    .parse::<f64>()
                    .map_err(|_| Box::new(RuntimeError::Input { span, message: format!("expected a float, found {tok:?}") }))?;
                Ok(self.new_float(x))
            }
            Not => Ok(Value::Bool(!self.boolean(&args[0], f))),
            FloatOfInt => {
                let n = self.int(&args[0], f);
                Ok(self.new_float(n as f64))
            }
            IntOfFloat => Ok(Value::Int(wrap(self.float(&args[0], f) as i64))),
            Abs => Ok(Value::Int(wrap(self.int(&args[0], f).wrapping_abs()))),
            Sqrt | Sin | Cos | Exp | Log | FAbs => {
                let x = self.float(&args[0], f);
                let y = match op {
                    Sqrt => x.sqrt(),
                    Sin => x.sin(),
                    Cos => x.cos(),
                    Exp => x.exp(),
                    Log => x.ln(),
                    _ => x.abs(),
                };
                Ok(self.new_float(y))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::wrap;

    #[test]
    fn integers_wrap_at_63_bits() {
        let max = (1i64 << 62) - 1;
        let min = -(1i64 << 62);
        assert_eq!(wrap(max.wrapping_add(1)), min);
        assert_eq!(wrap(min.wrapping_sub(1)), max);
        assert_eq!(wrap(-5), -5);
    }
}
