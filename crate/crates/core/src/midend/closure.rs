use std::collections::{HashMap, HashSet};

use super::core::*;
use super::optimize::forward;
use crate::checker::AscKind;
use crate::evidence::Evidence;
use crate::types::precision_le;

/// Lifts every lambda into the code table and gives every variable a frame
/// slot, an environment slot, or the recursive-self slot.
///
/// With `direct`, a lambda bound by `let` or `let rec` whose variable is only
/// ever called (never passed, returned, stored, or ascribed) is called
/// through its code label; its domain and codomain evidence is then the
/// closure's initial evidence and is resolved at compile time.
pub fn closure_convert(mut p: CoreProgram, direct: bool) -> CoreProgram {
    let known = if direct { known_callees(&p) } else { HashMap::new() };
    let mut main = std::mem::take(&mut p.main);
    if !known.is_empty() {
        let mut subst = HashMap::new();
        resolve_known(&p, &mut main, &known, None, &mut subst);
        forward(&mut main, &subst);
    }
    let mut cc = Converter { codes: Vec::new(), code_of: HashMap::new(), known };
    let mut ctx = Frame::new(None);
    cc.block(&mut main, &mut ctx);
    debug_assert!(ctx.captured.is_empty());
    p.main = main;
    p.main_frame = ctx.next;
    p.codes = cc.codes.into_iter().map(|c| c.expect("reserved code filled")).collect();
    p
}

/// Lambda-bound variables whose every use is in callee position (or as the
/// source of a domain ascription for such a call), mapped to their
/// evidence.
fn known_callees(p: &CoreProgram) -> HashMap<VarId, Evidence> {
    let mut lambdas = HashMap::new();
    let mut escaped = HashSet::new();
    scan(&p.main, &mut lambdas, &mut escaped);
    lambdas.retain(|v, _| !escaped.contains(v));
    lambdas
}

fn scan(b: &Block, lambdas: &mut HashMap<VarId, Evidence>, escaped: &mut HashSet<VarId>) {
    for s in &b.stmts {
        if let Comp::Lambda(l) = &s.comp {
            lambdas.insert(s.var.id, l.ev.clone());
        }
        match &s.comp {
            Comp::App { args, .. } => escaped.extend(args.iter().filter_map(Atom::var_id)),
            Comp::DynAscribe { atom, source: EvSource::Dom(..) } => escaped.extend(atom.var_id()),
            other => escaped.extend(other.atoms().iter().filter_map(Atom::var_id)),
        }
        for nested in s.comp.blocks() {
            scan(nested, lambdas, escaped);
        }
    }
    escaped.extend(b.ret.and_then(|a| a.var_id()));
}

/// Turns domain and codomain ascriptions for known callees into static
/// ones, or drops them when the subject is already precise enough.
fn resolve_known(
    p: &CoreProgram,
    b: &mut Block,
    known: &HashMap<VarId, Evidence>,
    cod: Option<&Evidence>,
    subst: &mut HashMap<VarId, Atom>,
) {
    for s in &mut b.stmts {
        let resolved = match &s.comp {
            Comp::DynAscribe { atom, source: EvSource::Dom(k, f) } => {
                f.var_id().and_then(|f| known.get(&f)).and_then(|ev| ev.dom(*k)).map(|ev| (*atom, ev))
            }
            Comp::DynAscribe { atom, source: EvSource::Cod } => cod.and_then(Evidence::cod).map(|ev| (*atom, ev)),
            _ => None,
        };
        if let Some((atom, ev)) = resolved {
            if precision_le(&p.atom_type(&atom), ev.ty()) {
                subst.insert(s.var.id, atom);
            } else {
                s.comp = Comp::Ascribe { atom, ev, target: p.var(s.var.id).ty.clone(), kind: AscKind::Implicit };
            }
        }
        let is_lambda = matches!(s.comp, Comp::Lambda(_));
        let own = match &s.comp {
            Comp::Lambda(l) if known.contains_key(&s.var.id) => Some(l.ev.clone()),
            _ => None,
        };
        for nested in s.comp.blocks_mut() {
            resolve_known(p, nested, known, if is_lambda { own.as_ref() } else { cod }, subst);
        }
    }
}

struct Frame {
    locs: HashMap<VarId, Loc>,
    next: u32,
    captured: Vec<VarId>,
}

impl Frame {
    fn new(rec: Option<VarId>) -> Self {
        let mut locs = HashMap::new();
        if let Some(r) = rec {
            locs.insert(r, Loc::Rec);
        }
        Frame { locs, next: 0, captured: Vec::new() }
    }

    fn bind(&mut self, v: &mut Var) {
        let loc = Loc::Local(self.next);
        self.next += 1;
        self.locs.insert(v.id, loc);
        v.loc = loc;
    }

    fn resolve(&mut self, a: &mut Atom) {
        let Atom::Var(v) = a else { return };
        v.loc = match self.locs.get(&v.id) {
            Some(loc) => *loc,
            None => {
                let loc = Loc::Env(self.captured.len() as u32);
                self.captured.push(v.id);
                self.locs.insert(v.id, loc);
                loc
            }
        };
    }
}

struct Converter {
    codes: Vec<Option<Code>>,
    code_of: HashMap<VarId, CodeId>,
    known: HashMap<VarId, Evidence>,
}

impl Converter {
    fn lift(&mut self, var: VarId, rec: bool, l: LambdaDef) -> (CodeId, Vec<VarId>) {
        let id = CodeId(self.codes.len() as u32);
        self.codes.push(None);
        let direct = self.known.contains_key(&var);
        if direct {
            self.code_of.insert(var, id);
        }
        let LambdaDef { mut params, ret, body, .. } = l;
        let mut frame = Frame::new(rec.then_some(var));
        for x in &mut params {
            frame.bind(x);
        }
        let mut body = body;
        self.block(&mut body, &mut frame);
        let captured = frame.captured.clone();
        self.codes[id.0 as usize] = Some(Code {
            id,
            params,
            ret,
            captured: captured.clone(),
            rec_var: rec.then_some(var),
            body,
            frame_size: frame.next,
            direct,
        });
        (id, captured)
    }

    fn block(&mut self, b: &mut Block, frame: &mut Frame) {
        for s in &mut b.stmts {
            if let Comp::Lambda(_) = s.comp {
                let Comp::Lambda(l) = std::mem::replace(&mut s.comp, Comp::Atom(Atom::Unit)) else { unreachable!() };
                let ev = l.ev.clone();
                let (code, captured) = self.lift(s.var.id, s.rec, *l);
                let mut captured: Vec<Atom> = captured.into_iter().map(|v| Atom::Var(Var::new(v))).collect();
                for a in &mut captured {
                    frame.resolve(a);
                }
                s.comp = Comp::MakeClosure { code, captured, ev };
            } else {
                if let Comp::App { callee, args } = &s.comp {
                    if let Some(code) = callee.var_id().and_then(|f| self.code_of.get(&f)) {
                        s.comp = Comp::DirectCall { code: *code, callee: *callee, args: args.clone() };
                    }
                }
                for a in s.comp.atoms_mut() {
                    frame.resolve(a);
                }
                match &mut s.comp {
                    Comp::Loop { var, body, .. } => {
                        frame.bind(var);
                        self.block(body, frame);
                    }
                    Comp::Match { arms, .. } => {
                        for arm in arms {
                            for b in arm.binders.iter_mut().flatten() {
                                frame.bind(b);
                            }
                            self.block(&mut arm.body, frame);
                        }
                    }
                    other => {
                        for nested in other.blocks_mut() {
                            self.block(nested, frame);
                        }
                    }
                }
            }
            frame.bind(&mut s.var);
        }
        if let Some(r) = &mut b.ret {
            frame.resolve(r);
        }
    }
}
