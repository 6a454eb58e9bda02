//! Evidence for consistency judgments.
//!
//! For simple types a consistency judgment is justified by a single gradual
//! type, and consistent transitivity is the precision meet. The rest of the
//! pipeline only goes through this module, so the payload can change
//! without touching the passes that move evidence around.

use std::fmt;

use crate::types::{meet, precision_le, Type};

/// Root-level representation of a float-carrying position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FloatRep {
    Immediate,
    Boxed,
}

/// What a representation-aware composition must do to the value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepAction {
    None,
    BoxFloat,
    UnboxFloat,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Evidence {
    ty: Type,
    rep: Option<FloatRep>,
}

impl Evidence {
    pub fn new(ty: Type) -> Self {
        Evidence { ty, rep: None }
    }

    /// Evidence tagged with the representation of the position it sits on.
    pub fn with_rep(ty: Type, rep: FloatRep) -> Self {
        Evidence { ty, rep: Some(rep) }
    }

    pub fn unknown() -> Self {
        Evidence::new(Type::Dyn)
    }

    pub fn ty(&self) -> &Type {
        &self.ty
    }

    pub fn into_type(self) -> Type {
        self.ty
    }

    pub fn rep(&self) -> Option<FloatRep> {
        self.rep
    }

    /// True when the payload mentions no `?`.
    pub fn is_fully_precise(&self) -> bool {
        self.ty.is_static()
    }

    /// Evidence on the `i`-th parameter position of a function evidence.
    pub fn dom(&self, i: usize) -> Option<Evidence> {
        match &self.ty {
            Type::Fun(ps, _) => ps.get(i).cloned().map(Evidence::new),
            _ => None,
        }
    }

    /// Evidence on the return position of a function evidence.
    pub fn cod(&self) -> Option<Evidence> {
        match &self.ty {
            Type::Fun(_, r) => Some(Evidence::new((**r).clone())),
            _ => None,
        }
    }

    /// Evidence on the element or component position of a structure.
    pub fn content(&self, kind: ContentKind) -> Option<Evidence> {
        match (kind, &self.ty) {
            (ContentKind::Ref, Type::Ref(t)) | (ContentKind::Vec, Type::Vec(t)) => {
                Some(Evidence::new((**t).clone()))
            }
            (ContentKind::TupleProj(i), Type::Tuple(ts)) => ts.get(i).cloned().map(Evidence::new),
            _ => None,
        }
    }

    /// `self ⊑ other` on payloads.
    pub fn refines(&self, other: &Evidence) -> bool {
        precision_le(&self.ty, &other.ty)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContentKind {
    Ref,
    Vec,
    TupleProj(usize),
}

/// Most precise evidence for `a ~ b`; `None` when the types are inconsistent.
pub fn initial_evidence(a: &Type, b: &Type) -> Option<Evidence> {
    meet(a, b).map(Evidence::new)
}

/// Consistent transitivity `e1 ∘ e2`.
pub fn trans(e1: &Evidence, e2: &Evidence) -> Option<Evidence> {
    if e1.ty == e2.ty {
        return Some(Evidence::new(e1.ty.clone()));
    }
    meet(&e1.ty, &e2.ty).map(Evidence::new)
}

/// Consistent transitivity that also reports the float representation
/// change between the two positions. The result carries the representation
/// of `e2`, the destination.
pub fn dfo_trans(e1: &Evidence, e2: &Evidence) -> Option<(Evidence, RepAction)> {
    let ty = meet(&e1.ty, &e2.ty)?;
    let action = match (e1.rep, e2.rep) {
        (Some(FloatRep::Immediate), Some(FloatRep::Boxed)) => RepAction::BoxFloat,
        (Some(FloatRep::Boxed), Some(FloatRep::Immediate)) => RepAction::UnboxFloat,
        _ => RepAction::None,
    };
    let rep = e2.rep.or(e1.rep);
    Some((Evidence { ty, rep }, action))
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.ty)
    }
}

impl fmt::Debug for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rep {
            None => write!(f, "<{}>", self.ty),
            Some(FloatRep::Immediate) => write!(f, "<{}:imm>", self.ty),
            Some(FloatRep::Boxed) => write!(f, "<{}:boxed>", self.ty),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Type::*;

    fn ev(t: Type) -> Evidence {
        Evidence::new(t)
    }

    #[test]
    fn initial_evidence_examples() {
        assert_eq!(initial_evidence(&Dyn, &Int), Some(ev(Int)));
        assert_eq!(initial_evidence(&Bool, &Dyn), Some(ev(Bool)));
        assert_eq!(initial_evidence(&Int, &Bool), None);
    }

    #[test]
    fn trans_examples() {
        assert_eq!(trans(&ev(Bool), &ev(Dyn)), Some(ev(Bool)));
        assert_eq!(trans(&ev(Bool), &ev(Int)), None);
        let g = Type::fun(vec![Dyn], Type::reference(Int));
        assert_eq!(trans(&ev(g.clone()), &ev(Dyn)), Some(ev(g)));
    }

    #[test]
    fn projections() {
        let dyn_int = ev(Type::fun(vec![Dyn], Int));
        assert_eq!(dyn_int.dom(0), Some(ev(Dyn)));
        assert_eq!(ev(Type::fun(vec![Int], Int)).dom(0), Some(ev(Int)));
        assert_eq!(ev(Type::fun(vec![Bool, Dyn], Unit)).dom(1), Some(ev(Dyn)));
        assert_eq!(dyn_int.cod(), Some(ev(Int)));
        assert_eq!(ev(Type::fun(vec![Dyn], Dyn)).cod(), Some(ev(Dyn)));
        assert_eq!(ev(Type::fun(vec![Int], Bool)).cod(), Some(ev(Bool)));
        assert_eq!(ev(Int).dom(0), None);

        assert_eq!(ev(Type::reference(Int)).content(ContentKind::Ref), Some(ev(Int)));
        assert_eq!(ev(Type::vector(Dyn)).content(ContentKind::Vec), Some(ev(Dyn)));
        assert_eq!(
            ev(Type::tuple(vec![Int, Bool])).content(ContentKind::TupleProj(1)),
            Some(ev(Bool))
        );
        assert_eq!(ev(Type::vector(Dyn)).content(ContentKind::Ref), None);
    }

    #[test]
    fn precision_checks() {
        assert!(ev(Int).is_fully_precise());
        assert!(!ev(Type::fun(vec![Int], Dyn)).is_fully_precise());
        assert!(ev(Type::reference(Type::tuple(vec![Int, Bool]))).is_fully_precise());
    }

    #[test]
    fn dfo_actions() {
        let imm = Evidence::with_rep(Float, FloatRep::Immediate);
        let boxed_dyn = Evidence::with_rep(Dyn, FloatRep::Boxed);
        assert_eq!(
            dfo_trans(&imm, &boxed_dyn).map(|(e, a)| (e.into_type(), a)),
            Some((Float, RepAction::BoxFloat))
        );
        let boxed = Evidence::with_rep(Float, FloatRep::Boxed);
        assert_eq!(
            dfo_trans(&boxed, &imm).map(|(e, a)| (e.into_type(), a)),
            Some((Float, RepAction::UnboxFloat))
        );
        assert_eq!(
            dfo_trans(&ev(Int), &ev(Int)).map(|(e, a)| (e.into_type(), a)),
            Some((Int, RepAction::None))
        );
        assert!(dfo_trans(&imm, &ev(Int)).is_none());
    }

    #[test]
    fn debug_format() {
        assert_eq!(ev(Type::fun(vec![Dyn], Int)).to_string(), "<?->int>");
        assert_eq!(format!("{:?}", Evidence::with_rep(Float, FloatRep::Immediate)), "<float:imm>");
    }
}
