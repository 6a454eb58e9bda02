use std::cell::{OnceCell, RefCell};
use std::fmt;
use std::rc::Rc;

use crate::surface::Ident;
use crate::types::Type;

/// A runtime value. Immediates carry their type as implicit evidence; every
/// heap object stores its evidence in its first field.
#[derive(Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Unit,
    /// Unboxed float, only in float-typed positions when DFO is on.
    Float(f64),
    Obj(Rc<Obj>),
}

pub struct Obj {
    pub ev: RefCell<Type>,
    pub body: Body,
}

/// Object payloads. Guarded proxies are distinct objects whose body holds
/// the same shared handle as the original; monotonic objects are never
/// copied, so for them the handle is unique.
pub enum Body {
    Float(f64),
    Ref(Rc<RefCell<Value>>),
    Vec(Rc<RefCell<Vec<Value>>>),
    Tuple(Rc<[Value]>),
    Variant(Rc<VariantVal>),
    Closure(Rc<Closure>),
}

pub struct VariantVal {
    pub ctor: Ident,
    pub tag: u32,
    pub fields: Vec<Value>,
}

pub struct Closure {
    pub code: u32,
    pub env: Vec<Value>,
    /// The closure itself, for `let rec`.
    pub rec: OnceCell<Value>,
}

impl Body {
    /// Another body sharing the same underlying storage.
    pub fn share(&self) -> Body {
        match self {
            Body::Float(x) => Body::Float(*x),
            Body::Ref(c) => Body::Ref(c.clone()),
            Body::Vec(v) => Body::Vec(v.clone()),
            Body::Tuple(t) => Body::Tuple(t.clone()),
            Body::Variant(v) => Body::Variant(v.clone()),
            Body::Closure(c) => Body::Closure(c.clone()),
        }
    }

    /// Structures and closures: the objects whose evidence may be refined.
    pub fn is_mutable_ev(&self) -> bool {
        !matches!(self, Body::Float(_) | Body::Variant(_))
    }
}

impl Value {
    pub fn obj(ev: Type, body: Body) -> Value {
        Value::Obj(Rc::new(Obj { ev: RefCell::new(ev), body }))
    }

    /// Current evidence, implicit for immediates.
    pub fn evidence(&self) -> Type {
        match self {
            Value::Int(_) => Type::Int,
            Value::Bool(_) => Type::Bool,
            Value::Unit => Type::Unit,
            Value::Float(_) => Type::Float,
            Value::Obj(o) => o.ev.borrow().clone(),
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Obj(o) => match o.body {
                Body::Float(x) => Some(x),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_boxed_float(&self) -> bool {
        matches!(self, Value::Obj(o) if matches!(o.body, Body::Float(_)))
    }

    /// Two handles to the same object (or proxies of the same storage).
    pub fn same_storage(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Obj(a), Value::Obj(b)) => match (&a.body, &b.body) {
                (Body::Ref(x), Body::Ref(y)) => Rc::ptr_eq(x, y),
                (Body::Vec(x), Body::Vec(y)) => Rc::ptr_eq(x, y),
                (Body::Tuple(x), Body::Tuple(y)) => Rc::ptr_eq(x, y),
                (Body::Closure(x), Body::Closure(y)) => Rc::ptr_eq(x, y),
                (Body::Variant(x), Body::Variant(y)) => Rc::ptr_eq(x, y),
                _ => Rc::ptr_eq(a, b),
            },
            _ => false,
        }
    }
}

fn float_text(x: f64) -> String {
    format!("{x:?}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Unit => f.write_str("()"),
            Value::Float(x) => f.write_str(&float_text(*x)),
            Value::Obj(o) => match &o.body {
                Body::Float(x) => f.write_str(&float_text(*x)),
                Body::Ref(_) => f.write_str("<ref>"),
                Body::Vec(_) => f.write_str("<vector>"),
                Body::Closure(_) => f.write_str("<fun>"),
                Body::Tuple(items) => {
                    f.write_str("(")?;
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{v}")?;
                    }
                    f.write_str(")")
                }
                Body::Variant(v) => {
                    f.write_str(&v.ctor)?;
                    if !v.fields.is_empty() {
                        f.write_str(" (")?;
                        for (i, x) in v.fields.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{x}")?;
                        }
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            },
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Obj(o) => write!(f, "<{}>{self}", o.ev.borrow()),
            _ => write!(f, "{self}"),
        }
    }
}
