use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::syntax::{FunDef, Literal, TypeAnnot};

/// A runtime value. Integers are unbounded; arrays are shared references.
#[derive(Debug, Clone)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Array(ArrayRef),
    Str(Rc<str>),
    Closure(Rc<Closure>),
}

/// An array value. Cloning the reference aliases the same storage.
#[derive(Debug, Clone)]
pub struct ArrayRef {
    pub elems: Rc<RefCell<Vec<Value>>>,
    /// Declared element type, used to build `array(n)` defaults.
    pub elem: TypeAnnot,
}

impl ArrayRef {
    pub fn new(elem: TypeAnnot, elems: Vec<Value>) -> Self {
        ArrayRef { elems: Rc::new(RefCell::new(elems)), elem }
    }

    pub fn len(&self) -> usize {
        self.elems.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `(Σ, x̃, s̃, e)`: a function together with its definition-time store.
#[derive(Debug)]
pub struct Closure {
    pub store: StoreEnv,
    pub def: FunDef,
    /// Names that are iterable in the captured store.
    pub iterable: Vec<String>,
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Self {
        Value::Int(n.into())
    }

    pub fn str(s: &str) -> Self {
        Value::Str(Rc::from(s))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Array(_) => "array",
            Value::Str(_) => "string",
            Value::Closure(_) => "function",
        }
    }

    /// Whether the value may inhabit a variable of type `t`.
    pub fn conforms(&self, t: &TypeAnnot) -> bool {
        match (self, t) {
            (Value::Int(_), TypeAnnot::Int | TypeAnnot::IInt) => true,
            (Value::Bool(_), TypeAnnot::Bool) => true,
            (Value::Str(_), TypeAnnot::Str | TypeAnnot::IStr) => true,
            (Value::Array(a), TypeAnnot::Array(e)) => {
                a.elem == **e && a.elems.borrow().iter().all(|v| v.conforms(e))
            }
            (Value::Closure(_), TypeAnnot::Arrow(..)) => true,
            _ => false,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Array(a), Value::Array(b)) => {
                Rc::ptr_eq(&a.elems, &b.elems) || *a.elems.borrow() == *b.elems.borrow()
            }
            (Value::Closure(a), Value::Closure(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Array(a) => {
                f.write_str("[")?;
                for (i, v) in a.elems.borrow().iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Closure(c) => write!(f, "<function {}>", c.def.name),
        }
    }
}

/// `Σ`: the runtime binding map. Bindings are never removed.
#[derive(Debug, Clone, Default)]
pub struct StoreEnv {
    bindings: HashMap<String, Value>,
}

impl StoreEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        self.bindings.get(x)
    }

    /// `Σ[x ↦ v]`.
    pub fn set(&mut self, x: &str, v: Value) {
        match self.bindings.get_mut(x) {
            Some(slot) => *slot = v,
            None => {
                self.bindings.insert(x.to_string(), v);
            }
        }
    }

    pub fn contains(&self, x: &str) -> bool {
        self.bindings.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl<'a> FromIterator<(&'a str, Value)> for StoreEnv {
    fn from_iter<I: IntoIterator<Item = (&'a str, Value)>>(iter: I) -> Self {
        StoreEnv { bindings: iter.into_iter().map(|(x, v)| (x.to_string(), v)).collect() }
    }
}

/// Initial value of a freshly declared variable: 0, `#f`, the empty string,
/// or an empty array (sized later by `array(n)`).
pub fn default_value(t: &TypeAnnot) -> Option<Value> {
    match t {
        TypeAnnot::IInt | TypeAnnot::Int => Some(Value::Int(BigInt::zero())),
        TypeAnnot::Bool => Some(Value::Bool(false)),
        TypeAnnot::Str | TypeAnnot::IStr => Some(Value::str("")),
        TypeAnnot::Array(e) => Some(Value::Array(ArrayRef::new((**e).clone(), Vec::new()))),
        TypeAnnot::Arrow(..) | TypeAnnot::Void => None,
    }
}

/// `n` default elements of type `elem`, as produced by `array(n)`.
pub fn default_array(elem: &TypeAnnot, n: usize) -> Option<Value> {
    let fill = default_value(elem)?;
    let elems = (0..n)
        .map(|_| match &fill {
            // nested arrays must not share storage
            Value::Array(a) => Value::Array(ArrayRef::new(a.elem.clone(), Vec::new())),
            v => v.clone(),
        })
        .collect();
    Some(Value::Array(ArrayRef::new(elem.clone(), elems)))
}

/// `⟦c⟧₀`.
pub fn literal_value(c: &Literal) -> Value {
    match c {
        Literal::Dec(d) => Value::Int(BigInt::parse_bytes(d.as_bytes(), 10).expect("lexer guarantees digits")),
        Literal::Bin(b) => Value::Int(BigInt::parse_bytes(b.as_bytes(), 2).expect("lexer guarantees bits")),
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Str(s) => Value::str(s),
    }
}

/// `|v|`: bit length of `|x|` for integers, 1 for booleans, the longest element
/// for arrays, the character count for strings. Functions have no size.
pub fn size_of_value(v: &Value) -> Option<u64> {
    match v {
        Value::Int(n) => Some(n.abs().bits()),
        Value::Bool(_) => Some(1),
        Value::Array(a) => {
            let elems = a.elems.borrow();
            let mut m = 0;
            for e in elems.iter() {
                m = m.max(size_of_value(e)?);
            }
            Some(m)
        }
        Value::Str(s) => Some(s.chars().count() as u64),
        Value::Closure(_) => None,
    }
}

pub(crate) fn to_index(n: &BigInt) -> Option<usize> {
    if n.is_negative() {
        None
    } else {
        n.to_usize()
    }
}
