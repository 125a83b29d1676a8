use crate::syntax::{Literal, Op, TypeAnnot};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error("'{op}' expects {expected} operand(s), got {got}")]
    Arity { op: &'static str, expected: usize, got: usize },
    #[error("size requires an iterable operand (iint or istring), found {0}")]
    NonIterableSize(TypeAnnot),
    #[error("general string concatenation prohibited: the right operand of '+' must be istring")]
    StringConcat,
    #[error("general multiplication prohibited: '*' needs an integer-literal factor")]
    Multiplication,
    #[error("'{op}' is not defined on ({args})")]
    Domain { op: &'static str, args: String },
}

/// `{|c|}₀`: numerals are iterable integers, booleans are `bool`, string
/// literals are iterable strings.
pub fn const_type(c: &Literal) -> TypeAnnot {
    match c {
        Literal::Dec(_) | Literal::Bin(_) => TypeAnnot::IInt,
        Literal::Bool(_) => TypeAnnot::Bool,
        Literal::Str(_) => TypeAnnot::IStr,
    }
}

/// `⋁ tᵢ` under `iint ⪯ int`: `iint` exactly when every operand is `iint`.
pub fn sup_type(ts: &[TypeAnnot]) -> Result<TypeAnnot, OpError> {
    if let Some(bad) = ts.iter().find(|t| !t.is_int()) {
        return Err(OpError::Domain { op: "sup", args: bad.to_string() });
    }
    Ok(if ts.iter().all(|t| *t == TypeAnnot::IInt) { TypeAnnot::IInt } else { TypeAnnot::Int })
}

/// `t₁ ~_T t₂`: same block of the partition {Int, Bool} (strings form their own block).
pub fn type_equiv(a: &TypeAnnot, b: &TypeAnnot) -> bool {
    (a.is_int() && b.is_int())
        || (*a == TypeAnnot::Bool && *b == TypeAnnot::Bool)
        || (a.is_stringy() && b.is_stringy())
        || a == b
}

/// `a ⪯ b`: reflexive, plus `iint ⪯ int` and `istring ⪯ string`.
pub fn sub_type(a: &TypeAnnot, b: &TypeAnnot) -> bool {
    a == b || matches!((a, b), (TypeAnnot::IInt, TypeAnnot::Int) | (TypeAnnot::IStr, TypeAnnot::Str))
}

/// `Asg(ℓ, t) = ¬(ℓ ∧ t iterable)`.
pub fn asg_predicate(l: bool, t: &TypeAnnot) -> bool {
    !(l && t.is_iterable())
}

fn domain(op: Op, ts: &[TypeAnnot]) -> OpError {
    OpError::Domain { op: op.symbol(), args: ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ") }
}

/// `{|op|}_m`: result type of `op` applied to operands of types `ts`.
pub fn op_signature(op: Op, ts: &[TypeAnnot]) -> Result<TypeAnnot, OpError> {
    if ts.len() != op.arity() {
        return Err(OpError::Arity { op: op.symbol(), expected: op.arity(), got: ts.len() });
    }
    match op {
        Op::Not | Op::And | Op::Or => {
            if ts.iter().all(|t| *t == TypeAnnot::Bool) {
                Ok(TypeAnnot::Bool)
            } else {
                Err(domain(op, ts))
            }
        }
        Op::Eq | Op::Ne
            if ts.iter().all(|t| *t == TypeAnnot::Bool) || ts.iter().all(TypeAnnot::is_stringy) =>
        {
            Ok(TypeAnnot::Bool)
        }
        Op::Ge | Op::Le | Op::Gt | Op::Lt | Op::Eq | Op::Ne => {
            if ts.iter().all(TypeAnnot::is_int) {
                Ok(TypeAnnot::Bool)
            } else {
                Err(domain(op, ts))
            }
        }
        Op::Add if ts[0].is_stringy() || ts[1].is_stringy() => {
            if ts[0].is_stringy() && ts[1] == TypeAnnot::IStr {
                Ok(TypeAnnot::Str)
            } else if ts[0].is_stringy() && ts[1] == TypeAnnot::Str {
                Err(OpError::StringConcat)
            } else {
                Err(domain(op, ts))
            }
        }
        Op::Add | Op::Sub | Op::Div | Op::Mod | Op::Neg => sup_type(ts).map_err(|_| domain(op, ts)),
        Op::Size => match &ts[0] {
            TypeAnnot::IInt | TypeAnnot::IStr => Ok(TypeAnnot::IInt),
            other => Err(OpError::NonIterableSize(other.clone())),
        },
        Op::Mul => Err(OpError::Multiplication),
    }
}
