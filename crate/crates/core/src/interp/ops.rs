use num_bigint::BigInt;
use num_traits::Zero;

use super::value::{size_of_value, Value};
use crate::syntax::Op;

/// `⟦op⟧`: total functions on values. `/` and `%` truncate toward zero and
/// yield 0 on a zero divisor. Returns `None` only for operands outside every
/// accepted signature, which well-typed programs never produce.
pub fn apply_op(op: Op, args: &[Value]) -> Option<Value> {
    use Value::*;
    Some(match (op, args) {
        (Op::Add, [Int(a), Int(b)]) => Int(a + b),
        (Op::Add, [Str(a), Str(b)]) => Value::str(&format!("{a}{b}")),
        (Op::Sub, [Int(a), Int(b)]) => Int(a - b),
        (Op::Div, [Int(a), Int(b)]) => Int(if b.is_zero() { BigInt::zero() } else { a / b }),
        (Op::Mod, [Int(a), Int(b)]) => Int(if b.is_zero() { BigInt::zero() } else { a % b }),
        (Op::Neg, [Int(a)]) => Int(-a),
        (Op::Size, [v @ (Int(_) | Str(_))]) => Int(BigInt::from(size_of_value(v)?)),
        (Op::Ge, [Int(a), Int(b)]) => Bool(a >= b),
        (Op::Le, [Int(a), Int(b)]) => Bool(a <= b),
        (Op::Gt, [Int(a), Int(b)]) => Bool(a > b),
        (Op::Lt, [Int(a), Int(b)]) => Bool(a < b),
        (Op::Eq, [a, b]) if same_scalar_kind(a, b) => Bool(a == b),
        (Op::Ne, [a, b]) if same_scalar_kind(a, b) => Bool(a != b),
        (Op::Not, [Bool(a)]) => Bool(!a),
        (Op::And, [Bool(a), Bool(b)]) => Bool(*a && *b),
        (Op::Or, [Bool(a), Bool(b)]) => Bool(*a || *b),
        (Op::Mul, [Int(a), Int(b)]) => Int(a * b),
        _ => return None,
    })
}

fn same_scalar_kind(a: &Value, b: &Value) -> bool {
    matches!((a, b), (Value::Int(_), Value::Int(_)) | (Value::Bool(_), Value::Bool(_)) | (Value::Str(_), Value::Str(_)))
}

/// Builtin `min`/`max` over integers.
pub(crate) fn apply_builtin(name: &str, args: &[Value]) -> Option<Value> {
    match (name, args) {
        ("min", [Value::Int(a), Value::Int(b)]) => Some(Value::Int(a.min(b).clone())),
        ("max", [Value::Int(a), Value::Int(b)]) => Some(Value::Int(a.max(b).clone())),
        _ => None,
    }
}
