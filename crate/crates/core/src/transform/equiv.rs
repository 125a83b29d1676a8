use num_bigint::BigInt;

use crate::interp::{run_program, Value};
use crate::syntax::{Program, TypeAnnot};

use super::TransformError;

/// Outcome of a bounded equivalence check.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivResult {
    pub equivalent: bool,
    /// First input tuple on which the programs differ.
    pub witness: Option<Vec<Value>>,
    /// Number of input tuples compared.
    pub checked: u64,
}

/// Candidate values for one parameter, smallest magnitude first:
/// `0, 1, −1, 2, −2, …` up to `bound`, or both booleans.
fn domain(t: &TypeAnnot, bound: u64) -> Result<Vec<Value>, TransformError> {
    match t {
        TypeAnnot::Int | TypeAnnot::IInt => {
            let mut v = vec![Value::int(0)];
            for k in 1..=bound {
                v.push(Value::Int(BigInt::from(k)));
                v.push(Value::Int(-BigInt::from(k)));
            }
            Ok(v)
        }
        TypeAnnot::Bool => Ok(vec![Value::Bool(false), Value::Bool(true)]),
        other => Err(TransformError::Unsupported(format!("cannot enumerate {other} inputs"))),
    }
}

/// Compares `p1` and `p2` on every input tuple with each integer in
/// `[−bound, bound]`. A run that fails counts as a distinct outcome.
pub fn bounded_equiv(p1: &Program, p2: &Program, bound: u64) -> Result<EquivResult, TransformError> {
    if p1.arity() != p2.arity() {
        return Err(TransformError::ArityMismatch(p1.arity(), p2.arity()));
    }
    let domains = p1.params.iter().map(|q| domain(&q.ty, bound)).collect::<Result<Vec<_>, _>>()?;
    let mut idx = vec![0usize; domains.len()];
    let mut checked = 0;
    loop {
        let args: Vec<Value> = idx.iter().zip(&domains).map(|(&i, d)| d[i].clone()).collect();
        checked += 1;
        let a = run_program(p1, &args, false).map(|r| r.output).map_err(|e| e.kind);
        let b = run_program(p2, &args, false).map(|r| r.output).map_err(|e| e.kind);
        if a != b {
            return Ok(EquivResult { equivalent: false, witness: Some(args), checked });
        }
        // Odometer step, first parameter fastest.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(EquivResult { equivalent: true, witness: None, checked });
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
