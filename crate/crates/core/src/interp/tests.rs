use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::syntax::{parse_source, parse_stmts, tokenize, Literal, Mode, Op};

fn core(src: &str) -> Program {
    parse_source(src, Mode::Core).unwrap()
}

fn ext(src: &str) -> Program {
    parse_source(src, Mode::Extended).unwrap()
}

fn stmt(src: &str) -> Stmt {
    let mut ss = parse_stmts(&tokenize(src).unwrap(), Mode::Extended).unwrap();
    assert_eq!(ss.len(), 1);
    ss.pop().unwrap()
}

fn int(n: i64) -> Value {
    Value::int(n)
}

fn pow2(n: u32) -> BigInt {
    BigInt::from(1) << n
}

/// Bit length by repeated doubling, independent of `BigInt::bits`.
fn bit_length_oracle(x: i64) -> u64 {
    let a = x.unsigned_abs() as u128;
    let mut k = 0;
    while (1u128 << k) <= a {
        k += 1;
    }
    k
}

/// Multiplication by repeated addition.
fn mul_oracle(x: i64, y: i64) -> i64 {
    (0..y).fold(0, |acc, _| acc + x)
}

#[test]
fn defaults_and_literals() {
    assert_eq!(default_value(&TypeAnnot::IInt), Some(int(0)));
    assert_eq!(default_value(&TypeAnnot::Bool), Some(Value::Bool(false)));
    assert_eq!(default_array(&TypeAnnot::Int, 3).unwrap().to_string(), "[0,0,0]");
    assert!(default_value(&TypeAnnot::Arrow(vec![], Box::new(TypeAnnot::Int))).is_none());
    assert_eq!(literal_value(&Literal::Dec("514".into())), int(514));
    assert_eq!(literal_value(&Literal::Bin("11111".into())), int(31));
    assert_eq!(literal_value(&Literal::Bool(true)), Value::Bool(true));
}

#[test]
fn value_sizes() {
    assert_eq!(size_of_value(&int(0)), Some(0));
    assert_eq!(size_of_value(&int(-8)), Some(bit_length_oracle(-8)));
    for n in 0..40 {
        assert_eq!(size_of_value(&Value::Int(pow2(n))), Some(n as u64 + 1));
    }
    assert_eq!(size_of_value(&Value::Bool(true)), Some(1));
    assert_eq!(size_of_value(&Value::str("abc")), Some(3));
    let arr = Value::Array(ArrayRef::new(TypeAnnot::Int, vec![int(1), int(255), int(-3)]));
    assert_eq!(size_of_value(&arr), Some(8));
}

#[test]
fn operators() {
    assert_eq!(apply_op(Op::Div, &[int(7), int(0)]), Some(int(0)));
    assert_eq!(apply_op(Op::Mod, &[int(7), int(0)]), Some(int(0)));
    assert_eq!(apply_op(Op::Size, &[int(514)]), Some(int(bit_length_oracle(514) as i64)));
    assert_eq!(apply_op(Op::Neg, &[int(3)]), Some(int(-3)));
    assert_eq!(apply_op(Op::Sub, &[int(2), int(5)]), Some(int(-3)));
    assert_eq!(apply_op(Op::And, &[Value::Bool(true), Value::Bool(false)]), Some(Value::Bool(false)));
    assert_eq!(apply_op(Op::Div, &[int(-7), int(2)]), Some(int(-3)));
    assert_eq!(apply_op(Op::Mod, &[int(-7), int(2)]), Some(int(-1)));
    assert_eq!(apply_op(Op::Eq, &[Value::str("1"), Value::str("1")]), Some(Value::Bool(true)));
    assert_eq!(apply_op(Op::Add, &[int(1), Value::Bool(true)]), None);
}

#[test]
fn expression_costs() {
    let store: StoreEnv = [("x", int(1))].into_iter().collect();
    let e = Expr::bin(Op::Add, Expr::var("x"), Expr::var("x"));
    assert_eq!(eval_expr(&store, &e, true).unwrap(), (int(2), 3));
    assert_eq!(eval_expr(&store, &e, false).unwrap(), (int(2), 0));
    for n in [0u32, 1, 7, 100] {
        let store: StoreEnv = [("z", Value::Int(pow2(n)))].into_iter().collect();
        let (v, k) = eval_expr(&store, &Expr::size(Expr::var("z")), true).unwrap();
        assert_eq!((v, k), (int(n as i64 + 1), 2));
    }
    assert_eq!(eval_expr(&StoreEnv::new(), &Expr::int(514), true).unwrap(), (int(514), 1));
    let paren = Expr::paren(Expr::var("x"));
    assert_eq!(eval_expr(&store_x(5), &paren, true).unwrap(), (int(5), 2));
}

fn store_x(x: i64) -> StoreEnv {
    [("x", int(x))].into_iter().collect()
}

#[test]
fn doubling_loop_costs_four_n_plus_six() {
    let s = stmt("for(i<size(z)) x=x+x;");
    for n in 1..=16u32 {
        let store: StoreEnv = [("z", Value::Int(pow2(n))), ("x", int(1))].into_iter().collect();
        let (out, k, sig) = exec_stmt(store, &s, true).unwrap();
        assert_eq!(k, 4 * n as u64 + 6, "n={n}");
        assert_eq!(out.get("x"), Some(&Value::Int(pow2(n + 1))));
        assert_eq!(sig, Signal::Normal);
        assert_eq!(out.get("i"), Some(&int(n as i64)), "counter stays bound");
    }
}

#[test]
fn zero_iteration_loop_and_declaration() {
    let s = stmt("for(i<size(z)) x=x+x;");
    let store: StoreEnv = [("z", int(0)), ("x", int(3))].into_iter().collect();
    let (out, k, _) = exec_stmt(store, &s, true).unwrap();
    assert_eq!(k, 2);
    assert_eq!(out.get("x"), Some(&int(3)));
    assert!(!out.contains("i"));

    let (out, k, _) = exec_stmt(StoreEnv::new(), &stmt("iint z;"), true).unwrap();
    assert_eq!(k, 1);
    assert_eq!(out.get("z"), Some(&int(0)));
}

#[test]
fn statement_costs() {
    // Block is 1 plus its body; Cond adds nothing beyond guard and branch.
    let (_, k, _) = exec_stmt(store_x(1), &stmt("{ x=1; }"), true).unwrap();
    assert_eq!(k, 3);
    let (_, k, _) = exec_stmt(store_x(1), &stmt("if(x>0) {} else { x=2; }"), true).unwrap();
    assert_eq!(k, 3 + 1);
    let (out, k, _) = exec_stmt(store_x(1), &stmt("if(x>5) {} else { x=2; }"), true).unwrap();
    assert_eq!(k, 3 + 3);
    assert_eq!(out.get("x"), Some(&int(2)));
}

#[test]
fn fast_multiplication() {
    let p = core(include_str!("../../corpus/fastmul.pc"));
    for (x, y) in [(6, 7), (0, 9), (9, 0), (13, 1), (25, 40)] {
        let r = run_program(&p, &[int(x), int(y)], true).unwrap();
        assert_eq!(r.output, int(mul_oracle(x, y)), "{x}*{y}");
        assert!(r.ic >= 1);
        assert!(r.max_value_size >= size_of_value(&r.output).unwrap());
    }
}

#[test]
fn cost_mode_does_not_change_results() {
    let p = core(include_str!("../../corpus/fastmul.pc"));
    let a = run_program(&p, &[int(123), int(456)], true).unwrap();
    let b = run_program(&p, &[int(123), int(456)], false).unwrap();
    let c = run_program(&p, &[int(123), int(456)], true).unwrap();
    assert_eq!(a.output, b.output);
    assert_eq!(b.ic, 0);
    assert_eq!((a.ic, a.max_value_size, &a.rule_counts), (c.ic, c.max_value_size, &c.rule_counts));
    assert_eq!(a.to_json(), c.to_json());
}

#[test]
fn report_json_shape() {
    let p = core("int main(int x){ return x+1; }");
    let r = run_program(&p, &[int(41)], true).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["output"], "42");
    assert_eq!(v["ic"], 3);
    assert_eq!(v["max_value_size"], 6);
}

#[test]
fn boundary_checks() {
    let p = core("int main(int x){ return x; }");
    assert_eq!(run_program(&p, &[], false).unwrap_err().kind, RuntimeErrorKind::ArityMismatch);
    assert_eq!(run_program(&p, &[Value::Bool(true)], false).unwrap_err().kind, RuntimeErrorKind::TypeMismatch);
}

#[test]
fn fuel_runs_out() {
    let p = core("int main(int x){ iint z; z=x; for(i<size(z)) for(j<size(z)) x=x+1; return x; }");
    let opts = RunOptions { fuel: Some(50), ..Default::default() };
    let err = run_program_with(&p, &[int(1 << 20)], &opts).unwrap_err();
    assert_eq!(err.kind, RuntimeErrorKind::FuelExhausted);
    let opts = RunOptions { fuel: Some(10_000), ..Default::default() };
    assert_eq!(run_program_with(&p, &[int(1 << 20)], &opts).unwrap().output, int((1 << 20) + 441));
}

#[test]
fn loop_invariant_check_flags_iterable_updates() {
    // Ill-typed on purpose: the iterable z changes inside the loop.
    let p = core("int main(int x){ iint z; z=x; for(i<size(z)) z=z+1; return z; }");
    let opts = RunOptions { check_loop_invariant: true, ..Default::default() };
    assert_eq!(run_program_with(&p, &[int(4)], &opts).unwrap_err().kind, RuntimeErrorKind::InvariantViolation);
    let good = core(include_str!("../../corpus/fastmul.pc"));
    assert_eq!(run_program_with(&good, &[int(3), int(5)], &opts).unwrap().output, int(15));
}

#[test]
fn loop_invariant_ignores_names_scoped_to_the_body() {
    let p = core(
        "int main(int x){ iint z; z=x; int s; for(j<2) { } \
         for(i<size(z)) { for(j<size(i)) s=s+1; for(k<3) { int t; t=k; } } return s; }",
    );
    let opts = RunOptions { check_loop_invariant: true, ..Default::default() };
    assert!(crate::typecheck::check_program(&p).is_ok());
    // Inner counters `j` take sizes 0, 1, 2, 2 for i = 0..3.
    assert_eq!(run_program_with(&p, &[int(15)], &opts).unwrap().output, int(5));
}

#[test]
fn arrays_alias_through_calls() {
    let p = ext("void set(array<int> a, int v){ a[0]=v; } int main(int x){ array<int> b=array(2); set(b, x); return b[0]+b[1]; }");
    assert_eq!(run_program(&p, &[int(9)], false).unwrap().output, int(9));
}

#[test]
fn closures_capture_the_definition_store() {
    let p = ext("int main(int x){ int a; a=1; int f(int k){ return k+a; } a=100; return f(x); }");
    assert_eq!(run_program(&p, &[int(5)], false).unwrap().output, int(6));
}

#[test]
fn scalars_pass_by_value() {
    let p = ext("void bump(int a){ a=a+1; } int main(int x){ bump(x); return x; }");
    assert_eq!(run_program(&p, &[int(5)], false).unwrap().output, int(5));
}

#[test]
fn break_and_continue() {
    let p = ext("int main(iint n){ int s; for(i<size(n)){ if(i==2) continue; if(i==5) break; s+=i; } return s; }");
    assert_eq!(run_program(&p, &[int(255)], false).unwrap().output, int(1 + 3 + 4));
}

#[test]
fn strings_index_to_one_character_strings() {
    let p = ext(r#"bool main(istring s){ return s[1]=="1"; }"#);
    assert_eq!(run_program(&p, &[Value::str("010")], false).unwrap().output, Value::Bool(true));
    assert_eq!(run_program(&p, &[Value::str("000")], false).unwrap().output, Value::Bool(false));
    let err = run_program(&p, &[Value::str("0")], false).unwrap_err();
    assert_eq!(err.kind, RuntimeErrorKind::IndexOutOfRange);
}

#[test]
fn nested_arrays() {
    let p = ext("int main(iint n){ array<array<int>> m=array(2); for(i<2) m[i]=array(3); m[1][2]=n; m[0][0]=1; return m[1][2]+m[0][0]+m[1][0]; }");
    assert_eq!(run_program(&p, &[int(40)], false).unwrap().output, int(41));
}

#[test]
fn builtins() {
    let p = ext("int main(int x, int y){ return min(x,y)*2+max(x,y); }");
    assert_eq!(run_program(&p, &[int(3), int(10)], false).unwrap().output, int(16));
}

#[test]
fn max_value_size_tracks_the_store() {
    let p = core("int main(int x){ int y; y=x+x; y=0; return y; }");
    let r = run_program(&p, &[int(255)], true).unwrap();
    assert_eq!(r.max_value_size, 9);
    let p = core("int main(int x){ return (x+x)-x; }");
    let r = run_program(&p, &[int(255)], true).unwrap();
    assert_eq!(r.max_value_size, 8);
    assert_eq!(r.max_intermediate_size, 9);
}

fn arb_int() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        any::<i64>().prop_map(BigInt::from),
        (any::<i64>(), 0u32..200).prop_map(|(a, s)| BigInt::from(a) << s),
    ]
}

proptest! {
    /// |op(ṽ)| ≤ max |vᵢ| + 1 for arithmetic; comparisons have size 1;
    /// size(size(v)) ≤ size(v).
    #[test]
    fn operator_size_bound(a in arb_int(), b in arb_int()) {
        let (va, vb) = (Value::Int(a), Value::Int(b));
        let m = size_of_value(&va).unwrap().max(size_of_value(&vb).unwrap());
        for op in [Op::Add, Op::Sub, Op::Div, Op::Mod] {
            let r = apply_op(op, &[va.clone(), vb.clone()]).unwrap();
            prop_assert!(size_of_value(&r).unwrap() <= m + 1, "{:?}", op);
        }
        let neg = apply_op(Op::Neg, std::slice::from_ref(&va)).unwrap();
        prop_assert_eq!(size_of_value(&neg), size_of_value(&va));
        for op in [Op::Ge, Op::Le, Op::Gt, Op::Lt, Op::Eq, Op::Ne] {
            let r = apply_op(op, &[va.clone(), vb.clone()]).unwrap();
            prop_assert_eq!(size_of_value(&r), Some(1));
        }
        let s = apply_op(Op::Size, std::slice::from_ref(&va)).unwrap();
        let ss = apply_op(Op::Size, std::slice::from_ref(&s)).unwrap();
        prop_assert!(size_of_value(&ss).unwrap() <= size_of_value(&va).unwrap());
    }

    #[test]
    fn division_truncates_toward_zero(a in any::<i32>(), b in any::<i32>()) {
        let q = apply_op(Op::Div, &[int(a as i64), int(b as i64)]).unwrap();
        let r = apply_op(Op::Mod, &[int(a as i64), int(b as i64)]).unwrap();
        let (eq, er) = if b == 0 { (0, 0) } else { ((a as i64) / (b as i64), (a as i64) % (b as i64)) };
        prop_assert_eq!(q, int(eq));
        prop_assert_eq!(r, int(er));
    }
}
