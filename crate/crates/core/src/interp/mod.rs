//! Big-step evaluation with cost accounting.
//!
//! Every run counts instructions with the cost semantics (a variable or
//! constant costs 1, an operator application 1 plus its operands, an
//! assignment 1 plus its right-hand side, a declaration 1, a block 1 plus its
//! body; sequencing, conditionals and loops add nothing of their own) and
//! tracks the largest value held in the store.

mod ops;
mod value;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::syntax::{Expr, ExprKind, FunDef, LValue, Pos, Program, Stmt, StmtKind, TypeAnnot};

pub use ops::apply_op;
pub use value::{default_array, default_value, literal_value, size_of_value, ArrayRef, Closure, StoreEnv, Value};

/// Environment variable capping the instruction count of a run.
pub const FUEL_ENV: &str = "POLYC_FUEL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuntimeErrorKind {
    FuelExhausted,
    IndexOutOfRange,
    UnboundVariable,
    TypeMismatch,
    ArityMismatch,
    InvariantViolation,
}

impl RuntimeErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuntimeErrorKind::FuelExhausted => "fuel-exhausted",
            RuntimeErrorKind::IndexOutOfRange => "index-out-of-range",
            RuntimeErrorKind::UnboundVariable => "unbound-variable",
            RuntimeErrorKind::TypeMismatch => "type-mismatch",
            RuntimeErrorKind::ArityMismatch => "arity-mismatch",
            RuntimeErrorKind::InvariantViolation => "invariant-violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {}: {message}", kind.as_str())]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl RuntimeError {
    fn new(kind: RuntimeErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        RuntimeError { kind, pos, message: message.into() }
    }
}

/// Evaluation rules whose executions are counted individually.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    Var,
    Const,
    Paren,
    Op,
    Decl,
    Asgmt,
    Block,
    /// A block with no statements (also counted under `Block`).
    EmptyBlock,
    Cond,
    Loop,
    Call,
    Index,
    Break,
    Continue,
    Fun,
    ArrayNew,
}

const RULES: [Rule; 16] = [
    Rule::Var,
    Rule::Const,
    Rule::Paren,
    Rule::Op,
    Rule::Decl,
    Rule::Asgmt,
    Rule::Block,
    Rule::EmptyBlock,
    Rule::Cond,
    Rule::Loop,
    Rule::Call,
    Rule::Index,
    Rule::Break,
    Rule::Continue,
    Rule::Fun,
    Rule::ArrayNew,
];

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Report `ic` and the per-rule counts (they are zero otherwise).
    pub cost_mode: bool,
    /// Abort once the instruction count exceeds this many steps.
    pub fuel: Option<u64>,
    /// After every loop-body execution, check that iterable variables kept
    /// their values.
    pub check_loop_invariant: bool,
}

impl RunOptions {
    pub fn cost() -> Self {
        RunOptions { cost_mode: true, ..Default::default() }
    }

    /// Fuel from `POLYC_FUEL` when set to a number.
    pub fn fuel_from_env() -> Option<u64> {
        std::env::var(FUEL_ENV).ok().and_then(|s| s.trim().parse().ok())
    }
}

/// Result of running a program.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    #[serde(serialize_with = "serialize_display")]
    pub output: Value,
    /// Instruction count `ic(p, ṽ)`.
    pub ic: u64,
    /// Largest `|v|` over the inputs, every value bound in the store during
    /// the run, and the output.
    pub max_value_size: u64,
    /// Largest `|v|` over every value any expression evaluated to.
    #[serde(skip)]
    pub max_intermediate_size: u64,
    /// Largest `|v|` over the integers written by declarations and
    /// assignments (parameters and loop counters excluded).
    #[serde(skip)]
    pub max_assigned_int_size: u64,
    #[serde(skip)]
    pub rule_counts: BTreeMap<Rule, u64>,
    /// Store at the end of the body, before the return expression.
    #[serde(skip)]
    pub final_store: StoreEnv,
}

fn serialize_display<S: serde::Serializer>(v: &Value, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CostReport {
    pub fn count(&self, rule: Rule) -> u64 {
        self.rule_counts.get(&rule).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "output: {}\nic: {}\nmax_value_size: {}", self.output, self.ic, self.max_value_size)
    }
}

/// How a statement finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    Normal,
    Break,
    Continue,
}

/// `⟦p⟧(ṽ)`, with the cost report filled in when `cost_mode` is set.
pub fn run_program(p: &Program, args: &[Value], cost_mode: bool) -> Result<CostReport, RuntimeError> {
    run_program_with(p, args, &RunOptions { cost_mode, ..Default::default() })
}

pub fn run_program_with(p: &Program, args: &[Value], opts: &RunOptions) -> Result<CostReport, RuntimeError> {
    let pos = p.ret_expr.pos;
    if args.len() != p.params.len() {
        return Err(RuntimeError::new(
            RuntimeErrorKind::ArityMismatch,
            pos,
            format!("main takes {} argument(s) but {} were supplied", p.params.len(), args.len()),
        ));
    }
    let mut m = Machine::new(opts);
    for (prm, v) in p.params.iter().zip(args) {
        if !v.conforms(&prm.ty) {
            return Err(RuntimeError::new(
                RuntimeErrorKind::TypeMismatch,
                pos,
                format!("argument '{}' expects {} but got {} {v}", prm.name, prm.ty, v.kind()),
            ));
        }
        m.bind_declared(&prm.name, &prm.ty, v.clone());
    }
    m.seq(&p.body)?;
    let output = m.expr(&p.ret_expr)?;
    m.observe_store(&output);
    Ok(m.finish(output))
}

/// Evaluates `e` in `store`. Returns the value and the step count (0 unless `cost_mode`).
pub fn eval_expr(store: &StoreEnv, e: &Expr, cost_mode: bool) -> Result<(Value, u64), RuntimeError> {
    let opts = RunOptions { cost_mode, ..Default::default() };
    let mut m = Machine::new(&opts);
    m.store = store.clone();
    let v = m.expr(e)?;
    Ok((v, if cost_mode { m.ic } else { 0 }))
}

/// Executes `s` from `store`. Returns the new store, the step count (0 unless
/// `cost_mode`) and the loop signal the statement ended with.
pub fn exec_stmt(store: StoreEnv, s: &Stmt, cost_mode: bool) -> Result<(StoreEnv, u64, Signal), RuntimeError> {
    let opts = RunOptions { cost_mode, ..Default::default() };
    let mut m = Machine::new(&opts);
    m.store = store;
    let sig = m.stmt(s)?;
    let steps = if cost_mode { m.ic } else { 0 };
    Ok((m.store, steps, sig))
}

struct Machine<'o> {
    opts: &'o RunOptions,
    store: StoreEnv,
    /// Iterable names of the current frame, for the loop-invariant check.
    iterable: HashSet<String>,
    ic: u64,
    counts: [u64; RULES.len()],
    max_store: u64,
    max_inter: u64,
    max_written: u64,
}

impl<'o> Machine<'o> {
    fn new(opts: &'o RunOptions) -> Self {
        Machine {
            opts,
            store: StoreEnv::new(),
            iterable: HashSet::new(),
            ic: 0,
            counts: [0; RULES.len()],
            max_store: 0,
            max_inter: 0,
            max_written: 0,
        }
    }

    fn finish(self, output: Value) -> CostReport {
        let cost = self.opts.cost_mode;
        CostReport {
            output,
            ic: if cost { self.ic } else { 0 },
            max_value_size: self.max_store,
            max_intermediate_size: self.max_inter.max(self.max_store),
            max_assigned_int_size: self.max_written,
            rule_counts: if cost {
                RULES.iter().zip(self.counts).filter(|(_, n)| *n > 0).map(|(r, n)| (*r, n)).collect()
            } else {
                BTreeMap::new()
            },
            final_store: self.store,
        }
    }

    /// Charges one step for `rule` against the fuel budget.
    #[inline]
    fn tick(&mut self, rule: Rule, pos: Pos) -> Result<(), RuntimeError> {
        self.ic += 1;
        self.counts[rule as usize] += 1;
        match self.opts.fuel {
            Some(f) if self.ic > f => Err(RuntimeError::new(
                RuntimeErrorKind::FuelExhausted,
                pos,
                format!("instruction budget of {f} steps exhausted"),
            )),
            _ => Ok(()),
        }
    }

    fn observe_store(&mut self, v: &Value) {
        if let Some(n) = size_of_value(v) {
            self.max_store = self.max_store.max(n);
        }
    }

    fn observe_inter(&mut self, v: &Value) {
        if let Value::Int(n) = v {
            self.max_inter = self.max_inter.max(n.bits());
        } else if let Some(n) = size_of_value(v) {
            self.max_inter = self.max_inter.max(n);
        }
    }

    fn observe_write(&mut self, v: &Value) {
        if let Value::Int(n) = v {
            self.max_written = self.max_written.max(n.bits());
        }
    }

    fn bind(&mut self, x: &str, v: Value) {
        self.observe_store(&v);
        self.store.set(x, v);
    }

    fn bind_declared(&mut self, x: &str, t: &TypeAnnot, v: Value) {
        if t.is_iterable() {
            self.iterable.insert(x.to_string());
        } else {
            self.iterable.remove(x);
        }
        self.bind(x, v);
    }

    fn lookup(&self, x: &str, pos: Pos) -> Result<&Value, RuntimeError> {
        self.store
            .get(x)
            .ok_or_else(|| RuntimeError::new(RuntimeErrorKind::UnboundVariable, pos, format!("'{x}' is unbound")))
    }

    fn expr(&mut self, e: &Expr) -> Result<Value, RuntimeError> {
        let v = match &e.kind {
            ExprKind::Var(x) => {
                self.tick(Rule::Var, e.pos)?;
                self.lookup(x, e.pos)?.clone()
            }
            ExprKind::Const(c) => {
                self.tick(Rule::Const, e.pos)?;
                literal_value(c)
            }
            ExprKind::Paren(inner) => {
                self.tick(Rule::Paren, e.pos)?;
                return self.expr(inner);
            }
            ExprKind::Op(op, args) => {
                self.tick(Rule::Op, e.pos)?;
                let vs = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                apply_op(*op, &vs).ok_or_else(|| {
                    let kinds: Vec<_> = vs.iter().map(Value::kind).collect();
                    RuntimeError::new(
                        RuntimeErrorKind::TypeMismatch,
                        e.pos,
                        format!("'{}' is not defined on ({})", op.symbol(), kinds.join(", ")),
                    )
                })?
            }
            ExprKind::Call(f, args) => {
                self.tick(Rule::Call, e.pos)?;
                self.call(f, args, e.pos)?
            }
            ExprKind::Index(a, i) => {
                self.tick(Rule::Index, e.pos)?;
                let base = self.expr(a)?;
                let idx = self.expr(i)?;
                index_value(&base, &idx, e.pos)?
            }
            ExprKind::ArrayNew(_) => {
                return Err(RuntimeError::new(
                    RuntimeErrorKind::TypeMismatch,
                    e.pos,
                    "array(n) outside an assignment",
                ))
            }
        };
        self.observe_inter(&v);
        Ok(v)
    }

    fn call(&mut self, f: &str, args: &[Expr], pos: Pos) -> Result<Value, RuntimeError> {
        let vs = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
        let closure = match self.store.get(f) {
            Some(Value::Closure(c)) => c.clone(),
            Some(other) => {
                return Err(RuntimeError::new(
                    RuntimeErrorKind::TypeMismatch,
                    pos,
                    format!("'{f}' is a {} and cannot be called", other.kind()),
                ))
            }
            None => {
                return ops::apply_builtin(f, &vs).ok_or_else(|| {
                    RuntimeError::new(RuntimeErrorKind::UnboundVariable, pos, format!("function '{f}' is unbound"))
                })
            }
        };
        let def = &closure.def;
        if def.params.len() != vs.len() {
            return Err(RuntimeError::new(
                RuntimeErrorKind::ArityMismatch,
                pos,
                format!("'{f}' takes {} argument(s) but {} were supplied", def.params.len(), vs.len()),
            ));
        }
        let caller_store = std::mem::replace(&mut self.store, closure.store.clone());
        let caller_iterable =
            std::mem::replace(&mut self.iterable, closure.iterable.iter().cloned().collect());
        let result = (|| {
            for (p, v) in def.params.iter().zip(vs) {
                self.bind_declared(&p.name, &p.ty, v);
            }
            if self.seq(&def.body)? != Signal::Normal {
                return Err(RuntimeError::new(
                    RuntimeErrorKind::TypeMismatch,
                    pos,
                    format!("break/continue escaped the body of '{f}'"),
                ));
            }
            match &def.ret_expr {
                Some(e) => self.expr(e),
                None => Ok(Value::Int(BigInt::zero())),
            }
        })();
        self.store = caller_store;
        self.iterable = caller_iterable;
        result
    }

    fn seq(&mut self, ss: &[Stmt]) -> Result<Signal, RuntimeError> {
        for s in ss {
            let sig = self.stmt(s)?;
            if sig != Signal::Normal {
                return Ok(sig);
            }
        }
        Ok(Signal::Normal)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Signal, RuntimeError> {
        match &s.kind {
            StmtKind::Decl(t, x) => {
                self.tick(Rule::Decl, s.pos)?;
                let v = default_value(t).ok_or_else(|| {
                    RuntimeError::new(RuntimeErrorKind::TypeMismatch, s.pos, format!("{t} is not declarable"))
                })?;
                self.observe_write(&v);
                self.bind_declared(x, t, v);
            }
            StmtKind::Assign(lv, e) => {
                self.tick(Rule::Asgmt, s.pos)?;
                self.assign(lv, e, s.pos)?;
            }
            StmtKind::Block(ss) => {
                self.tick(Rule::Block, s.pos)?;
                if ss.is_empty() {
                    self.counts[Rule::EmptyBlock as usize] += 1;
                }
                return self.seq(ss);
            }
            StmtKind::If(c, a, b) => {
                self.counts[Rule::Cond as usize] += 1;
                let cv = self.expr(c)?;
                let Value::Bool(cond) = cv else {
                    return Err(RuntimeError::new(
                        RuntimeErrorKind::TypeMismatch,
                        c.pos,
                        format!("condition evaluated to a {}", cv.kind()),
                    ));
                };
                if cond {
                    return self.stmt(a);
                } else if let Some(b) = b {
                    return self.stmt(b);
                }
            }
            StmtKind::For { counter, bound, body } => {
                self.counts[Rule::Loop as usize] += 1;
                let bv = self.expr(bound)?;
                let Value::Int(n) = bv else {
                    return Err(RuntimeError::new(
                        RuntimeErrorKind::TypeMismatch,
                        bound.pos,
                        format!("loop bound evaluated to a {}", bv.kind()),
                    ));
                };
                let iterations = if n.is_positive() { n.to_u64().unwrap_or(u64::MAX) } else { 0 };
                let locals = if self.opts.check_loop_invariant { declared_in(body) } else { HashSet::new() };
                for j in 0..iterations {
                    self.bind_declared(counter, &TypeAnnot::IInt, Value::Int(BigInt::from(j)));
                    let snapshot = self.opts.check_loop_invariant.then(|| self.iterable_snapshot(&locals));
                    let sig = self.stmt(body)?;
                    if let Some(before) = snapshot {
                        self.check_invariant(&before, body.pos)?;
                    }
                    if sig == Signal::Break {
                        break;
                    }
                }
            }
            StmtKind::FunDef(fd) => {
                self.tick(Rule::Fun, s.pos)?;
                self.define(fd);
            }
            StmtKind::Call(f, args) => {
                self.tick(Rule::Call, s.pos)?;
                self.call(f, args, s.pos)?;
            }
            StmtKind::Break => {
                self.tick(Rule::Break, s.pos)?;
                return Ok(Signal::Break);
            }
            StmtKind::Continue => {
                self.tick(Rule::Continue, s.pos)?;
                return Ok(Signal::Continue);
            }
            StmtKind::Compound(..) | StmtKind::Step(..) => {
                let ss = crate::syntax::desugar_stmts(std::slice::from_ref(s))
                    .map_err(|e| RuntimeError::new(RuntimeErrorKind::TypeMismatch, s.pos, e.message))?;
                return self.seq(&ss);
            }
        }
        Ok(Signal::Normal)
    }

    fn define(&mut self, fd: &FunDef) {
        let closure = Closure {
            store: self.store.clone(),
            def: fd.clone(),
            iterable: self.iterable.iter().cloned().collect(),
        };
        self.iterable.remove(&fd.name);
        self.store.set(&fd.name, Value::Closure(Rc::new(closure)));
    }

    fn assign(&mut self, lv: &LValue, e: &Expr, pos: Pos) -> Result<(), RuntimeError> {
        let value = match &e.kind {
            ExprKind::ArrayNew(n) => {
                self.tick(Rule::ArrayNew, e.pos)?;
                let nv = self.expr(n)?;
                let len = match &nv {
                    Value::Int(k) if !k.is_negative() => k.to_usize().ok_or_else(|| {
                        RuntimeError::new(RuntimeErrorKind::IndexOutOfRange, n.pos, format!("array length {k} too large"))
                    })?,
                    other => {
                        return Err(RuntimeError::new(
                            RuntimeErrorKind::IndexOutOfRange,
                            n.pos,
                            format!("array length must be a non-negative integer, got {other}"),
                        ))
                    }
                };
                let elem = match self.current_target(lv, pos)? {
                    Value::Array(a) => a.elem.clone(),
                    other => {
                        return Err(RuntimeError::new(
                            RuntimeErrorKind::TypeMismatch,
                            pos,
                            format!("array(n) assigned to a {}", other.kind()),
                        ))
                    }
                };
                default_array(&elem, len).ok_or_else(|| {
                    RuntimeError::new(RuntimeErrorKind::TypeMismatch, pos, format!("arrays of {elem} are not supported"))
                })?
            }
            _ => self.expr(e)?,
        };
        self.observe_write(&value);
        if lv.indices.is_empty() {
            self.bind(&lv.name, value);
            return Ok(());
        }
        let idx = lv.indices.iter().map(|i| self.expr(i)).collect::<Result<Vec<_>, _>>()?;
        let mut arr = self.array_var(&lv.name, pos)?;
        for (k, iv) in idx.iter().enumerate() {
            let i = checked_index(&arr, iv, pos)?;
            if k + 1 == idx.len() {
                self.observe_store(&value);
                arr.elems.borrow_mut()[i] = value;
                return Ok(());
            }
            let next = arr.elems.borrow()[i].clone();
            arr = match next {
                Value::Array(a) => a,
                other => {
                    return Err(RuntimeError::new(
                        RuntimeErrorKind::TypeMismatch,
                        pos,
                        format!("cannot index into a {}", other.kind()),
                    ))
                }
            };
        }
        unreachable!("index chain is non-empty")
    }

    fn array_var(&self, x: &str, pos: Pos) -> Result<ArrayRef, RuntimeError> {
        match self.lookup(x, pos)? {
            Value::Array(a) => Ok(a.clone()),
            other => Err(RuntimeError::new(
                RuntimeErrorKind::TypeMismatch,
                pos,
                format!("'{x}' is a {}, not an array", other.kind()),
            )),
        }
    }

    /// The value currently stored at an assignment target, without charging steps.
    fn current_target(&mut self, lv: &LValue, pos: Pos) -> Result<Value, RuntimeError> {
        let mut v = self.lookup(&lv.name, pos)?.clone();
        for i in &lv.indices {
            let saved = (self.ic, self.counts);
            let iv = self.expr(i);
            (self.ic, self.counts) = saved;
            v = index_value(&v, &iv?, pos)?;
        }
        Ok(v)
    }

    /// Iterable variables of the store, except `locals`: names declared in
    /// the loop body are outside the loop's typing environment (the store is
    /// flat, so they linger after their scope ends).
    fn iterable_snapshot(&self, locals: &HashSet<String>) -> Vec<(String, Value)> {
        self.iterable
            .iter()
            .filter(|x| !locals.contains(*x))
            .filter_map(|x| self.store.get(x).map(|v| (x.clone(), v.clone())))
            .collect()
    }

    fn check_invariant(&self, before: &[(String, Value)], pos: Pos) -> Result<(), RuntimeError> {
        for (x, v) in before {
            if !self.iterable.contains(x) {
                continue;
            }
            if self.store.get(x) != Some(v) {
                return Err(RuntimeError::new(
                    RuntimeErrorKind::InvariantViolation,
                    pos,
                    format!("iterable variable '{x}' changed during a loop body execution"),
                ));
            }
        }
        Ok(())
    }
}

fn checked_index(arr: &ArrayRef, iv: &Value, pos: Pos) -> Result<usize, RuntimeError> {
    let len = arr.len();
    match iv {
        Value::Int(n) => value::to_index(n).filter(|&i| i < len).ok_or_else(|| {
            RuntimeError::new(
                RuntimeErrorKind::IndexOutOfRange,
                pos,
                format!("index {n} out of range for an array of length {len}"),
            )
        }),
        other => Err(RuntimeError::new(
            RuntimeErrorKind::TypeMismatch,
            pos,
            format!("index evaluated to a {}", other.kind()),
        )),
    }
}

fn index_value(base: &Value, idx: &Value, pos: Pos) -> Result<Value, RuntimeError> {
    match base {
        Value::Array(a) => {
            let i = checked_index(a, idx, pos)?;
            let v = a.elems.borrow()[i].clone();
            Ok(v)
        }
        Value::Str(s) => {
            let Value::Int(n) = idx else {
                return Err(RuntimeError::new(RuntimeErrorKind::TypeMismatch, pos, "string index must be an integer"));
            };
            value::to_index(n)
                .and_then(|i| s.chars().nth(i))
                .map(|c| Value::str(&c.to_string()))
                .ok_or_else(|| {
                    RuntimeError::new(
                        RuntimeErrorKind::IndexOutOfRange,
                        pos,
                        format!("index {n} out of range for a string of length {}", s.chars().count()),
                    )
                })
        }
        other => Err(RuntimeError::new(
            RuntimeErrorKind::TypeMismatch,
            pos,
            format!("cannot index into a {}", other.kind()),
        )),
    }
}

/// Names declared anywhere inside `s`, including nested loop counters.
fn declared_in(s: &Stmt) -> HashSet<String> {
    let mut out = HashSet::new();
    s.walk(&mut |t| match &t.kind {
        StmtKind::Decl(_, x) => {
            out.insert(x.clone());
        }
        StmtKind::For { counter, .. } => {
            out.insert(counter.clone());
        }
        StmtKind::FunDef(fd) => {
            out.insert(fd.name.clone());
        }
        _ => {}
    });
    out
}

#[cfg(test)]
mod tests;
