//! Static checking of the iterable-variable discipline.
//!
//! The judgments thread a typing environment `Γ` and a loop indicator `ℓ`.
//! Iterable variables (`iint`, `istring`) may sit under `size` and bound
//! loops, so they may never be declared or assigned while `ℓ` is set.

mod env;
mod ops;

use std::fmt;

use serde::Serialize;

use crate::syntax::{desugar_stmts, Expr, ExprKind, FunDef, Literal, Op, Pos, Program, Stmt, StmtKind, TypeAnnot};

pub use env::TypingEnv;
pub use ops::{asg_predicate, const_type, op_signature, sub_type, sup_type, type_equiv, OpError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeErrorKind {
    IterableAssignmentInLoop,
    IterableDeclInLoop,
    Redeclaration,
    UnboundVariable,
    OperandTypeMismatch,
    NonIterableLoopBound,
    BadReturnType,
    RecursionAttempt,
    ArityMismatch,
    ParamSubtypeViolation,
    MisplacedBreak,
}

impl TypeErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeErrorKind::IterableAssignmentInLoop => "iterable-assignment-in-loop",
            TypeErrorKind::IterableDeclInLoop => "iterable-decl-in-loop",
            TypeErrorKind::Redeclaration => "redeclaration",
            TypeErrorKind::UnboundVariable => "unbound-variable",
            TypeErrorKind::OperandTypeMismatch => "operand-type-mismatch",
            TypeErrorKind::NonIterableLoopBound => "non-iterable-loop-bound",
            TypeErrorKind::BadReturnType => "bad-return-type",
            TypeErrorKind::RecursionAttempt => "recursion-attempt",
            TypeErrorKind::ArityMismatch => "arity-mismatch",
            TypeErrorKind::ParamSubtypeViolation => "param-subtype-violation",
            TypeErrorKind::MisplacedBreak => "misplaced-break",
        }
    }
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    #[serde(serialize_with = "serialize_pos")]
    pub pos: Pos,
    /// Variables the diagnostic is about. For parameter-subtype violations
    /// this is the callee's parameter; for bad return types, the function.
    pub vars: Vec<String>,
    pub message: String,
}

fn serialize_pos<S: serde::Serializer>(pos: &Pos, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Pos", 2)?;
    st.serialize_field("line", &pos.line)?;
    st.serialize_field("col", &pos.col)?;
    st.end()
}

impl TypeError {
    fn new(kind: TypeErrorKind, pos: Pos, vars: Vec<String>, message: impl Into<String>) -> Self {
        TypeError { kind, pos, vars, message: message.into() }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.pos, self.kind, self.message)
    }
}

impl std::error::Error for TypeError {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Treat every integer (and string) type as iterable-compatible:
    /// `Asg` always holds and `size` accepts any integer. Used to tell
    /// genuinely ill-typed programs apart from iterability failures.
    pub ignore_iterability: bool,
}

/// Type of a single expression under `env` with loop indicator `l`.
pub fn check_expr(env: &TypingEnv, l: bool, e: &Expr) -> Result<TypeAnnot, TypeError> {
    let _ = l; // expression typing does not depend on the loop indicator
    Checker::new(CheckOptions::default()).expr(env, e)
}

/// Checks one statement and returns the environment it yields.
pub fn check_stmt(env: &TypingEnv, l: bool, s: &Stmt) -> Result<TypingEnv, Vec<TypeError>> {
    let mut c = Checker::new(CheckOptions::default());
    c.in_loop = l;
    let out = c.stmt(env, l, s);
    if c.errors.is_empty() {
        Ok(out)
    } else {
        Err(c.errors)
    }
}

/// `∅, #f ⊢ p : t`. Returns the program's declared result type on success and
/// every independent diagnostic otherwise.
pub fn check_program(p: &Program) -> Result<TypeAnnot, Vec<TypeError>> {
    check_program_with(p, CheckOptions::default())
}

pub fn check_program_with(p: &Program, opts: CheckOptions) -> Result<TypeAnnot, Vec<TypeError>> {
    let mut c = Checker::new(opts);
    let mut env = TypingEnv::new();
    for prm in &p.params {
        c.declarable(&prm.ty, &prm.name, p.ret_expr.pos);
        env = env.extend(&prm.name, prm.ty.clone());
    }
    let env = c.seq(&env, false, &p.body);
    if let Some(t) = c.expr_or_record(&env, &p.ret_expr) {
        let want = if p.ret == TypeAnnot::Void { TypeAnnot::Int } else { p.ret.clone() };
        if !c.returns_ok(&t, &want) {
            c.errors.push(TypeError::new(
                TypeErrorKind::BadReturnType,
                p.ret_expr.pos,
                Vec::new(),
                format!("main returns {want} but the return expression has type {t}"),
            ));
        }
    }
    if c.errors.is_empty() {
        Ok(p.ret.clone())
    } else {
        Err(c.errors)
    }
}

const BUILTINS: &[&str] = &["min", "max"];

struct Checker {
    opts: CheckOptions,
    errors: Vec<TypeError>,
    /// Names of the functions whose bodies are being checked.
    defining: Vec<String>,
    /// Whether `break`/`continue` have an enclosing loop in the current body.
    in_loop: bool,
    /// Parameter names of the functions defined so far, for diagnostics.
    param_names: std::collections::HashMap<String, Vec<String>>,
}

impl Checker {
    fn new(opts: CheckOptions) -> Self {
        Checker {
            opts,
            errors: Vec::new(),
            defining: Vec::new(),
            in_loop: false,
            param_names: Default::default(),
        }
    }

    fn asg(&self, l: bool, t: &TypeAnnot) -> bool {
        self.opts.ignore_iterability || asg_predicate(l, t)
    }

    /// `actual ⪯ expected` (or plain compatibility when iterability is ignored).
    fn fits(&self, actual: &TypeAnnot, expected: &TypeAnnot) -> bool {
        if self.opts.ignore_iterability {
            type_equiv(actual, expected)
        } else {
            sub_type(actual, expected)
        }
    }

    fn returns_ok(&self, actual: &TypeAnnot, expected: &TypeAnnot) -> bool {
        self.fits(actual, expected)
    }

    fn declarable(&mut self, t: &TypeAnnot, name: &str, pos: Pos) -> bool {
        let ok = match t {
            TypeAnnot::Arrow(..) | TypeAnnot::Void => false,
            TypeAnnot::Array(_) => !array_holds_iterable(t),
            _ => true,
        };
        if !ok {
            self.errors.push(TypeError::new(
                TypeErrorKind::OperandTypeMismatch,
                pos,
                vec![name.to_string()],
                format!("'{name}' cannot be declared with type {t}"),
            ));
        }
        ok
    }

    fn expr_or_record(&mut self, env: &TypingEnv, e: &Expr) -> Option<TypeAnnot> {
        match self.expr(env, e) {
            Ok(t) => Some(t),
            Err(err) => {
                self.errors.push(err);
                None
            }
        }
    }

    fn expr(&self, env: &TypingEnv, e: &Expr) -> Result<TypeAnnot, TypeError> {
        match &e.kind {
            ExprKind::Var(x) => match env.get(x) {
                Some(TypeAnnot::Arrow(..)) => Err(TypeError::new(
                    TypeErrorKind::OperandTypeMismatch,
                    e.pos,
                    vec![x.clone()],
                    format!("function '{x}' used as a value"),
                )),
                Some(t) => Ok(t.clone()),
                None => Err(TypeError::new(
                    TypeErrorKind::UnboundVariable,
                    e.pos,
                    vec![x.clone()],
                    format!("'{x}' is not declared"),
                )),
            },
            ExprKind::Const(c) => Ok(const_type(c)),
            ExprKind::Paren(inner) => self.expr(env, inner),
            ExprKind::Op(op, args) => {
                let ts = args.iter().map(|a| self.expr(env, a)).collect::<Result<Vec<_>, _>>()?;
                self.op(*op, &ts, args, e.pos, TypeErrorKind::OperandTypeMismatch)
            }
            ExprKind::Call(f, args) => self.call(env, f, args, e.pos),
            ExprKind::Index(a, i) => {
                let ta = self.expr(env, a)?;
                let ti = self.expr(env, i)?;
                if !ti.is_int() {
                    return Err(mismatch(i.pos, format!("index must be an integer, found {ti}")));
                }
                match ta {
                    TypeAnnot::Array(elem) => Ok(*elem),
                    TypeAnnot::Str | TypeAnnot::IStr => Ok(TypeAnnot::Str),
                    other => Err(mismatch(a.pos, format!("cannot index a value of type {other}"))),
                }
            }
            ExprKind::ArrayNew(_) => Err(mismatch(
                e.pos,
                "array(n) may only appear as the whole right-hand side of an assignment",
            )),
        }
    }

    fn op(&self, op: Op, ts: &[TypeAnnot], args: &[Expr], pos: Pos, size_kind: TypeErrorKind) -> Result<TypeAnnot, TypeError> {
        let relaxed;
        let ts = if self.opts.ignore_iterability && op == Op::Size {
            relaxed = ts.iter().map(promote_iterable).collect::<Vec<_>>();
            &relaxed[..]
        } else {
            ts
        };
        op_signature(op, ts).map_err(|err| {
            let kind = if op == Op::Size { size_kind } else { TypeErrorKind::OperandTypeMismatch };
            let mut vars = Vec::new();
            for a in args {
                a.walk(&mut |x| {
                    if let ExprKind::Var(v) = &x.kind {
                        if !vars.contains(v) {
                            vars.push(v.clone());
                        }
                    }
                });
            }
            TypeError::new(kind, pos, vars, err.to_string())
        })
    }

    fn call(&self, env: &TypingEnv, f: &str, args: &[Expr], pos: Pos) -> Result<TypeAnnot, TypeError> {
        let ts = args.iter().map(|a| self.expr(env, a)).collect::<Result<Vec<_>, _>>()?;
        match env.get(f) {
            Some(TypeAnnot::Arrow(ps, ret)) => {
                if ps.len() != ts.len() {
                    return Err(TypeError::new(
                        TypeErrorKind::ArityMismatch,
                        pos,
                        vec![f.to_string()],
                        format!("'{f}' takes {} argument(s) but {} were supplied", ps.len(), ts.len()),
                    ));
                }
                for (k, (a, p)) in ts.iter().zip(ps.iter()).enumerate() {
                    if !self.fits(a, p) {
                        let kind = if type_equiv(a, p) {
                            TypeErrorKind::ParamSubtypeViolation
                        } else {
                            TypeErrorKind::OperandTypeMismatch
                        };
                        let param = self
                            .param_names
                            .get(f)
                            .and_then(|ns| ns.get(k).cloned())
                            .unwrap_or_else(|| format!("{f}#{k}"));
                        return Err(TypeError::new(
                            kind,
                            args[k].pos,
                            vec![param],
                            format!("argument {} of '{f}' has type {a}, expected {p}", k + 1),
                        ));
                    }
                }
                Ok(if **ret == TypeAnnot::Void { TypeAnnot::Int } else { (**ret).clone() })
            }
            Some(other) => Err(mismatch(pos, format!("'{f}' has type {other} and cannot be called"))),
            None if self.defining.iter().any(|d| d == f) => Err(TypeError::new(
                TypeErrorKind::RecursionAttempt,
                pos,
                vec![f.to_string()],
                format!("'{f}' calls itself; recursion is not definable"),
            )),
            None if BUILTINS.contains(&f) => {
                if ts.len() != 2 {
                    return Err(TypeError::new(
                        TypeErrorKind::ArityMismatch,
                        pos,
                        vec![f.to_string()],
                        format!("'{f}' takes 2 arguments but {} were supplied", ts.len()),
                    ));
                }
                sup_type(&ts).map_err(|e| mismatch(pos, format!("{f}: {e}")))
            }
            None => Err(TypeError::new(
                TypeErrorKind::UnboundVariable,
                pos,
                vec![f.to_string()],
                format!("function '{f}' is not defined"),
            )),
        }
    }

    fn seq(&mut self, env: &TypingEnv, l: bool, ss: &[Stmt]) -> TypingEnv {
        ss.iter().fold(env.clone(), |env, s| self.stmt(&env, l, s))
    }

    /// Checks `s`, recording diagnostics, and returns the resulting environment.
    /// A failed statement yields its input environment (or, for declarations,
    /// the binding anyway so later statements do not cascade).
    fn stmt(&mut self, env: &TypingEnv, l: bool, s: &Stmt) -> TypingEnv {
        match &s.kind {
            StmtKind::Decl(t, x) => {
                if !self.declarable(t, x, s.pos) {
                    return env.clone();
                }
                if env.contains(x) {
                    self.errors.push(TypeError::new(
                        TypeErrorKind::Redeclaration,
                        s.pos,
                        vec![x.clone()],
                        format!("'{x}' is already declared"),
                    ));
                    return env.clone();
                }
                if !self.asg(l, t) {
                    self.errors.push(TypeError::new(
                        TypeErrorKind::IterableDeclInLoop,
                        s.pos,
                        vec![x.clone()],
                        format!("iterable variable '{x}' declared inside a loop or function body"),
                    ));
                }
                env.extend(x, t.clone())
            }
            StmtKind::Assign(lv, e) => {
                let Some(var_t) = env.get(&lv.name).cloned() else {
                    self.errors.push(TypeError::new(
                        TypeErrorKind::UnboundVariable,
                        s.pos,
                        vec![lv.name.clone()],
                        format!("'{}' is not declared", lv.name),
                    ));
                    return env.clone();
                };
                let mut target = var_t.clone();
                for i in &lv.indices {
                    let Some(ti) = self.expr_or_record(env, i) else { return env.clone() };
                    if !ti.is_int() {
                        self.errors.push(mismatch(i.pos, format!("index must be an integer, found {ti}")));
                        return env.clone();
                    }
                    target = match target {
                        TypeAnnot::Array(elem) => *elem,
                        other => {
                            self.errors.push(mismatch(
                                s.pos,
                                format!("cannot assign through an index into a value of type {other}"),
                            ));
                            return env.clone();
                        }
                    };
                }
                if let ExprKind::ArrayNew(n) = &e.kind {
                    let Some(tn) = self.expr_or_record(env, n) else { return env.clone() };
                    if !tn.is_int() {
                        self.errors.push(mismatch(n.pos, format!("array length must be an integer, found {tn}")));
                    }
                    if !matches!(target, TypeAnnot::Array(_)) {
                        self.errors.push(mismatch(e.pos, format!("array(n) assigned to a target of type {target}")));
                    }
                } else {
                    let Some(te) = self.expr_or_record(env, e) else { return env.clone() };
                    if !assignable(&te, &target) {
                        self.errors.push(mismatch(
                            e.pos,
                            format!("cannot assign a value of type {te} to '{}' of type {target}", lv.name),
                        ));
                        return env.clone();
                    }
                }
                if !self.asg(l, &var_t) {
                    self.errors.push(TypeError::new(
                        TypeErrorKind::IterableAssignmentInLoop,
                        s.pos,
                        vec![lv.name.clone()],
                        format!("iterable variable '{}' assigned inside a loop or function body", lv.name),
                    ));
                }
                env.clone()
            }
            StmtKind::Block(ss) => {
                self.seq(env, l, ss);
                env.clone()
            }
            StmtKind::If(c, a, b) => {
                if let Some(tc) = self.expr_or_record(env, c) {
                    if tc != TypeAnnot::Bool {
                        self.errors.push(mismatch(c.pos, format!("condition must be bool, found {tc}")));
                    }
                }
                self.stmt(env, l, a);
                if let Some(b) = b {
                    self.stmt(env, l, b);
                }
                env.clone()
            }
            StmtKind::For { counter, bound, body } => {
                self.loop_bound(env, bound);
                if env.contains(counter) {
                    self.errors.push(TypeError::new(
                        TypeErrorKind::Redeclaration,
                        s.pos,
                        vec![counter.clone()],
                        format!("loop counter '{counter}' is already declared"),
                    ));
                }
                let inner = env.extend(counter, TypeAnnot::IInt);
                let saved = std::mem::replace(&mut self.in_loop, true);
                self.stmt(&inner, true, body);
                self.in_loop = saved;
                env.clone()
            }
            StmtKind::FunDef(fd) => self.fundef(env, fd, s.pos),
            StmtKind::Call(f, args) => {
                if let Err(e) = self.call(env, f, args, s.pos) {
                    self.errors.push(e);
                }
                env.clone()
            }
            StmtKind::Break | StmtKind::Continue => {
                if !self.in_loop {
                    self.errors.push(TypeError::new(
                        TypeErrorKind::MisplacedBreak,
                        s.pos,
                        Vec::new(),
                        "break/continue outside of a loop body",
                    ));
                }
                env.clone()
            }
            StmtKind::Compound(..) | StmtKind::Step(..) => match desugar_stmts(std::slice::from_ref(s)) {
                Ok(ss) => self.seq(env, l, &ss),
                Err(e) => {
                    self.errors.push(mismatch(s.pos, e.message));
                    env.clone()
                }
            },
        }
    }

    fn loop_bound(&mut self, env: &TypingEnv, bound: &Expr) {
        match &bound.kind {
            ExprKind::Const(Literal::Dec(_) | Literal::Bin(_)) => {}
            ExprKind::Op(Op::Size, args) => {
                let Some(t) = self.expr_or_record(env, &args[0]) else { return };
                if let Err(e) = self.op(Op::Size, &[t], args, bound.pos, TypeErrorKind::NonIterableLoopBound) {
                    self.errors.push(e);
                }
            }
            _ => self.errors.push(TypeError::new(
                TypeErrorKind::NonIterableLoopBound,
                bound.pos,
                Vec::new(),
                "loop bound must be size(e) or an integer literal",
            )),
        }
    }

    fn fundef(&mut self, env: &TypingEnv, fd: &FunDef, pos: Pos) -> TypingEnv {
        if env.contains(&fd.name) {
            self.errors.push(TypeError::new(
                TypeErrorKind::Redeclaration,
                pos,
                vec![fd.name.clone()],
                format!("'{}' is already declared", fd.name),
            ));
            return env.clone();
        }
        self.param_names.insert(fd.name.clone(), fd.params.iter().map(|p| p.name.clone()).collect());
        let mut inner = env.clone();
        for p in &fd.params {
            if self.declarable(&p.ty, &p.name, pos) {
                inner = inner.extend(&p.name, p.ty.clone());
            }
        }
        self.defining.push(fd.name.clone());
        let saved = std::mem::replace(&mut self.in_loop, false);
        let body_env = self.seq(&inner, true, &fd.body);
        self.in_loop = saved;
        match (&fd.ret_expr, &fd.ret) {
            (None, TypeAnnot::Void) => {}
            (None, t) => self.errors.push(TypeError::new(
                TypeErrorKind::BadReturnType,
                pos,
                vec![fd.name.clone()],
                format!("'{}' must return a value of type {t}", fd.name),
            )),
            (Some(e), ret) => {
                if let Some(t) = self.expr_or_record(&body_env, e) {
                    let want = if *ret == TypeAnnot::Void { TypeAnnot::Int } else { ret.clone() };
                    if !self.returns_ok(&t, &want) {
                        self.errors.push(TypeError::new(
                            TypeErrorKind::BadReturnType,
                            e.pos,
                            vec![fd.name.clone()],
                            format!("'{}' returns {want} but the return expression has type {t}", fd.name),
                        ));
                    }
                }
            }
        }
        self.defining.pop();
        let arrow = TypeAnnot::Arrow(fd.params.iter().map(|p| p.ty.clone()).collect(), Box::new(fd.ret.clone()));
        env.extend(&fd.name, arrow)
    }
}

fn mismatch(pos: Pos, message: impl Into<String>) -> TypeError {
    TypeError::new(TypeErrorKind::OperandTypeMismatch, pos, Vec::new(), message)
}

fn promote_iterable(t: &TypeAnnot) -> TypeAnnot {
    match t {
        TypeAnnot::Int => TypeAnnot::IInt,
        TypeAnnot::Str => TypeAnnot::IStr,
        other => other.clone(),
    }
}

fn array_holds_iterable(t: &TypeAnnot) -> bool {
    match t {
        TypeAnnot::Array(e) => e.is_iterable() || array_holds_iterable(e),
        _ => false,
    }
}

/// Assignment compatibility `Γ(x) ~_T type(e)`, extended to strings and arrays.
fn assignable(value: &TypeAnnot, target: &TypeAnnot) -> bool {
    match (value, target) {
        (TypeAnnot::Array(a), TypeAnnot::Array(b)) => a == b,
        _ => type_equiv(value, target),
    }
}
