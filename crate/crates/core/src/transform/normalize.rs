use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;

use crate::interp::{run_program, Value};
use crate::syntax::{Expr, ExprKind, FunDef, Literal, Op, Param, Program, Stmt, StmtKind, TypeAnnot};

use super::TransformError;

/// Growth descriptor for the iteration budget after which the simple form
/// agrees with the original program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicBound {
    /// A fixed number of iterations, independent of the input.
    Constant(u64),
    /// `O(n^(s^s))` where `s` is the statement size of the program.
    Tower { program_size: usize },
}

impl fmt::Display for SymbolicBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicBound::Constant(t) => write!(f, "{t}"),
            SymbolicBound::Tower { program_size } => write!(f, "O(n^(s^s)) with s = {program_size}"),
        }
    }
}

/// A program made of declarations, one loop `for(i<size(y))` whose body has
/// no loops or calls, and a return.
#[derive(Debug, Clone)]
pub struct SimpleForm {
    pub program: Program,
    /// The extra `iint` parameter bounding the loop.
    pub bound_var: String,
    pub symbolic_bound: SymbolicBound,
}

impl SimpleForm {
    /// Runs the simple form with an iteration budget of `t`.
    pub fn run(&self, args: &[Value], t: u64) -> Result<Value, TransformError> {
        let mut all = args.to_vec();
        all.push(Value::Int(budget_value(t)));
        Ok(run_program(&self.program, &all, false)?.output)
    }
}

/// The value of the bound parameter giving `t` loop iterations: `2^t − 1`.
pub fn budget_value(t: u64) -> BigInt {
    (BigInt::from(1) << t) - 1
}

/// Checks the simple-form shape: leading declarations, a single loop over
/// `size(y)` whose body has no loops or calls, then the return.
pub fn is_simple(p: &Program, y: &str) -> bool {
    let Some(last) = p.params.last() else { return false };
    if last.name != y || last.ty != TypeAnnot::IInt {
        return false;
    }
    let decls = p.body.iter().take_while(|s| matches!(s.kind, StmtKind::Decl(..))).count();
    let [loop_stmt] = &p.body[decls..] else { return false };
    let StmtKind::For { bound, body, .. } = &loop_stmt.kind else { return false };
    let size_y = Expr::size(Expr::var(y));
    if *bound != size_y {
        return false;
    }
    let mut ok = true;
    body.walk(&mut |s| match &s.kind {
        StmtKind::For { .. } | StmtKind::Call(..) | StmtKind::FunDef(..) => ok = false,
        _ => s.exprs().iter().for_each(|e| {
            e.walk(&mut |e| {
                if matches!(e.kind, ExprKind::Call(..)) {
                    ok = false
                }
            })
        }),
    });
    ok
}

/// Doubles `t` from 1 until the simple form's output at `t` and at `2t`
/// equals the original output; returns that `t`.
pub fn stabilization_search(p0: &SimpleForm, p: &Program, args: &[Value], t_max: u64) -> Result<u64, TransformError> {
    let expected = run_program(p, args, false)?.output;
    let mut t = 1;
    while t <= t_max {
        if p0.run(args, t)? == expected && p0.run(args, 2 * t)? == expected {
            return Ok(t);
        }
        t *= 2;
    }
    Err(TransformError::NotStabilized { t_max })
}

/// Rewrites `p` into an equivalent simple program with an extra budget
/// parameter.
///
/// A body without loops, calls or `size` runs once under `if(i<1) … else break;`.
/// Anything else becomes a program-counter machine: each loop iteration
/// performs one step (a straight-line statement, a branch, or one halving
/// of a `size` computation), and the loop breaks once the end is reached.
/// Functions are inlined with their definition-time variables snapshotted,
/// and every local is declared up front with `iint` relaxed to `int`.
pub fn normalize_simple(p: &Program) -> Result<SimpleForm, TransformError> {
    reject_unsupported(p)?;
    let mut lw = Lower::new(p);
    let y = lw.fresh("y");
    let i = lw.fresh("i");
    let straight = is_straight_line(&p.body) && !has_size_or_call(&p.ret_expr);
    let mut prologue = Vec::new();
    for q in &p.params {
        let assigned = assigns(&p.body, &q.name);
        let name = if assigned && q.ty.is_iterable() {
            let copy = lw.fresh(&q.name);
            lw.hoist(&TypeAnnot::Int, &copy);
            prologue.push(Stmt::assign(&copy, Expr::var(&q.name)));
            copy
        } else {
            q.name.clone()
        };
        lw.bind_var(&q.name, &name, &q.ty);
    }
    let i_lt = |n: Expr| Expr::bin(Op::Lt, Expr::var(&i), n);
    let (loop_body, ret_expr, bound) = if straight {
        let mut ss = prologue;
        for s in &p.body {
            lw.structured(s, &mut ss)?;
        }
        let ret = lw.rename(&p.ret_expr)?;
        let body = match ss.len() {
            0 => Stmt::block(Vec::new()),
            1 => Stmt::if_else(i_lt(Expr::int(1)), ss.pop().unwrap(), Stmt::new(StmtKind::Break)),
            _ => Stmt::if_else(i_lt(Expr::int(1)), Stmt::block(ss), Stmt::new(StmtKind::Break)),
        };
        (body, ret, SymbolicBound::Constant(1))
    } else {
        if !prologue.is_empty() {
            lw.exec(prologue);
        }
        for s in &p.body {
            lw.stmt(s)?;
        }
        let r = lw.expr(&p.ret_expr)?;
        let rt = lw.fresh("r");
        lw.hoist(&relax(&p.ret), &rt);
        lw.exec(vec![Stmt::assign(&rt, r)]);
        let pc = lw.fresh("pc");
        lw.hoist(&TypeAnnot::Int, &pc);
        let body = lw.dispatch(&pc);
        (body, Expr::var(&rt), SymbolicBound::Tower { program_size: statement_size(p) })
    };
    let mut body: Vec<Stmt> = lw.decls.iter().map(|(t, x)| Stmt::decl(t.clone(), x)).collect();
    body.push(Stmt::for_loop(&i, Expr::size(Expr::var(&y)), loop_body));
    let mut params = p.params.clone();
    params.push(Param::new(TypeAnnot::IInt, &y));
    Ok(SimpleForm {
        program: Program { ret: p.ret.clone(), params, body, ret_expr },
        bound_var: y,
        symbolic_bound: bound,
    })
}

fn reject_unsupported(p: &Program) -> Result<(), TransformError> {
    let scalar = |t: &TypeAnnot| matches!(t, TypeAnnot::Int | TypeAnnot::IInt | TypeAnnot::Bool | TypeAnnot::Void);
    let bad = |what: &str| Err(TransformError::Unsupported(format!("{what} cannot be normalized")));
    if !p.params.iter().all(|q| scalar(&q.ty)) || !scalar(&p.ret) {
        return bad("a non-scalar parameter or result");
    }
    let mut err = None;
    let check_expr = |e: &Expr, err: &mut Option<&'static str>| {
        e.walk(&mut |e| match &e.kind {
            ExprKind::Index(..) | ExprKind::ArrayNew(_) => *err = Some("array access"),
            ExprKind::Const(Literal::Str(_)) => *err = Some("a string"),
            _ => {}
        })
    };
    p.walk_stmts(&mut |s| {
        match &s.kind {
            StmtKind::Decl(t, _) if !scalar(t) => err = Some("a non-scalar declaration"),
            StmtKind::FunDef(fd) if !scalar(&fd.ret) || !fd.params.iter().all(|q| scalar(&q.ty)) => {
                err = Some("a function over non-scalar values")
            }
            StmtKind::Assign(lv, _) if !lv.indices.is_empty() => err = Some("array assignment"),
            _ => {}
        }
        for e in s.exprs() {
            check_expr(e, &mut err);
        }
    });
    check_expr(&p.ret_expr, &mut err);
    match err {
        Some(what) => bad(what),
        None => Ok(()),
    }
}

fn has_size_or_call(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |e| {
        if matches!(e.kind, ExprKind::Call(..) | ExprKind::Op(Op::Size, _)) {
            found = true
        }
    });
    found
}

fn is_straight_line(ss: &[Stmt]) -> bool {
    let mut ok = true;
    for s in ss {
        s.walk(&mut |s| match &s.kind {
            StmtKind::For { .. }
            | StmtKind::Call(..)
            | StmtKind::FunDef(..)
            | StmtKind::Break
            | StmtKind::Continue => ok = false,
            _ => {
                if s.exprs().into_iter().any(has_size_or_call) {
                    ok = false
                }
            }
        });
    }
    ok
}

fn assigns(ss: &[Stmt], x: &str) -> bool {
    let mut found = false;
    for s in ss {
        s.walk(&mut |s| match &s.kind {
            StmtKind::Assign(lv, _) | StmtKind::Compound(lv, _, _) | StmtKind::Step(lv, _) if lv.name == x => {
                found = true
            }
            _ => {}
        });
    }
    found
}

fn statement_size(p: &Program) -> usize {
    let mut n = 0;
    p.walk_stmts(&mut |s| {
        n += 1;
        for e in s.exprs() {
            e.walk(&mut |_| n += 1);
        }
    });
    n
}

/// Type used for a hoisted variable: iterability is dropped because every
/// assignment in the simple form sits inside its single loop.
fn relax(t: &TypeAnnot) -> TypeAnnot {
    match t {
        TypeAnnot::IInt | TypeAnnot::Void => TypeAnnot::Int,
        other => other.clone(),
    }
}

fn default_expr(t: &TypeAnnot) -> Expr {
    match t {
        TypeAnnot::Bool => Expr::boolean(false),
        _ => Expr::int(0),
    }
}

#[derive(Clone)]
enum Binding {
    Var(String, TypeAnnot),
    Fun(Rc<FunInfo>),
}

struct FunInfo {
    def: FunDef,
    /// Names visible at the definition, with variables redirected to their snapshots.
    env: HashMap<String, Binding>,
    /// Free variables of the body and the snapshot holding each.
    snapshots: Vec<(String, String, TypeAnnot)>,
}

/// One step of the program-counter machine. Targets are instruction indices.
enum Instr {
    /// Straight-line statements, then the next instruction.
    Exec(Vec<Stmt>),
    Branch(Expr, usize, usize),
    Jump(usize),
    /// `if(v>0){v=v/2; n=n+1;}` repeated in place until `v` reaches 0.
    Halve(String, String),
}

struct LoopTargets {
    /// Jumps to patch with the loop exit.
    breaks: Vec<usize>,
    conts: Vec<usize>,
}

struct Lower {
    used: BTreeSet<String>,
    /// Names already standing for some variable of the simple form.
    taken: BTreeSet<String>,
    decls: Vec<(TypeAnnot, String)>,
    scopes: Vec<HashMap<String, Binding>>,
    code: Vec<Instr>,
    loops: Vec<LoopTargets>,
}

const PENDING: usize = usize::MAX;

impl Lower {
    fn new(p: &Program) -> Self {
        Lower { used: p.names(), taken: BTreeSet::new(), decls: Vec::new(), scopes: vec![HashMap::new()], code: Vec::new(), loops: Vec::new() }
    }

    fn fresh(&mut self, base: &str) -> String {
        let name = if self.used.contains(base) {
            (1..).map(|k| format!("{base}{k}")).find(|n| !self.used.contains(n)).expect("unbounded search")
        } else {
            base.to_string()
        };
        self.used.insert(name.clone());
        name
    }

    fn hoist(&mut self, t: &TypeAnnot, x: &str) {
        self.taken.insert(x.to_string());
        self.decls.push((relax(t), x.to_string()));
    }

    fn bind_var(&mut self, x: &str, name: &str, t: &TypeAnnot) {
        self.taken.insert(name.to_string());
        self.scopes.last_mut().expect("scope").insert(x.to_string(), Binding::Var(name.to_string(), t.clone()));
    }

    /// A fresh hoisted variable standing for a declaration of `x`.
    fn declare(&mut self, t: &TypeAnnot, x: &str) -> String {
        let name = if !self.taken.contains(x) {
            // The first variable declared under a name keeps it.
            x.to_string()
        } else {
            self.fresh(x)
        };
        self.used.insert(name.clone());
        self.hoist(t, &name);
        self.bind_var(x, &name, t);
        name
    }

    fn lookup(&self, x: &str) -> Result<Binding, TransformError> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(x).cloned())
            .ok_or_else(|| TransformError::Unbound(x.to_string()))
    }

    fn var_name(&self, x: &str) -> Result<String, TransformError> {
        match self.lookup(x)? {
            Binding::Var(n, _) => Ok(n),
            Binding::Fun(_) => Err(TransformError::Unsupported(format!("'{x}' is a function used as a value"))),
        }
    }

    /// Renames variables without lowering; for expressions free of calls and `size`.
    fn rename(&self, e: &Expr) -> Result<Expr, TransformError> {
        let kind = match &e.kind {
            ExprKind::Var(x) => ExprKind::Var(self.var_name(x)?),
            ExprKind::Const(_) => e.kind.clone(),
            ExprKind::Op(op, args) => ExprKind::Op(*op, args.iter().map(|a| self.rename(a)).collect::<Result<_, _>>()?),
            ExprKind::Paren(a) => ExprKind::Paren(Box::new(self.rename(a)?)),
            _ => return Err(TransformError::Unsupported("call in straight-line code".into())),
        };
        Ok(Expr::at(kind, e.pos))
    }

    /// Straight-line statements with renamed variables and hoisted declarations.
    fn structured(&mut self, s: &Stmt, out: &mut Vec<Stmt>) -> Result<(), TransformError> {
        match &s.kind {
            StmtKind::Decl(t, x) => {
                self.declare(t, x);
            }
            StmtKind::Assign(lv, e) => {
                out.push(Stmt::at(StmtKind::Assign(crate::syntax::LValue::var(self.var_name(&lv.name)?), self.rename(e)?), s.pos))
            }
            StmtKind::Block(ss) => {
                self.scopes.push(HashMap::new());
                let mut inner = Vec::new();
                for s in ss {
                    self.structured(s, &mut inner)?;
                }
                self.scopes.pop();
                out.push(Stmt::block(inner));
            }
            StmtKind::If(c, a, b) => {
                let c = self.rename(c)?;
                let branch = |this: &mut Self, s: &Stmt| -> Result<Stmt, TransformError> {
                    this.scopes.push(HashMap::new());
                    let mut v = Vec::new();
                    this.structured(s, &mut v)?;
                    this.scopes.pop();
                    Ok(if v.len() == 1 { v.pop().unwrap() } else { Stmt::block(v) })
                };
                let a = branch(self, a)?;
                let b = match b {
                    Some(b) => branch(self, b)?,
                    None => Stmt::block(Vec::new()),
                };
                out.push(Stmt::if_else(c, a, b));
            }
            StmtKind::Compound(..) | StmtKind::Step(..) => {
                for s in crate::syntax::desugar_stmts(std::slice::from_ref(s)).map_err(|e| TransformError::Unsupported(e.message))? {
                    self.structured(&s, out)?;
                }
            }
            _ => return Err(TransformError::Unsupported("loop or call in straight-line code".into())),
        }
        Ok(())
    }

    fn here(&self) -> usize {
        self.code.len()
    }

    fn exec(&mut self, ss: Vec<Stmt>) {
        self.code.push(Instr::Exec(ss));
    }

    fn patch(&mut self, at: usize, target: usize) {
        match &mut self.code[at] {
            Instr::Jump(t) => *t = target,
            Instr::Branch(_, a, b) => {
                if *a == PENDING {
                    *a = target
                } else {
                    *b = target
                }
            }
            _ => unreachable!("patching a non-jump"),
        }
    }

    /// Lowers `e`, emitting steps for `size` and calls; returns an expression
    /// free of both.
    fn expr(&mut self, e: &Expr) -> Result<Expr, TransformError> {
        let kind = match &e.kind {
            ExprKind::Var(x) => ExprKind::Var(self.var_name(x)?),
            ExprKind::Const(_) => e.kind.clone(),
            ExprKind::Paren(a) => ExprKind::Paren(Box::new(self.expr(a)?)),
            ExprKind::Op(Op::Size, args) => {
                let a = self.expr(&args[0])?;
                let v = self.fresh("sv");
                let n = self.fresh("sn");
                self.hoist(&TypeAnnot::Int, &v);
                self.hoist(&TypeAnnot::Int, &n);
                let zero = Expr::int(0);
                self.exec(vec![
                    Stmt::assign(&v, a),
                    Stmt::if_else(
                        Expr::bin(Op::Lt, Expr::var(&v), zero.clone()),
                        Stmt::block(vec![Stmt::assign(&v, Expr::un(Op::Neg, Expr::var(&v)))]),
                        Stmt::block(Vec::new()),
                    ),
                    Stmt::assign(&n, zero),
                ]);
                self.code.push(Instr::Halve(v, n.clone()));
                ExprKind::Var(n)
            }
            ExprKind::Op(op, args) => ExprKind::Op(*op, args.iter().map(|a| self.expr(a)).collect::<Result<_, _>>()?),
            ExprKind::Call(f, args) => {
                let args = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                return self.inline(f, args);
            }
            ExprKind::Index(..) | ExprKind::ArrayNew(_) => {
                return Err(TransformError::Unsupported("array access cannot be normalized".into()))
            }
        };
        Ok(Expr::at(kind, e.pos))
    }

    fn inline(&mut self, f: &str, args: Vec<Expr>) -> Result<Expr, TransformError> {
        let info = match self.lookup(f) {
            Ok(Binding::Fun(info)) => info,
            Ok(Binding::Var(..)) => return Err(TransformError::Unsupported(format!("'{f}' is not a function"))),
            Err(_) if matches!(f, "min" | "max") && args.len() == 2 => {
                let r = self.fresh("r");
                self.hoist(&TypeAnnot::Int, &r);
                let op = if f == "min" { Op::Le } else { Op::Ge };
                let (a, b) = (args[0].clone(), args[1].clone());
                self.exec(vec![Stmt::if_else(
                    Expr::bin(op, a.clone(), b.clone()),
                    Stmt::block(vec![Stmt::assign(&r, a)]),
                    Stmt::block(vec![Stmt::assign(&r, b)]),
                )]);
                return Ok(Expr::var(r));
            }
            Err(e) => return Err(e),
        };
        let def = &info.def;
        if def.params.len() != args.len() {
            return Err(TransformError::Unsupported(format!("call of '{f}' with the wrong number of arguments")));
        }
        let saved_scopes = std::mem::replace(&mut self.scopes, vec![info.env.clone(), HashMap::new()]);
        let saved_loops = std::mem::take(&mut self.loops);
        let mut setup = Vec::new();
        for (x, snap, t) in &info.snapshots {
            let local = self.fresh(x);
            self.hoist(t, &local);
            setup.push(Stmt::assign(&local, Expr::var(snap)));
            self.bind_var(x, &local, t);
        }
        for (q, a) in def.params.iter().zip(args) {
            let local = self.fresh(&q.name);
            self.hoist(&q.ty, &local);
            setup.push(Stmt::assign(&local, a));
            self.bind_var(&q.name, &local, &q.ty);
        }
        if !setup.is_empty() {
            self.exec(setup);
        }
        let result = (|| {
            for s in &def.body {
                self.stmt(s)?;
            }
            match &def.ret_expr {
                Some(e) => {
                    let r = self.expr(e)?;
                    let rt = self.fresh("r");
                    self.hoist(&def.ret, &rt);
                    self.exec(vec![Stmt::assign(&rt, r)]);
                    Ok(Expr::var(rt))
                }
                None => Ok(Expr::int(0)),
            }
        })();
        self.scopes = saved_scopes;
        self.loops = saved_loops;
        result
    }

    fn define(&mut self, fd: &FunDef) -> Result<(), TransformError> {
        let mut referenced = BTreeSet::new();
        let mut collect = |e: &Expr| {
            e.walk(&mut |e| {
                if let ExprKind::Var(x) = &e.kind {
                    referenced.insert(x.clone());
                }
            })
        };
        for s in &fd.body {
            s.walk(&mut |s| s.exprs().into_iter().for_each(&mut collect));
        }
        fd.ret_expr.iter().for_each(&mut collect);
        let mut env: HashMap<String, Binding> = HashMap::new();
        for scope in &self.scopes {
            env.extend(scope.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        let mut snapshots = Vec::new();
        let mut copies = Vec::new();
        for x in referenced {
            if let Some(Binding::Var(name, t)) = env.get(&x).cloned() {
                let snap = self.fresh(&format!("{}_{x}", fd.name));
                self.hoist(&t, &snap);
                copies.push(Stmt::assign(&snap, Expr::var(&name)));
                env.remove(&x);
                snapshots.push((x, snap, t));
            }
        }
        if !copies.is_empty() {
            self.exec(copies);
        }
        let info = FunInfo { def: fd.clone(), env, snapshots };
        self.scopes.last_mut().expect("scope").insert(fd.name.clone(), Binding::Fun(Rc::new(info)));
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), TransformError> {
        match &s.kind {
            StmtKind::Decl(t, x) => {
                let name = self.declare(t, x);
                self.exec(vec![Stmt::assign(&name, default_expr(t))]);
            }
            StmtKind::Assign(lv, e) => {
                let e = self.expr(e)?;
                let name = self.var_name(&lv.name)?;
                self.exec(vec![Stmt::at(StmtKind::Assign(crate::syntax::LValue::var(name), e), s.pos)]);
            }
            StmtKind::Compound(..) | StmtKind::Step(..) => {
                for s in crate::syntax::desugar_stmts(std::slice::from_ref(s)).map_err(|e| TransformError::Unsupported(e.message))? {
                    self.stmt(&s)?;
                }
            }
            StmtKind::Block(ss) => {
                self.scopes.push(HashMap::new());
                let r = ss.iter().try_for_each(|s| self.stmt(s));
                self.scopes.pop();
                r?;
            }
            StmtKind::If(c, a, b) => {
                let c = self.expr(c)?;
                let branch = self.here();
                self.code.push(Instr::Branch(c, branch + 1, PENDING));
                self.scoped(a)?;
                let skip = self.here();
                self.code.push(Instr::Jump(PENDING));
                let else_at = self.here();
                self.patch(branch, else_at);
                if let Some(b) = b {
                    self.scoped(b)?;
                }
                let end = self.here();
                self.patch(skip, end);
            }
            StmtKind::For { counter, bound, body } => {
                let b = self.expr(bound)?;
                let bv = self.fresh("b");
                self.hoist(&TypeAnnot::Int, &bv);
                let j = self.fresh(counter);
                self.hoist(&TypeAnnot::Int, &j);
                self.exec(vec![Stmt::assign(&bv, b), Stmt::assign(&j, Expr::int(0))]);
                let head = self.here();
                self.code.push(Instr::Branch(Expr::bin(Op::Lt, Expr::var(&j), Expr::var(&bv)), head + 1, PENDING));
                self.loops.push(LoopTargets { breaks: vec![head], conts: Vec::new() });
                self.scopes.push(HashMap::new());
                self.bind_var(counter, &j, &TypeAnnot::IInt);
                let r = self.stmt(body);
                self.scopes.pop();
                let targets = self.loops.pop().expect("loop");
                r?;
                let incr = self.here();
                self.exec(vec![Stmt::assign(&j, Expr::bin(Op::Add, Expr::var(&j), Expr::int(1)))]);
                self.code.push(Instr::Jump(head));
                let exit = self.here();
                for at in targets.breaks {
                    self.patch(at, exit);
                }
                for at in targets.conts {
                    self.patch(at, incr);
                }
            }
            StmtKind::FunDef(fd) => self.define(fd)?,
            StmtKind::Call(f, args) => {
                let args = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                self.inline(f, args)?;
            }
            StmtKind::Break | StmtKind::Continue => {
                let at = self.here();
                self.code.push(Instr::Jump(PENDING));
                let targets = self.loops.last_mut().ok_or_else(|| {
                    TransformError::Unsupported("break or continue outside a loop".into())
                })?;
                if matches!(s.kind, StmtKind::Break) {
                    targets.breaks.push(at);
                } else {
                    targets.conts.push(at);
                }
            }
        }
        Ok(())
    }

    fn scoped(&mut self, s: &Stmt) -> Result<(), TransformError> {
        self.scopes.push(HashMap::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    /// The loop body: an `if(pc==k) … else if …` chain ending in `break`.
    fn dispatch(&self, pc: &str) -> Stmt {
        let set_pc = |k: usize| Stmt::assign(pc, Expr::int(k as u64));
        let mut chain = Stmt::new(StmtKind::Break);
        for (k, ins) in self.code.iter().enumerate().rev() {
            let step = match ins {
                Instr::Exec(ss) => {
                    let mut v = ss.clone();
                    v.push(set_pc(k + 1));
                    Stmt::block(v)
                }
                Instr::Branch(c, a, b) => Stmt::block(vec![Stmt::if_else(
                    c.clone(),
                    Stmt::block(vec![set_pc(*a)]),
                    Stmt::block(vec![set_pc(*b)]),
                )]),
                Instr::Jump(t) => Stmt::block(vec![set_pc(*t)]),
                Instr::Halve(v, n) => Stmt::block(vec![Stmt::if_else(
                    Expr::bin(Op::Gt, Expr::var(v), Expr::int(0)),
                    Stmt::block(vec![
                        Stmt::assign(v, Expr::bin(Op::Div, Expr::var(v), Expr::int(2))),
                        Stmt::assign(n, Expr::bin(Op::Add, Expr::var(n), Expr::int(1))),
                    ]),
                    Stmt::block(vec![set_pc(k + 1)]),
                )]),
            };
            let guard = Expr::bin(Op::Eq, Expr::var(pc), Expr::int(k as u64));
            chain = Stmt::if_else(guard, step, chain);
        }
        chain
    }
}
