use std::collections::HashMap;

use crate::syntax::{Expr, Op, Program, Stmt, StmtKind, TypeAnnot};

/// Variable types visible at a program point, for picking integer assignments.
type Scope = HashMap<String, TypeAnnot>;

fn gt(a: Expr, b: Expr) -> Expr {
    Expr::bin(Op::Gt, a, b)
}

fn neg(a: Expr) -> Expr {
    Expr::un(Op::Neg, a)
}

/// `if(e>o){o=e;}else{}`
fn capture(e: Expr, o: &str) -> Stmt {
    Stmt::if_else(gt(e.clone(), Expr::var(o)), Stmt::block(vec![Stmt::assign(o, e)]), Stmt::block(Vec::new()))
}

/// Adds a fresh `int o` tracking the largest absolute value assigned to any
/// integer variable (and of the result), and returns `o` instead.
pub fn t1_max_tracker(p: &Program) -> Program {
    let o = p.fresh_name("o");
    let mut scope: Scope = p.params.iter().map(|q| (q.name.clone(), q.ty.clone())).collect();
    let lead = p.body.iter().take_while(|s| matches!(s.kind, StmtKind::Decl(..))).count();
    let mut body: Vec<Stmt> = Vec::new();
    for s in &p.body[..lead] {
        body.push(t1_stmt(s, &o, &mut scope));
    }
    body.push(Stmt::decl(TypeAnnot::Int, &o));
    for s in &p.body[lead..] {
        body.push(t1_stmt(s, &o, &mut scope));
    }
    let e = p.ret_expr.clone();
    let paren = Expr::paren(e.clone());
    body.push(capture(e, &o));
    body.push(capture(neg(paren), &o));
    Program { ret: p.ret.clone(), params: p.params.clone(), body, ret_expr: Expr::var(&o) }
}

fn t1_stmt(s: &Stmt, o: &str, scope: &mut Scope) -> Stmt {
    let kind = match &s.kind {
        StmtKind::Decl(t, x) => {
            scope.insert(x.clone(), t.clone());
            return s.clone();
        }
        StmtKind::Assign(lv, _) if lv.indices.is_empty() && scope.get(&lv.name).is_some_and(TypeAnnot::is_int) => {
            let x = Expr::var(&lv.name);
            StmtKind::Block(vec![s.clone(), capture(x.clone(), o), capture(neg(x), o)])
        }
        StmtKind::Block(ss) => {
            let mut inner = scope.clone();
            StmtKind::Block(ss.iter().map(|s| t1_stmt(s, o, &mut inner)).collect())
        }
        StmtKind::If(c, a, b) => StmtKind::If(
            c.clone(),
            Box::new(t1_stmt(a, o, &mut scope.clone())),
            b.as_ref().map(|b| Box::new(t1_stmt(b, o, &mut scope.clone()))),
        ),
        StmtKind::For { counter, bound, body } => {
            let mut inner = scope.clone();
            inner.insert(counter.clone(), TypeAnnot::IInt);
            StmtKind::For { counter: counter.clone(), bound: bound.clone(), body: Box::new(t1_stmt(body, o, &mut inner)) }
        }
        StmtKind::FunDef(fd) => {
            scope.insert(fd.name.clone(), TypeAnnot::Arrow(Vec::new(), Box::new(fd.ret.clone())));
            return s.clone();
        }
        _ => return s.clone(),
    };
    Stmt::at(kind, s.pos)
}

/// Adds a fresh `int o` that doubles at every declaration, assignment and
/// empty block, so `size(o) − 1` counts the executed sites.
pub fn t2_cost_tracker(p: &Program) -> Program {
    let o = p.fresh_name("o");
    let mut body = vec![Stmt::decl(TypeAnnot::Int, &o), Stmt::assign(&o, Expr::int(1))];
    t2_seq(&p.body, &o, &mut body);
    Program { ret: p.ret.clone(), params: p.params.clone(), body, ret_expr: p.ret_expr.clone() }
}

fn double(o: &str) -> Stmt {
    Stmt::assign(o, Expr::bin(Op::Add, Expr::var(o), Expr::var(o)))
}

/// Declarations in a sequence stay unbraced so their scope still covers the
/// statements after them.
fn t2_seq(ss: &[Stmt], o: &str, out: &mut Vec<Stmt>) {
    for s in ss {
        if let StmtKind::Decl(..) = s.kind {
            out.push(s.clone());
            out.push(double(o));
        } else {
            out.push(t2_stmt(s, o));
        }
    }
}

fn t2_stmt(s: &Stmt, o: &str) -> Stmt {
    let kind = match &s.kind {
        StmtKind::Decl(..) | StmtKind::Assign(..) => StmtKind::Block(vec![s.clone(), double(o)]),
        StmtKind::Block(ss) if ss.is_empty() => StmtKind::Block(vec![double(o)]),
        StmtKind::Block(ss) => {
            let mut inner = Vec::new();
            t2_seq(ss, o, &mut inner);
            StmtKind::Block(inner)
        }
        StmtKind::If(c, a, b) => {
            StmtKind::If(c.clone(), Box::new(t2_stmt(a, o)), b.as_ref().map(|b| Box::new(t2_stmt(b, o))))
        }
        StmtKind::For { counter, bound, body } => {
            StmtKind::For { counter: counter.clone(), bound: bound.clone(), body: Box::new(t2_stmt(body, o)) }
        }
        _ => return s.clone(),
    };
    Stmt::at(kind, s.pos)
}
