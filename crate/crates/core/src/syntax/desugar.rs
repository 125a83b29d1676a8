use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::ast::*;
use super::SyntaxError;

/// Largest scalar `m` in `m*a` we expand; the expansion is linear in `m`.
const MAX_SCALAR: u64 = 4096;

/// Rewrites sugar into the core constructs:
/// `m*a` becomes `a+...+a`, `x+=e` becomes `x=x+e`, `x++` becomes `x=x+1`,
/// and an if without else gains an empty else block.
pub fn desugar(p: &Program) -> Result<Program, SyntaxError> {
    Ok(Program {
        ret: p.ret.clone(),
        params: p.params.clone(),
        body: stmts(&p.body)?,
        ret_expr: expr(&p.ret_expr)?,
    })
}

pub fn desugar_stmts(ss: &[Stmt]) -> Result<Vec<Stmt>, SyntaxError> {
    stmts(ss)
}

fn stmts(ss: &[Stmt]) -> Result<Vec<Stmt>, SyntaxError> {
    ss.iter().map(stmt).collect()
}

fn lvalue(lv: &LValue) -> Result<LValue, SyntaxError> {
    Ok(LValue { name: lv.name.clone(), indices: lv.indices.iter().map(expr).collect::<Result<_, _>>()? })
}

fn lvalue_expr(lv: &LValue, pos: Pos) -> Expr {
    lv.indices.iter().fold(Expr::at(ExprKind::Var(lv.name.clone()), pos), |base, i| {
        Expr::at(ExprKind::Index(Box::new(base), Box::new(i.clone())), pos)
    })
}

fn stmt(s: &Stmt) -> Result<Stmt, SyntaxError> {
    let pos = s.pos;
    let kind = match &s.kind {
        StmtKind::Decl(..) | StmtKind::Break | StmtKind::Continue => s.kind.clone(),
        StmtKind::Assign(lv, e) => StmtKind::Assign(lvalue(lv)?, expr(e)?),
        StmtKind::Compound(lv, op, e) => {
            let lv = lvalue(lv)?;
            let rhs = Expr::at(ExprKind::Op(*op, vec![lvalue_expr(&lv, pos), expr(e)?]), pos);
            StmtKind::Assign(lv, rhs)
        }
        StmtKind::Step(lv, up) => {
            let lv = lvalue(lv)?;
            let op = if *up { Op::Add } else { Op::Sub };
            let rhs = Expr::at(ExprKind::Op(op, vec![lvalue_expr(&lv, pos), Expr::at(ExprKind::Const(Literal::int(1)), pos)]), pos);
            StmtKind::Assign(lv, rhs)
        }
        StmtKind::Block(ss) => StmtKind::Block(stmts(ss)?),
        StmtKind::If(c, a, b) => {
            let els = match b {
                Some(b) => stmt(b)?,
                None => Stmt::at(StmtKind::Block(Vec::new()), pos),
            };
            StmtKind::If(expr(c)?, Box::new(stmt(a)?), Some(Box::new(els)))
        }
        StmtKind::For { counter, bound, body } => {
            StmtKind::For { counter: counter.clone(), bound: expr(bound)?, body: Box::new(stmt(body)?) }
        }
        StmtKind::FunDef(fd) => StmtKind::FunDef(FunDef {
            ret: fd.ret.clone(),
            name: fd.name.clone(),
            params: fd.params.clone(),
            body: stmts(&fd.body)?,
            ret_expr: fd.ret_expr.as_ref().map(expr).transpose()?,
        }),
        StmtKind::Call(f, args) => StmtKind::Call(f.clone(), args.iter().map(expr).collect::<Result<_, _>>()?),
    };
    Ok(Stmt::at(kind, pos))
}

fn scalar(e: &Expr) -> Option<Result<u64, ()>> {
    let digits = match &e.kind {
        ExprKind::Const(Literal::Dec(d)) => BigUint::parse_bytes(d.as_bytes(), 10),
        ExprKind::Const(Literal::Bin(b)) => BigUint::parse_bytes(b.as_bytes(), 2),
        _ => return None,
    };
    Some(digits.and_then(|n| n.to_u64()).filter(|&m| m <= MAX_SCALAR).ok_or(()))
}

pub(crate) fn expr(e: &Expr) -> Result<Expr, SyntaxError> {
    let pos = e.pos;
    let kind = match &e.kind {
        ExprKind::Var(_) | ExprKind::Const(_) => e.kind.clone(),
        ExprKind::Op(Op::Mul, args) => {
            let (m, a) = match (scalar(&args[0]), scalar(&args[1])) {
                (Some(m), _) => (m, &args[1]),
                (None, Some(m)) => (m, &args[0]),
                (None, None) => {
                    return Err(SyntaxError::desugar(
                        pos,
                        "general multiplication prohibited: one factor of '*' must be an integer literal",
                    ))
                }
            };
            let m = m.map_err(|_| {
                SyntaxError::desugar(pos, format!("scalar factor exceeds the expansion limit {MAX_SCALAR}"))
            })?;
            let a = expr(a)?;
            if m == 0 {
                return Ok(Expr::at(ExprKind::Const(Literal::int(0)), pos));
            }
            let mut acc = a.clone();
            for _ in 1..m {
                acc = Expr::at(ExprKind::Op(Op::Add, vec![acc, a.clone()]), pos);
            }
            return Ok(acc);
        }
        ExprKind::Op(op, args) => ExprKind::Op(*op, args.iter().map(expr).collect::<Result<_, _>>()?),
        ExprKind::Paren(inner) => ExprKind::Paren(Box::new(expr(inner)?)),
        ExprKind::Call(f, args) => ExprKind::Call(f.clone(), args.iter().map(expr).collect::<Result<_, _>>()?),
        ExprKind::Index(a, i) => ExprKind::Index(Box::new(expr(a)?), Box::new(expr(i)?)),
        ExprKind::ArrayNew(n) => ExprKind::ArrayNew(Box::new(expr(n)?)),
    };
    Ok(Expr::at(kind, pos))
}
