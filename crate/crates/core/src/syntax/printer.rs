use super::ast::*;
use super::lexer::escape;

/// Renders a program as `.pc` source that parses back to the same AST.
pub fn pretty_print(p: &Program) -> String {
    let mut w = Writer::default();
    w.line(&format!("{} main({}) {{", p.ret, params(&p.params)));
    w.depth += 1;
    for s in &p.body {
        w.stmt(s);
    }
    w.line(&format!("return {};", print_expr(&p.ret_expr)));
    w.depth -= 1;
    w.line("}");
    w.out
}

pub fn print_stmt(s: &Stmt) -> String {
    let mut w = Writer::default();
    w.stmt(s);
    w.out
}

fn params(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} {}", p.ty, p.name)).collect::<Vec<_>>().join(", ")
}

#[derive(Default)]
struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    /// Writes `head` followed by `s`, keeping blocks on the head line.
    fn headed(&mut self, head: &str, s: &Stmt) {
        match &s.kind {
            StmtKind::Block(ss) if ss.is_empty() => self.line(&format!("{head} {{ }}")),
            StmtKind::Block(ss) => {
                self.line(&format!("{head} {{"));
                self.depth += 1;
                ss.iter().for_each(|s| self.stmt(s));
                self.depth -= 1;
                self.line("}");
            }
            _ => {
                self.line(head);
                self.depth += 1;
                self.stmt(s);
                self.depth -= 1;
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Decl(t, x) => self.line(&format!("{t} {x};")),
            StmtKind::Assign(lv, e) => self.line(&format!("{}={};", lvalue(lv), print_expr(e))),
            StmtKind::Compound(lv, op, e) => {
                self.line(&format!("{}{}={};", lvalue(lv), op.symbol(), print_expr(e)))
            }
            StmtKind::Step(lv, up) => self.line(&format!("{}{};", lvalue(lv), if *up { "++" } else { "--" })),
            StmtKind::Block(ss) if ss.is_empty() => self.line("{ }"),
            StmtKind::Block(ss) => {
                self.line("{");
                self.depth += 1;
                ss.iter().for_each(|s| self.stmt(s));
                self.depth -= 1;
                self.line("}");
            }
            StmtKind::If(c, a, b) => self.if_chain("", c, a, b.as_deref()),
            StmtKind::For { counter, bound, body } => {
                self.headed(&format!("for({counter}<{})", print_expr(bound)), body)
            }
            StmtKind::FunDef(fd) => {
                self.line(&format!("{} {}({}) {{", fd.ret, fd.name, params(&fd.params)));
                self.depth += 1;
                fd.body.iter().for_each(|s| self.stmt(s));
                if let Some(e) = &fd.ret_expr {
                    self.line(&format!("return {};", print_expr(e)));
                }
                self.depth -= 1;
                self.line("}");
            }
            StmtKind::Call(f, args) => self.line(&format!("{f}({});", print_args(args))),
            StmtKind::Break => self.line("break;"),
            StmtKind::Continue => self.line("continue;"),
        }
    }

    /// Writes an if statement whose first line starts with `lead` (used for
    /// `} else if` chains).
    fn if_chain(&mut self, lead: &str, c: &Expr, a: &Stmt, b: Option<&Stmt>) {
        let head = format!("{lead}if({})", print_expr(c));
        let Some(b) = b else {
            self.headed(&head, a);
            return;
        };
        let else_lead = match &a.kind {
            StmtKind::Block(ss) if ss.is_empty() => format!("{head} {{ }} else"),
            StmtKind::Block(ss) => {
                self.line(&format!("{head} {{"));
                self.depth += 1;
                ss.iter().for_each(|s| self.stmt(s));
                self.depth -= 1;
                "} else".to_string()
            }
            _ => {
                self.headed(&head, a);
                "else".to_string()
            }
        };
        match &b.kind {
            StmtKind::If(c2, a2, b2) => self.if_chain(&format!("{else_lead} "), c2, a2, b2.as_deref()),
            _ => self.headed(&else_lead, b),
        }
    }
}

fn lvalue(lv: &LValue) -> String {
    let mut s = lv.name.clone();
    for i in &lv.indices {
        s.push('[');
        s.push_str(&print_expr(i));
        s.push(']');
    }
    s
}

fn print_args(args: &[Expr]) -> String {
    args.iter().map(print_expr).collect::<Vec<_>>().join(",")
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Dec(d) => d.clone(),
        Literal::Bin(b) => format!("0b{b}"),
        Literal::Bool(b) => b.to_string(),
        Literal::Str(s) => escape(s),
    }
}

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Op(op, _) if *op != Op::Size => op.precedence(),
        _ => u8::MAX,
    }
}

/// Infix rendering with the minimum parentheses needed to re-parse the same tree.
pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Var(x) => x.clone(),
        ExprKind::Const(l) => literal(l),
        ExprKind::Paren(inner) => format!("({})", print_expr(inner)),
        ExprKind::Call(f, args) => format!("{f}({})", print_args(args)),
        ExprKind::Index(a, i) => {
            let base = if prec(a) < u8::MAX { format!("({})", print_expr(a)) } else { print_expr(a) };
            format!("{base}[{}]", print_expr(i))
        }
        ExprKind::ArrayNew(n) => format!("array({})", print_expr(n)),
        ExprKind::Op(Op::Size, args) => format!("size({})", print_args(args)),
        ExprKind::Op(op, args) if args.len() == 1 => {
            let inner = &args[0];
            let body = if prec(inner) < op.precedence() {
                format!("({})", print_expr(inner))
            } else {
                print_expr(inner)
            };
            join(op.symbol(), &body)
        }
        ExprKind::Op(op, args) => {
            let p = op.precedence();
            let mut lhs = print_expr(&args[0]);
            if prec(&args[0]) < p {
                lhs = format!("({lhs})");
            }
            let mut rhs = print_expr(&args[1]);
            if prec(&args[1]) <= p {
                rhs = format!("({rhs})");
            }
            format!("{lhs}{}", join(op.symbol(), &rhs))
        }
    }
}

/// Inserts a `Paren` node wherever `print_expr` would have to add
/// parentheses, so that printing and re-parsing reproduces the tree exactly.
pub fn explicit_parens(e: &Expr) -> Expr {
    let wrap = |child: &Expr, needed: bool| {
        let c = explicit_parens(child);
        if needed {
            Expr::at(ExprKind::Paren(Box::new(c)), child.pos)
        } else {
            c
        }
    };
    let kind = match &e.kind {
        ExprKind::Var(_) | ExprKind::Const(_) => e.kind.clone(),
        ExprKind::Paren(inner) => ExprKind::Paren(Box::new(explicit_parens(inner))),
        ExprKind::Call(f, args) => ExprKind::Call(f.clone(), args.iter().map(explicit_parens).collect()),
        ExprKind::Index(a, i) => ExprKind::Index(Box::new(wrap(a, prec(a) < u8::MAX)), Box::new(explicit_parens(i))),
        ExprKind::ArrayNew(n) => ExprKind::ArrayNew(Box::new(explicit_parens(n))),
        ExprKind::Op(Op::Size, args) => ExprKind::Op(Op::Size, args.iter().map(explicit_parens).collect()),
        ExprKind::Op(op, args) if args.len() == 1 => {
            ExprKind::Op(*op, vec![wrap(&args[0], prec(&args[0]) < op.precedence())])
        }
        ExprKind::Op(op, args) => {
            let p = op.precedence();
            ExprKind::Op(*op, vec![wrap(&args[0], prec(&args[0]) < p), wrap(&args[1], prec(&args[1]) <= p)])
        }
    };
    Expr::at(kind, e.pos)
}

/// Glues an operator symbol to its right operand without forming `--`.
fn join(sym: &str, rhs: &str) -> String {
    if sym == "-" && rhs.starts_with('-') {
        format!("{sym} {rhs}")
    } else {
        format!("{sym}{rhs}")
    }
}
