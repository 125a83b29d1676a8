use std::fmt;

/// Source position, 1-based. Not part of structural equality of AST nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Language level a source file is parsed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Core,
    Extended,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeAnnot {
    IInt,
    Int,
    Bool,
    Array(Box<TypeAnnot>),
    Str,
    IStr,
    Arrow(Vec<TypeAnnot>, Box<TypeAnnot>),
    /// `void` return sugar; behaves as `int` with an implicit `return 0;`.
    Void,
}

impl TypeAnnot {
    pub fn is_int(&self) -> bool {
        matches!(self, TypeAnnot::IInt | TypeAnnot::Int)
    }

    /// Only `iint` and `istring` may sit under `size` and bound loops.
    pub fn is_iterable(&self) -> bool {
        matches!(self, TypeAnnot::IInt | TypeAnnot::IStr)
    }

    pub fn is_stringy(&self) -> bool {
        matches!(self, TypeAnnot::Str | TypeAnnot::IStr)
    }

    pub fn array_of(elem: TypeAnnot) -> Self {
        TypeAnnot::Array(Box::new(elem))
    }
}

impl fmt::Display for TypeAnnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeAnnot::IInt => f.write_str("iint"),
            TypeAnnot::Int => f.write_str("int"),
            TypeAnnot::Bool => f.write_str("bool"),
            TypeAnnot::Array(e) => write!(f, "array<{e}>"),
            TypeAnnot::Str => f.write_str("string"),
            TypeAnnot::IStr => f.write_str("istring"),
            TypeAnnot::Void => f.write_str("void"),
            TypeAnnot::Arrow(ps, r) => {
                f.write_str("(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ") -> {r}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Div,
    Mod,
    /// Unary minus.
    Neg,
    Size,
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Ne,
    Not,
    And,
    Or,
    /// Scalar multiplication `m*a`; removed by desugaring.
    Mul,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Neg | Op::Not | Op::Size => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub | Op::Neg => "-",
            Op::Div => "/",
            Op::Mod => "%",
            Op::Size => "size",
            Op::Ge => ">=",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Lt => "<",
            Op::Eq => "==",
            Op::Ne => "!=",
            Op::Not => "!",
            Op::And => "&&",
            Op::Or => "||",
            Op::Mul => "*",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, Op::Ge | Op::Le | Op::Gt | Op::Lt | Op::Eq | Op::Ne)
    }

    pub fn is_connective(self) -> bool {
        matches!(self, Op::Not | Op::And | Op::Or)
    }

    pub fn is_arith(self) -> bool {
        matches!(self, Op::Add | Op::Sub | Op::Div | Op::Mod | Op::Neg)
    }

    /// Binding strength of the infix form; higher binds tighter.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            Op::Or => 1,
            Op::And => 2,
            Op::Eq | Op::Ne => 3,
            Op::Ge | Op::Le | Op::Gt | Op::Lt => 4,
            Op::Add | Op::Sub => 5,
            Op::Div | Op::Mod | Op::Mul => 6,
            Op::Neg | Op::Not => 7,
            Op::Size => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    /// Decimal digits, kept verbatim.
    Dec(String),
    /// Binary digits after the `0b` prefix.
    Bin(String),
    Bool(bool),
    Str(String),
}

impl Literal {
    pub fn int(n: u64) -> Self {
        Literal::Dec(n.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Const(Literal),
    Op(Op, Vec<Expr>),
    Paren(Box<Expr>),
    Call(String, Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    /// `array(len)`; element type comes from the assignment target.
    ArrayNew(Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, pos: Pos::default() }
    }

    pub fn at(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var(name.into()))
    }

    pub fn int(n: u64) -> Self {
        Expr::new(ExprKind::Const(Literal::int(n)))
    }

    pub fn boolean(b: bool) -> Self {
        Expr::new(ExprKind::Const(Literal::Bool(b)))
    }

    pub fn op(op: Op, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Op(op, args))
    }

    pub fn bin(op: Op, a: Expr, b: Expr) -> Self {
        Expr::op(op, vec![a, b])
    }

    pub fn un(op: Op, a: Expr) -> Self {
        Expr::op(op, vec![a])
    }

    pub fn size(a: Expr) -> Self {
        Expr::un(Op::Size, a)
    }

    pub fn paren(a: Expr) -> Self {
        Expr::new(ExprKind::Paren(Box::new(a)))
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call(name.into(), args))
    }

    /// Calls `f` on this node and every sub-expression, pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Var(_) | ExprKind::Const(_) => {}
            ExprKind::Op(_, args) | ExprKind::Call(_, args) => {
                for a in args {
                    a.walk(f);
                }
            }
            ExprKind::Paren(e) | ExprKind::ArrayNew(e) => e.walk(f),
            ExprKind::Index(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if let ExprKind::Var(v) | ExprKind::Call(v, _) = &e.kind {
                if v == name {
                    found = true;
                }
            }
        });
        found
    }
}

/// Assignment target: a variable or an index chain over a variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LValue {
    pub name: String,
    pub indices: Vec<Expr>,
}

impl LValue {
    pub fn var(name: impl Into<String>) -> Self {
        LValue { name: name.into(), indices: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: TypeAnnot,
    pub name: String,
}

impl Param {
    pub fn new(ty: TypeAnnot, name: impl Into<String>) -> Self {
        Param { ty, name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDef {
    pub ret: TypeAnnot,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    /// `None` only for `void` functions written without a return.
    pub ret_expr: Option<Expr>,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Stmt {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Decl(TypeAnnot, String),
    Assign(LValue, Expr),
    Block(Vec<Stmt>),
    If(Expr, Box<Stmt>, Option<Box<Stmt>>),
    For { counter: String, bound: Expr, body: Box<Stmt> },
    FunDef(FunDef),
    /// A call evaluated for its effect, e.g. `merge(arr, ...);`.
    Call(String, Vec<Expr>),
    Break,
    Continue,
    /// `x op= e`; removed by desugaring.
    Compound(LValue, Op, Expr),
    /// `x++` (true) or `x--` (false); removed by desugaring.
    Step(LValue, bool),
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt { kind, pos: Pos::default() }
    }

    pub fn at(kind: StmtKind, pos: Pos) -> Self {
        Stmt { kind, pos }
    }

    pub fn decl(ty: TypeAnnot, name: impl Into<String>) -> Self {
        Stmt::new(StmtKind::Decl(ty, name.into()))
    }

    pub fn assign(name: impl Into<String>, e: Expr) -> Self {
        Stmt::new(StmtKind::Assign(LValue::var(name), e))
    }

    pub fn block(stmts: Vec<Stmt>) -> Self {
        Stmt::new(StmtKind::Block(stmts))
    }

    pub fn if_else(c: Expr, then: Stmt, els: Stmt) -> Self {
        Stmt::new(StmtKind::If(c, Box::new(then), Some(Box::new(els))))
    }

    pub fn for_loop(counter: impl Into<String>, bound: Expr, body: Stmt) -> Self {
        Stmt::new(StmtKind::For { counter: counter.into(), bound, body: Box::new(body) })
    }

    /// Calls `f` on this statement and every nested statement, pre-order.
    /// Function bodies are included.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::Block(ss) => ss.iter().for_each(|s| s.walk(f)),
            StmtKind::If(_, a, b) => {
                a.walk(f);
                if let Some(b) = b {
                    b.walk(f);
                }
            }
            StmtKind::For { body, .. } => body.walk(f),
            StmtKind::FunDef(fd) => fd.body.iter().for_each(|s| s.walk(f)),
            _ => {}
        }
    }

    /// Expressions appearing directly in this statement (not in nested statements).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Assign(lv, e) | StmtKind::Compound(lv, _, e) => {
                let mut v: Vec<&Expr> = lv.indices.iter().collect();
                v.push(e);
                v
            }
            StmtKind::Step(lv, _) => lv.indices.iter().collect(),
            StmtKind::If(c, _, _) => vec![c],
            StmtKind::For { bound, .. } => vec![bound],
            StmtKind::Call(_, args) => args.iter().collect(),
            StmtKind::FunDef(fd) => fd.ret_expr.iter().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub ret: TypeAnnot,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub ret_expr: Expr,
}

impl Program {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn walk_stmts<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        for s in &self.body {
            s.walk(f);
        }
    }

    /// Every variable, counter, parameter and function name mentioned in the program.
    pub fn names(&self) -> std::collections::BTreeSet<String> {
        let mut out: std::collections::BTreeSet<String> =
            self.params.iter().map(|p| p.name.clone()).collect();
        let add_expr = |e: &Expr, out: &mut std::collections::BTreeSet<String>| {
            e.walk(&mut |x| {
                if let ExprKind::Var(v) | ExprKind::Call(v, _) = &x.kind {
                    out.insert(v.clone());
                }
            })
        };
        let mut stmts = Vec::new();
        self.walk_stmts(&mut |s| stmts.push(s));
        for s in stmts {
            match &s.kind {
                StmtKind::Decl(_, n) => {
                    out.insert(n.clone());
                }
                StmtKind::Assign(lv, _) | StmtKind::Compound(lv, _, _) | StmtKind::Step(lv, _) => {
                    out.insert(lv.name.clone());
                }
                StmtKind::For { counter, .. } => {
                    out.insert(counter.clone());
                }
                StmtKind::FunDef(fd) => {
                    out.insert(fd.name.clone());
                    out.extend(fd.params.iter().map(|p| p.name.clone()));
                }
                StmtKind::Call(n, _) => {
                    out.insert(n.clone());
                }
                _ => {}
            }
            for e in s.exprs() {
                add_expr(e, &mut out);
            }
        }
        add_expr(&self.ret_expr, &mut out);
        out
    }

    /// A name of the form `base`, `base1`, `base2`, ... not used anywhere in the program.
    pub fn fresh_name(&self, base: &str) -> String {
        let used = self.names();
        if !used.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| !used.contains(n))
            .expect("unbounded search")
    }
}
