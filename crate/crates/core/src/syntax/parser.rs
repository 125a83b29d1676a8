use super::ast::*;
use super::lexer::{unescape, Token, TokenKind};
use super::SyntaxError;

/// Parses a whole program. Top-level function definitions (extended mode) are
/// placed, in order, at the front of the main body, where they are ordinary
/// function-definition statements.
pub fn parse_program(tokens: &[Token], mode: Mode) -> Result<Program, SyntaxError> {
    let mut p = Parser { toks: tokens, at: 0, mode };
    let prog = p.program()?;
    if let Some(t) = p.peek() {
        return Err(SyntaxError::parse(t.pos, format!("unexpected '{}' after end of main", t.lexeme)));
    }
    Ok(prog)
}

/// Parses a single expression; used by tests and tools.
pub fn parse_expr(tokens: &[Token], mode: Mode) -> Result<Expr, SyntaxError> {
    let mut p = Parser { toks: tokens, at: 0, mode };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(SyntaxError::parse(t.pos, format!("unexpected '{}'", t.lexeme)));
    }
    Ok(e)
}

/// Parses a statement sequence; used by tests and tools.
pub fn parse_stmts(tokens: &[Token], mode: Mode) -> Result<Vec<Stmt>, SyntaxError> {
    let mut p = Parser { toks: tokens, at: 0, mode };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.extend(p.stmt()?);
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    at: usize,
    mode: Mode,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.at)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.at + k)
    }

    fn here(&self) -> Pos {
        match self.peek() {
            Some(t) => t.pos,
            None => self.toks.last().map(|t| t.pos).unwrap_or(Pos::new(1, 1)),
        }
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.at);
        self.at += 1;
        t
    }

    fn check(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.lexeme == text && t.kind != TokenKind::StrLit)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.check(text) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> Result<&'a Token, SyntaxError> {
        match self.peek() {
            Some(t) if t.lexeme == text && t.kind != TokenKind::StrLit => {
                self.at += 1;
                Ok(t)
            }
            Some(t) => Err(SyntaxError::parse(t.pos, format!("expected '{text}', found '{}'", t.lexeme))),
            None => Err(SyntaxError::parse(self.here(), format!("expected '{text}', found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.at += 1;
                Ok((t.lexeme.clone(), t.pos))
            }
            Some(t) => Err(SyntaxError::parse(t.pos, format!("expected identifier, found '{}'", t.lexeme))),
            None => Err(SyntaxError::parse(self.here(), "expected identifier, found end of input")),
        }
    }

    fn core_violation(&self, pos: Pos, what: &str) -> Result<(), SyntaxError> {
        if self.mode == Mode::Core {
            Err(SyntaxError::core_feature(pos, what))
        } else {
            Ok(())
        }
    }

    fn at_type(&self) -> bool {
        matches!(
            self.peek(),
            Some(t) if t.kind == TokenKind::Keyword
                && matches!(t.lexeme.as_str(), "iint" | "int" | "bool" | "string" | "istring" | "array" | "void")
        )
    }

    fn type_annot(&mut self) -> Result<TypeAnnot, SyntaxError> {
        let t = self
            .next()
            .ok_or_else(|| SyntaxError::parse(self.here(), "expected a type, found end of input"))?;
        let ty = match t.lexeme.as_str() {
            "iint" => TypeAnnot::IInt,
            "int" => TypeAnnot::Int,
            "bool" => TypeAnnot::Bool,
            "string" => {
                self.core_violation(t.pos, "strings")?;
                TypeAnnot::Str
            }
            "istring" => {
                self.core_violation(t.pos, "strings")?;
                TypeAnnot::IStr
            }
            "void" => {
                self.core_violation(t.pos, "void functions")?;
                TypeAnnot::Void
            }
            "array" => {
                self.core_violation(t.pos, "arrays")?;
                self.expect("<")?;
                let elem = self.type_annot()?;
                self.expect(">")?;
                TypeAnnot::array_of(elem)
            }
            other => return Err(SyntaxError::parse(t.pos, format!("expected a type, found '{other}'"))),
        };
        Ok(ty)
    }

    fn params(&mut self) -> Result<Vec<Param>, SyntaxError> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.check(")") {
            loop {
                let ty = self.type_annot()?;
                let (name, pos) = self.ident()?;
                if params.iter().any(|p: &Param| p.name == name) {
                    return Err(SyntaxError::parse(pos, format!("duplicate parameter '{name}'")));
                }
                params.push(Param::new(ty, name));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    fn program(&mut self) -> Result<Program, SyntaxError> {
        let mut prelude = Vec::new();
        loop {
            let pos = self.here();
            if !self.at_type() {
                return Err(SyntaxError::parse(pos, "expected 'int main(...)'"));
            }
            let is_main = self.peek_at(1).is_some_and(|t| t.lexeme == "main")
                || (self.check("array") && self.main_after_array_type());
            if is_main {
                break;
            }
            self.core_violation(pos, "function definitions")?;
            let ret = self.type_annot()?;
            prelude.push(self.fundef_rest(ret, pos)?);
        }

        let main_pos = self.here();
        let ret = self.type_annot()?;
        if self.mode == Mode::Core && ret != TypeAnnot::Int {
            return Err(SyntaxError::core_feature(main_pos, "non-int main return type"));
        }
        let (name, npos) = self.ident()?;
        if name != "main" {
            return Err(SyntaxError::parse(npos, format!("expected 'main', found '{name}'")));
        }
        let params = self.params()?;
        if self.mode == Mode::Core {
            if let Some(p) = params.iter().find(|p| p.ty != TypeAnnot::Int) {
                return Err(SyntaxError::core_feature(
                    main_pos,
                    &format!("parameter '{}' of type {}", p.name, p.ty),
                ));
            }
        }
        self.expect("{")?;
        let mut body = prelude;
        while !self.check("return") {
            if self.peek().is_none() || self.check("}") {
                return Err(SyntaxError::parse(self.here(), "expected 'return' at the end of main"));
            }
            body.extend(self.stmt()?);
        }
        self.expect("return")?;
        let ret_expr = self.expr()?;
        self.expect(";")?;
        self.expect("}")?;
        Ok(Program { ret, params, body, ret_expr })
    }

    /// Looks past an `array<...>` type to see whether `main` follows.
    fn main_after_array_type(&self) -> bool {
        let mut k = 0;
        let mut depth = 0i32;
        loop {
            match self.peek_at(k) {
                Some(t) if t.lexeme == "<" => depth += 1,
                Some(t) if t.lexeme == ">" => {
                    depth -= 1;
                    if depth == 0 {
                        return self.peek_at(k + 1).is_some_and(|t| t.lexeme == "main");
                    }
                }
                Some(_) => {}
                None => return false,
            }
            k += 1;
        }
    }

    fn fundef_rest(&mut self, ret: TypeAnnot, pos: Pos) -> Result<Stmt, SyntaxError> {
        let (name, _) = self.ident()?;
        let params = self.params()?;
        self.expect("{")?;
        let mut body = Vec::new();
        let mut ret_expr = None;
        loop {
            if self.eat("return") {
                ret_expr = Some(self.expr()?);
                self.expect(";")?;
                self.expect("}")?;
                break;
            }
            if self.eat("}") {
                if ret != TypeAnnot::Void {
                    return Err(SyntaxError::parse(self.here(), format!("function '{name}' must end with a return")));
                }
                break;
            }
            if self.peek().is_none() {
                return Err(SyntaxError::parse(self.here(), "unterminated function body"));
            }
            body.extend(self.stmt()?);
        }
        Ok(Stmt::at(StmtKind::FunDef(FunDef { ret, name, params, body, ret_expr }), pos))
    }

    /// A statement used where exactly one is required (branches, loop bodies).
    fn single_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let pos = self.here();
        let mut ss = self.stmt()?;
        if ss.len() == 1 {
            Ok(ss.pop().unwrap())
        } else {
            Ok(Stmt::at(StmtKind::Block(ss), pos))
        }
    }

    /// One source statement; declaration lists expand to several.
    fn stmt(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let tok = match self.peek() {
            Some(t) => t,
            None => return Err(SyntaxError::parse(self.here(), "expected a statement, found end of input")),
        };
        let pos = tok.pos;
        let one = |kind| Ok(vec![Stmt::at(kind, pos)]);

        if self.eat("{") {
            let mut body = Vec::new();
            while !self.eat("}") {
                if self.peek().is_none() {
                    return Err(SyntaxError::parse(self.here(), "expected '}', found end of input"));
                }
                body.extend(self.stmt()?);
            }
            return one(StmtKind::Block(body));
        }
        if self.eat("if") {
            self.expect("(")?;
            let c = self.expr()?;
            self.expect(")")?;
            let then = self.single_stmt()?;
            let els = if self.eat("else") {
                Some(Box::new(self.single_stmt()?))
            } else {
                self.core_violation(pos, "if without else")?;
                None
            };
            return one(StmtKind::If(c, Box::new(then), els));
        }
        if self.eat("for") {
            self.expect("(")?;
            let (counter, _) = self.ident()?;
            self.expect("<")?;
            let bound = self.loop_bound()?;
            self.expect(")")?;
            let body = self.single_stmt()?;
            return one(StmtKind::For { counter, bound, body: Box::new(body) });
        }
        if self.check("break") || self.check("continue") {
            let brk = self.check("break");
            self.at += 1;
            self.core_violation(pos, if brk { "break" } else { "continue" })?;
            self.expect(";")?;
            return one(if brk { StmtKind::Break } else { StmtKind::Continue });
        }
        if self.check("return") {
            return Err(SyntaxError::parse(pos, "'return' is only allowed at the end of a function body"));
        }
        if self.at_type() {
            let ty = self.type_annot()?;
            if self.peek_at(1).is_some_and(|t| t.lexeme == "(") {
                self.core_violation(pos, "function definitions")?;
                return Ok(vec![self.fundef_rest(ty, pos)?]);
            }
            if ty == TypeAnnot::Void {
                return Err(SyntaxError::parse(pos, "'void' is only a function return type"));
            }
            let mut out = Vec::new();
            loop {
                let (name, npos) = self.ident()?;
                out.push(Stmt::at(StmtKind::Decl(ty.clone(), name.clone()), npos));
                if self.check("=") {
                    self.core_violation(self.here(), "declaration initializers")?;
                    self.at += 1;
                    let e = self.expr()?;
                    out.push(Stmt::at(StmtKind::Assign(LValue::var(name), e), npos));
                }
                if !self.check(",") {
                    break;
                }
                self.core_violation(self.here(), "multiple declarators")?;
                self.at += 1;
            }
            self.expect(";")?;
            return Ok(out);
        }
        if tok.kind == TokenKind::Ident {
            if self.peek_at(1).is_some_and(|t| t.lexeme == "(") {
                self.core_violation(pos, "function calls")?;
                let (name, _) = self.ident()?;
                let args = self.args()?;
                self.expect(";")?;
                return one(StmtKind::Call(name, args));
            }
            let lv = self.lvalue()?;
            let op_tok = self
                .next()
                .ok_or_else(|| SyntaxError::parse(self.here(), "expected '=' after assignment target"))?;
            let kind = match op_tok.lexeme.as_str() {
                "=" => StmtKind::Assign(lv, self.expr()?),
                "+=" | "-=" => {
                    self.core_violation(op_tok.pos, "compound assignment")?;
                    let op = if op_tok.lexeme == "+=" { Op::Add } else { Op::Sub };
                    StmtKind::Compound(lv, op, self.expr()?)
                }
                "++" | "--" => {
                    self.core_violation(op_tok.pos, "increment/decrement")?;
                    StmtKind::Step(lv, op_tok.lexeme == "++")
                }
                other => {
                    return Err(SyntaxError::parse(op_tok.pos, format!("expected '=', found '{other}'")))
                }
            };
            self.expect(";")?;
            return one(kind);
        }
        Err(SyntaxError::parse(pos, format!("expected a statement, found '{}'", tok.lexeme)))
    }

    fn lvalue(&mut self) -> Result<LValue, SyntaxError> {
        let (name, _) = self.ident()?;
        let mut indices = Vec::new();
        while self.check("[") {
            self.core_violation(self.here(), "arrays")?;
            self.at += 1;
            indices.push(self.expr()?);
            self.expect("]")?;
        }
        Ok(LValue { name, indices })
    }

    /// `size(e)` or a non-negative integer literal.
    fn loop_bound(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.here();
        match self.peek() {
            Some(t) if t.is(TokenKind::Keyword, "size") => {
                self.at += 1;
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(Expr::at(ExprKind::Op(Op::Size, vec![e]), pos))
            }
            Some(t) if matches!(t.kind, TokenKind::DecLit | TokenKind::BinLit) => {
                self.at += 1;
                Ok(Expr::at(ExprKind::Const(int_literal(t)), pos))
            }
            Some(t) => Err(SyntaxError::parse(
                t.pos,
                format!("loop bound must be size(e) or an integer literal, found '{}'", t.lexeme),
            )),
            None => Err(SyntaxError::parse(pos, "expected loop bound, found end of input")),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.check(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.binary(1)
    }

    fn binary_op(&self, min_prec: u8) -> Option<Op> {
        let t = self.peek()?;
        if t.kind != TokenKind::OpSym {
            return None;
        }
        let op = match t.lexeme.as_str() {
            "||" => Op::Or,
            "&&" => Op::And,
            "==" => Op::Eq,
            "!=" => Op::Ne,
            ">=" => Op::Ge,
            "<=" => Op::Le,
            ">" => Op::Gt,
            "<" => Op::Lt,
            "+" => Op::Add,
            "-" => Op::Sub,
            "/" => Op::Div,
            "%" => Op::Mod,
            "*" => Op::Mul,
            _ => return None,
        };
        (op.precedence() >= min_prec).then_some(op)
    }

    /// Precedence climbing over the left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op(min_prec) {
            let pos = self.here();
            self.at += 1;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::at(ExprKind::Op(op, vec![lhs, rhs]), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.here();
        if self.eat("!") {
            let e = self.unary()?;
            return Ok(Expr::at(ExprKind::Op(Op::Not, vec![e]), pos));
        }
        if self.eat("-") {
            let e = self.unary()?;
            return Ok(Expr::at(ExprKind::Op(Op::Neg, vec![e]), pos));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.primary()?;
        while self.check("[") {
            let pos = self.here();
            self.core_violation(pos, "indexing")?;
            self.at += 1;
            let idx = self.expr()?;
            self.expect("]")?;
            e = Expr::at(ExprKind::Index(Box::new(e), Box::new(idx)), pos);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.here();
        let t = match self.next() {
            Some(t) => t,
            None => return Err(SyntaxError::parse(pos, "expected an expression, found end of input")),
        };
        let kind = match t.kind {
            TokenKind::DecLit | TokenKind::BinLit => ExprKind::Const(int_literal(t)),
            TokenKind::StrLit => {
                self.core_violation(pos, "string literals")?;
                ExprKind::Const(Literal::Str(unescape(&t.lexeme)))
            }
            TokenKind::Keyword => match t.lexeme.as_str() {
                "true" => ExprKind::Const(Literal::Bool(true)),
                "false" => ExprKind::Const(Literal::Bool(false)),
                "size" => {
                    self.expect("(")?;
                    let e = self.expr()?;
                    self.expect(")")?;
                    ExprKind::Op(Op::Size, vec![e])
                }
                "array" => {
                    self.core_violation(pos, "arrays")?;
                    self.expect("(")?;
                    let e = self.expr()?;
                    self.expect(")")?;
                    ExprKind::ArrayNew(Box::new(e))
                }
                other => return Err(SyntaxError::parse(pos, format!("expected an expression, found '{other}'"))),
            },
            TokenKind::Ident => {
                if self.check("(") {
                    self.core_violation(pos, "function calls")?;
                    let args = self.args()?;
                    ExprKind::Call(t.lexeme.clone(), args)
                } else {
                    ExprKind::Var(t.lexeme.clone())
                }
            }
            TokenKind::Punct if t.lexeme == "(" => {
                let e = self.expr()?;
                self.expect(")")?;
                ExprKind::Paren(Box::new(e))
            }
            _ => return Err(SyntaxError::parse(pos, format!("expected an expression, found '{}'", t.lexeme))),
        };
        Ok(Expr::at(kind, pos))
    }
}

fn int_literal(t: &Token) -> Literal {
    match t.kind {
        TokenKind::BinLit => Literal::Bin(t.lexeme[2..].to_string()),
        _ => Literal::Dec(t.lexeme.clone()),
    }
}
