//! Lexing, parsing, desugaring and printing of PolyC source.
//!
//! Surface syntax is C-like infix; the AST stores operator applications in
//! prefix form (`Op(op, args)`). Core mode accepts only the minimal language;
//! extended mode adds functions, arrays, strings, `break`/`continue` and sugar.

mod ast;
mod desugar;
mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use ast::*;
pub use desugar::{desugar, desugar_stmts};
pub use lexer::{tokenize, Token, TokenKind, KEYWORDS};
pub use parser::{parse_expr, parse_program, parse_stmts};
pub use printer::{explicit_parens, pretty_print, print_expr, print_stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    Lexical,
    Parse,
    /// A construct outside core mode was used while parsing in core mode.
    CoreFeature,
    Desugar,
}

impl SyntaxErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SyntaxErrorKind::Lexical => "lexical-error",
            SyntaxErrorKind::Parse => "syntax-error",
            SyntaxErrorKind::CoreFeature => "core-mode-violation",
            SyntaxErrorKind::Desugar => "desugar-error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {}: {message}", kind.as_str())]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn lexical(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError { kind: SyntaxErrorKind::Lexical, pos, message: message.into() }
    }

    pub(crate) fn parse(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError { kind: SyntaxErrorKind::Parse, pos, message: message.into() }
    }

    pub(crate) fn core_feature(pos: Pos, what: &str) -> Self {
        SyntaxError {
            kind: SyntaxErrorKind::CoreFeature,
            pos,
            message: format!("{what} not available in core mode"),
        }
    }

    pub(crate) fn desugar(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError { kind: SyntaxErrorKind::Desugar, pos, message: message.into() }
    }
}

/// Tokenize, parse and desugar in one step.
pub fn parse_source(src: &str, mode: Mode) -> Result<Program, SyntaxError> {
    let toks = tokenize(src)?;
    let p = parse_program(&toks, mode)?;
    desugar(&p)
}

/// Mode named by a leading `// mode: extended` line, if any.
pub fn mode_pragma(src: &str) -> Option<Mode> {
    let first = src.lines().next()?.trim();
    let rest = first.strip_prefix("//")?.trim();
    match rest.strip_prefix("mode:")?.trim() {
        "extended" => Some(Mode::Extended),
        "core" => Some(Mode::Core),
        _ => None,
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}
