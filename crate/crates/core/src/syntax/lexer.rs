use super::ast::Pos;
use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Ident,
    DecLit,
    BinLit,
    OpSym,
    Punct,
    StrLit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token. For string literals this is the quoted form.
    pub lexeme: String,
    pub pos: Pos,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.lexeme == text
    }
}

pub const KEYWORDS: &[&str] = &[
    "iint", "int", "bool", "string", "istring", "array", "void", "if", "else", "for", "return",
    "true", "false", "break", "continue", "size",
];

const TWO_CHAR_OPS: &[&str] = &[">=", "<=", "==", "!=", "&&", "||", "+=", "-=", "++", "--"];
const ONE_CHAR_OPS: &str = "+-/%*<>=!";
const PUNCT: &str = "(){}[],;";

/// Splits source text into tokens. `//` comments and whitespace are dropped.
pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if KEYWORDS.contains(&word.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() {
            if c == '0' && chars.get(i + 1) == Some(&'b') {
                i += 2;
                let digits = i;
                while i < chars.len() && (chars[i] == '0' || chars[i] == '1') {
                    i += 1;
                }
                if i == digits {
                    return Err(SyntaxError::lexical(pos, "binary literal needs at least one digit"));
                }
                if i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    return Err(SyntaxError::lexical(
                        Pos::new(line, col + (i - start) as u32),
                        format!("invalid digit '{}' in binary literal", chars[i]),
                    ));
                }
                TokenKind::BinLit
            } else {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                TokenKind::DecLit
            }
        } else if c == '"' {
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(SyntaxError::lexical(pos, "unterminated string literal"))
                    }
                    Some('\\') => i += 2,
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            TokenKind::StrLit
        } else if i + 1 < chars.len()
            && TWO_CHAR_OPS.iter().any(|op| {
                let mut it = op.chars();
                it.next() == Some(c) && it.next() == Some(chars[i + 1])
            })
        {
            i += 2;
            TokenKind::OpSym
        } else if ONE_CHAR_OPS.contains(c) {
            i += 1;
            TokenKind::OpSym
        } else if PUNCT.contains(c) {
            i += 1;
            TokenKind::Punct
        } else {
            return Err(SyntaxError::lexical(pos, format!("illegal character '{c}'")));
        };

        let lexeme: String = chars[start..i].iter().collect();
        col += (i - start) as u32;
        out.push(Token { kind, lexeme, pos });
    }
    Ok(out)
}

/// Decodes the body of a quoted string literal.
pub(crate) fn unescape(quoted: &str) -> String {
    let inner = &quoted[1..quoted.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut it = inner.chars();
    while let Some(c) = it.next() {
        if c == '\\' {
            match it.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.lexeme)).collect()
    }

    #[test]
    fn declaration() {
        assert_eq!(
            kinds("iint z;"),
            vec![
                (TokenKind::Keyword, "iint".into()),
                (TokenKind::Ident, "z".into()),
                (TokenKind::Punct, ";".into())
            ]
        );
    }

    #[test]
    fn binary_literal() {
        assert_eq!(kinds("0b11111"), vec![(TokenKind::BinLit, "0b11111".into())]);
    }

    #[test]
    fn illegal_character() {
        let err = tokenize("x@y").unwrap_err();
        assert_eq!(err.pos, Pos::new(1, 2));
        assert!(err.message.contains('@'));
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("x = 1; // trailing\n  y>=2").unwrap();
        let lexemes: Vec<_> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lexemes, ["x", "=", "1", ";", "y", ">=", "2"]);
        assert_eq!(toks[4].pos, Pos::new(2, 3));
    }

    #[test]
    fn nested_generic_closers_split() {
        let lex: Vec<_> = kinds("array<array<int>>").into_iter().map(|t| t.1).collect();
        assert_eq!(lex, ["array", "<", "array", "<", "int", ">", ">"]);
    }

    #[test]
    fn string_literal_escapes_round_trip() {
        let toks = tokenize(r#""a\"b""#).unwrap();
        assert_eq!(toks[0].kind, TokenKind::StrLit);
        assert_eq!(unescape(&toks[0].lexeme), "a\"b");
        assert_eq!(escape("a\"b"), toks[0].lexeme);
    }
}
