//! Program inputs written on the command line.

use std::fmt;

use num_bigint::BigInt;
use polyc::interp::{ArrayRef, Value};
use polyc::syntax::TypeAnnot;

/// Surface form of one program input: signed decimal, `0b` binary,
/// `true`/`false`, a bracketed comma list, or a double-quoted string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgLiteral {
    Int(BigInt),
    Bool(bool),
    Str(String),
    List(Vec<ArgLiteral>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgError(pub String);

impl fmt::Display for ArgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl ArgLiteral {
    pub fn parse(text: &str) -> Result<Self, ArgError> {
        let mut r = Reader { s: text.as_bytes(), i: 0, text };
        let lit = r.literal()?;
        r.skip_ws();
        if r.i != r.s.len() {
            return Err(r.error("trailing characters"));
        }
        Ok(lit)
    }

    /// The value of this literal as an input of type `t`. A string-typed
    /// input may also be written without quotes.
    pub fn to_value(&self, t: &TypeAnnot) -> Result<Value, ArgError> {
        match (self, t) {
            (ArgLiteral::Int(n), TypeAnnot::Int | TypeAnnot::IInt) => Ok(Value::Int(n.clone())),
            (ArgLiteral::Bool(b), TypeAnnot::Bool) => Ok(Value::Bool(*b)),
            (ArgLiteral::Str(s), TypeAnnot::Str | TypeAnnot::IStr) => Ok(Value::str(s)),
            (ArgLiteral::List(xs), TypeAnnot::Array(elem)) => {
                let elems = xs.iter().map(|x| x.to_value(elem)).collect::<Result<_, _>>()?;
                Ok(Value::Array(ArrayRef::new((**elem).clone(), elems)))
            }
            _ => Err(ArgError(format!("expected a value of type {t}, found {self}"))),
        }
    }
}

/// Parses `text` as an input of type `t`.
pub fn parse_arg(text: &str, t: &TypeAnnot) -> Result<Value, ArgError> {
    if matches!(t, TypeAnnot::Str | TypeAnnot::IStr) && !text.starts_with('"') {
        return Ok(Value::str(text));
    }
    ArgLiteral::parse(text)?.to_value(t)
}

impl fmt::Display for ArgLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgLiteral::Int(n) => write!(f, "{n}"),
            ArgLiteral::Bool(b) => write!(f, "{b}"),
            ArgLiteral::Str(s) => write!(f, "{s:?}"),
            ArgLiteral::List(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
        }
    }
}

struct Reader<'a> {
    s: &'a [u8],
    i: usize,
    text: &'a str,
}

impl Reader<'_> {
    fn error(&self, what: &str) -> ArgError {
        ArgError(format!("invalid argument '{}': {what} at offset {}", self.text, self.i))
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.i).is_some_and(u8::is_ascii_whitespace) {
            self.i += 1;
        }
    }

    fn literal(&mut self) -> Result<ArgLiteral, ArgError> {
        self.skip_ws();
        match self.s.get(self.i) {
            Some(b'[') => {
                self.i += 1;
                let mut xs = Vec::new();
                self.skip_ws();
                if self.s.get(self.i) == Some(&b']') {
                    self.i += 1;
                    return Ok(ArgLiteral::List(xs));
                }
                loop {
                    xs.push(self.literal()?);
                    self.skip_ws();
                    match self.s.get(self.i) {
                        Some(b',') => self.i += 1,
                        Some(b']') => {
                            self.i += 1;
                            return Ok(ArgLiteral::List(xs));
                        }
                        _ => return Err(self.error("expected ',' or ']'")),
                    }
                }
            }
            Some(b'"') => self.string(),
            Some(_) => {
                let start = self.i;
                while self.s.get(self.i).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'-' || *c == b'+') {
                    self.i += 1;
                }
                let word = &self.text[start..self.i];
                scalar(word).ok_or_else(|| ArgError(format!("invalid argument '{}': cannot read '{word}'", self.text)))
            }
            None => Err(self.error("expected a value")),
        }
    }

    fn string(&mut self) -> Result<ArgLiteral, ArgError> {
        self.i += 1;
        let mut out = String::new();
        let rest = &self.text[self.i..];
        let mut chars = rest.char_indices();
        while let Some((k, c)) = chars.next() {
            match c {
                '"' => {
                    self.i += k + 1;
                    return Ok(ArgLiteral::Str(out));
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, c @ ('"' | '\\'))) => out.push(c),
                    _ => return Err(self.error("bad escape in string")),
                },
                c => out.push(c),
            }
        }
        Err(self.error("unterminated string"))
    }
}

fn scalar(word: &str) -> Option<ArgLiteral> {
    match word {
        "true" => return Some(ArgLiteral::Bool(true)),
        "false" => return Some(ArgLiteral::Bool(false)),
        _ => {}
    }
    let (neg, digits) = match word.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, word.strip_prefix('+').unwrap_or(word)),
    };
    let n = match digits.strip_prefix("0b") {
        Some(bits) if !bits.is_empty() && bits.bytes().all(|c| c == b'0' || c == b'1') => {
            BigInt::parse_bytes(bits.as_bytes(), 2)?
        }
        Some(_) => return None,
        None if !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit()) => {
            BigInt::parse_bytes(digits.as_bytes(), 10)?
        }
        None => return None,
    };
    Some(ArgLiteral::Int(if neg { -n } else { n }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> ArgLiteral {
        ArgLiteral::Int(BigInt::from(n))
    }

    #[test]
    fn scalars() {
        assert_eq!(ArgLiteral::parse("42").unwrap(), int(42));
        assert_eq!(ArgLiteral::parse("-7").unwrap(), int(-7));
        assert_eq!(ArgLiteral::parse("0b11111").unwrap(), int(31));
        assert_eq!(ArgLiteral::parse("-0b10").unwrap(), int(-2));
        assert_eq!(ArgLiteral::parse("true").unwrap(), ArgLiteral::Bool(true));
        assert_eq!(ArgLiteral::parse("\"a\\\"b\"").unwrap(), ArgLiteral::Str("a\"b".into()));
        let big = "340282366920938463463374607431768211456";
        assert_eq!(ArgLiteral::parse(big).unwrap().to_string(), big);
    }

    #[test]
    fn lists() {
        assert_eq!(ArgLiteral::parse("[1, 2,-3]").unwrap(), ArgLiteral::List(vec![int(1), int(2), int(-3)]));
        assert_eq!(ArgLiteral::parse("[]").unwrap(), ArgLiteral::List(vec![]));
        assert_eq!(ArgLiteral::parse("[[1],[]]").unwrap().to_string(), "[[1],[]]");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "0b", "0b12", "12x", "[1,", "[1 2]", "\"open", "1]", "tru"] {
            assert!(ArgLiteral::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn typed_conversion() {
        let arr = TypeAnnot::Array(Box::new(TypeAnnot::Int));
        assert_eq!(parse_arg("[1,2]", &arr).unwrap().to_string(), "[1,2]");
        assert!(parse_arg("[true]", &arr).is_err());
        assert!(parse_arg("[[1]]", &arr).is_err());
        assert!(parse_arg("true", &TypeAnnot::Int).is_err());
        assert_eq!(parse_arg("0110", &TypeAnnot::IStr).unwrap(), Value::str("0110"));
        assert_eq!(parse_arg("\"0110\"", &TypeAnnot::Str).unwrap(), Value::str("0110"));
        assert_eq!(parse_arg("0b101", &TypeAnnot::IInt).unwrap(), Value::int(5));
    }
}
