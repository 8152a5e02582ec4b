//! Recursive-descent parser for the expression syntax.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?          right-associative
//! exponent:= '-'? (integer | '(' expr ')' | atom '^' exponent)
//! atom    := number | 't' | 'x'k | 'y'k | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `-x^2` reads as `-(x^2)`. Exponents must fold to integers. Decimal
//! literals are converted to exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{Expr, Func, Node, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    IndexOutOfRange { name: String, n: usize },
    NonIntegerExponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub position: usize,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier `{id}`"),
            ParseErrorKind::IndexOutOfRange { name, n } => {
                write!(f, "`{name}` is out of range for dimension {n}")
            }
            ParseErrorKind::NonIntegerExponent => write!(f, "exponent is not an integer"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let tok = lx.next()?;
            let end = tok.0 == Tok::End;
            out.push(tok);
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let c = c as char;
        if c.is_ascii_digit() || c == '.' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit()) {
                self.pos += 1;
            }
            let int_part = &self.src[start..self.pos];
            let mut frac = "";
            if bytes.get(self.pos) == Some(&b'.') {
                self.pos += 1;
                let fs = self.pos;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                frac = &self.src[fs..self.pos];
            }
            if int_part.is_empty() && frac.is_empty() {
                return Err(syntax(start, "malformed number"));
            }
            let digits = format!("{int_part}{frac}");
            let num: BigInt = digits.parse().map_err(|_| syntax(start, "malformed number"))?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok((Tok::Num(BigRational::new(num, den)), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while self.pos < bytes.len()
                && ((bytes[self.pos] as char).is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or(c);
        Err(syntax(start, &format!("unexpected character `{ch}`")))
    }
}

fn syntax(position: usize, msg: &str) -> ParseError {
    ParseError {
        kind: ParseErrorKind::Syntax(msg.to_string()),
        position,
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    n: usize,
}

/// Parses `text` as an expression over `t, x1..xn, y1..yn`.
///
/// The returned tree is raw (not simplified), mirroring the input.
pub fn parse(text: &str, n: usize) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, n };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(syntax(p.pos(), "unexpected trailing input")),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), &format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(Expr::raw(Node::Neg(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::raw(Node::Add(terms))
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        let mut factors: Vec<Expr> = Vec::new();
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(std::mem::replace(&mut acc, self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    factors.push(acc);
                    let num = if factors.len() == 1 {
                        factors.pop().unwrap()
                    } else {
                        Expr::raw(Node::Mul(std::mem::take(&mut factors)))
                    };
                    acc = Expr::raw(Node::Div(num, rhs));
                }
                _ => break,
            }
        }
        if factors.is_empty() {
            Ok(acc)
        } else {
            factors.push(acc);
            Ok(Expr::raw(Node::Mul(factors)))
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::raw(Node::Neg(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let k = self.exponent()?;
        Ok(Expr::raw(Node::Pow(base, k)))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let start = self.pos();
        let e = if *self.peek() == Tok::Op('-') {
            self.bump();
            Expr::raw(Node::Neg(self.power()?))
        } else {
            self.power()?
        };
        let folded = e.simplify();
        let c = folded.as_const().filter(|c| c.is_integer()).ok_or(ParseError {
            kind: ParseErrorKind::NonIntegerExponent,
            position: start,
        })?;
        c.to_integer().to_i32().ok_or(ParseError {
            kind: ParseErrorKind::Syntax("exponent too large".into()),
            position: start,
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(c) => Ok(Expr::constant(c)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::raw(Node::Func(f, arg)));
                }
                self.variable(&name, pos).map(Expr::var)
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            Tok::Op(c) => Err(syntax(pos, &format!("unexpected `{c}`"))),
        }
    }

    fn variable(&self, name: &str, position: usize) -> Result<Var, ParseError> {
        if name == "t" {
            return Ok(Var::T);
        }
        let unknown = || ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            position,
        };
        let (head, digits) = name.split_at(1);
        let numeric = !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit());
        if !(head == "x" || head == "y") || !numeric {
            return Err(unknown());
        }
        let idx: usize = digits.parse().map_err(|_| unknown())?;
        if idx == 0 || idx > self.n {
            return Err(ParseError {
                kind: ParseErrorKind::IndexOutOfRange {
                    name: name.to_string(),
                    n: self.n,
                },
                position,
            });
        }
        Ok(if head == "x" {
            Var::X(idx as u16)
        } else {
            Var::Y(idx as u16)
        })
    }
}
