//! Recursive-descent parser for the polynomial expression language, and the
//! canonical formatter (its inverse on canonical forms).
//!
//! Grammar:
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*        -- "/" only by a nonzero constant
//! unary  := "-" unary | factor
//! factor := base ("^" UINT)?
//! base   := RATIONAL | IDENT | "(" expr ")"
//! RATIONAL := INT ("/" INT)?
//! ```
//! Identifiers must be declared variables. Implicit multiplication is not
//! allowed. Exponents are non-negative integer literals.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{MultiPoly, Rational, Vars};

/// Parse failure with 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => alloc::format!("integer `{s}`"),
            Tok::Ident(s) => alloc::format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { line: self.line, col: self.col, message }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokens(mut self) -> Result<Vec<(Tok, u32, u32)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match c {
                b'+' => { self.bump(); Tok::Plus }
                b'-' => { self.bump(); Tok::Minus }
                b'*' => { self.bump(); Tok::Star }
                b'/' => { self.bump(); Tok::Slash }
                b'^' => { self.bump(); Tok::Caret }
                b'(' => { self.bump(); Tok::LParen }
                b')' => { self.bump(); Tok::RParen }
                b'0'..=b'9' => {
                    let mut s = String::new();
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        s.push(self.bump() as char);
                    }
                    Tok::Int(s)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        s.push(self.bump() as char);
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(self.error(alloc::format!(
                        "unexpected character `{}`",
                        other as char
                    )))
                }
            };
            out.push((tok, line, col));
        }
        out.push((Tok::Eof, self.line, self.col));
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, u32, u32)>,
    pos: usize,
    vars: &'a Arc<Vars>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn error(&self, message: String) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, message }
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.advance();
            Ok(())
        } else {
            Err(self.error(alloc::format!(
                "expected {}, found {}",
                t.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs).expect("same vars");
                }
                Tok::Minus => {
                    self.advance();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs).expect("same vars");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs).expect("same vars");
                }
                Tok::Slash => {
                    let (line, col) = self.here();
                    self.advance();
                    let rhs = self.unary()?;
                    if !rhs.is_constant() {
                        return Err(ParseError {
                            line,
                            col,
                            message: "division only by a nonzero rational constant".into(),
                        });
                    }
                    let c = rhs.constant_term();
                    if c.is_zero() {
                        return Err(ParseError { line, col, message: "division by zero".into() });
                    }
                    acc = acc.scale(&(Rational::one() / c));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly, ParseError> {
        if *self.peek() == Tok::Minus {
            self.advance();
            let inner = self.unary()?;
            Ok(inner.neg())
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.advance();
            match self.advance() {
                Tok::Int(digits) => {
                    let e: u32 = digits.parse().map_err(|_| {
                        self.error(alloc::format!("exponent `{digits}` is too large"))
                    })?;
                    Ok(base.pow(e))
                }
                other => Err(self.error(alloc::format!(
                    "exponent must be a non-negative integer literal, found {}",
                    other.describe()
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<MultiPoly, ParseError> {
        let (line, col) = self.here();
        match self.advance() {
            Tok::Int(digits) => {
                let n: BigInt = digits.parse().expect("digits");
                Ok(MultiPoly::constant(self.vars, Rational::from(n)))
            }
            Tok::Ident(name) => match MultiPoly::var(self.vars, &name) {
                Ok(p) => Ok(p),
                Err(_) => Err(ParseError {
                    line,
                    col,
                    message: alloc::format!("unknown variable `{name}`"),
                }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(ParseError {
                line,
                col,
                message: alloc::format!(
                    "expected a number, variable or `(`, found {}",
                    other.describe()
                ),
            }),
        }
    }
}

/// Parse an expression into canonical expanded form over the given variables.
pub fn parse_poly(src: &str, vars: &Arc<Vars>) -> Result<MultiPoly, ParseError> {
    let toks = Lexer::new(src).tokens()?;
    let mut parser = Parser { toks, pos: 0, vars };
    let p = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(alloc::format!(
            "unexpected {} after expression",
            parser.peek().describe()
        )));
    }
    Ok(p)
}

/// Canonical formatter: terms in descending graded-lex order, rational
/// coefficients as `p/q`, explicit `*` and `^`. `parse_poly` of the output
/// reproduces the polynomial.
pub fn format_poly(p: &MultiPoly) -> String {
    use num_traits::Signed;
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mag = c.abs();
        let mut factors: Vec<String> = Vec::new();
        if !mag.is_one() || m.total_degree() == 0 {
            factors.push(super::format_rat(&mag));
        }
        for (vi, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                factors.push(p.vars().name(vi).to_string());
            } else {
                factors.push(alloc::format!("{}^{}", p.vars().name(vi), e));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}
