//! Recursive-descent parser for polynomial expressions over a chart.
//!
//! ```text
//! expr     := ('+' | '-')? term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := primary ('^' natural)*
//! primary  := rational | coordinate | '(' expr ')'
//! rational := integer ('/' positive-integer)?
//! ```
//!
//! Products are formed left to right, so `t2*t1` with odd `t1, t2` is
//! `-t1*t2`. Exponents above one are only allowed on even operands.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use qclass_core::{Chart, Parity, SuperPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn error(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                chars.next();
                column += 1;
            }
            if chars.peek() == Some(&'.') {
                return Err(error(
                    Pos { line, column },
                    "decimal numbers are not supported; write a fraction",
                ));
            }
            out.push((Tok::Int(digits.parse().expect("digits")), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                name.push(d);
                chars.next();
                column += 1;
            }
            out.push((Tok::Ident(name), pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(error(pos, format!("unexpected character `{other}`"))),
        };
        chars.next();
        column += 1;
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, column }));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    chart: &'a Arc<Chart>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<SuperPolynomial, ParseError> {
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            let sign = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            self.bump();
            let t = self.term()?;
            acc = if sign { &acc - &t } else { &acc + &t };
        }
    }

    fn term(&mut self) -> Result<SuperPolynomial, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        match self.peek() {
            Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                Err(error(self.pos(), format!("expected `*` before {}", self.peek())))
            }
            _ => Ok(acc),
        }
    }

    fn factor(&mut self) -> Result<SuperPolynomial, ParseError> {
        let start = self.pos();
        let (mut value, mut description) = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let (tok, pos) = self.bump();
            let Tok::Int(n) = tok else {
                return Err(error(pos, format!("expected a natural exponent, found {tok}")));
            };
            let n: u32 = n.try_into().map_err(|_| error(pos, "exponent is too large"))?;
            if n > 1 && value.parity() != Some(Parity::Even) {
                return Err(error(
                    start,
                    format!("{description} is not even and cannot be raised to the power {n}"),
                ));
            }
            value = value.pow(n);
            description = "the base".into();
        }
        Ok(value)
    }

    fn primary(&mut self) -> Result<(SuperPolynomial, String), ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(n) => {
                let mut q = BigRational::from_integer(n);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let (tok, dpos) = self.bump();
                    let Tok::Int(d) = tok else {
                        return Err(error(
                            dpos,
                            format!("expected a positive integer denominator, found {tok}"),
                        ));
                    };
                    if !d.is_positive() {
                        return Err(error(dpos, "denominator must be positive"));
                    }
                    q /= BigRational::from_integer(d);
                }
                Ok((SuperPolynomial::constant(self.chart, q), "constant".into()))
            }
            Tok::Ident(name) => {
                let Some(i) = self.chart.index_of(&name) else {
                    return Err(error(pos, format!("unknown identifier `{name}`")));
                };
                let p = SuperPolynomial::coordinate(self.chart, i).expect("index from chart");
                let what = if self.chart.parity(i).is_odd() {
                    "odd coordinate"
                } else {
                    "coordinate"
                };
                Ok((p, format!("{what} `{name}`")))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let (close, cpos) = self.bump();
                if close != Tok::RParen {
                    return Err(error(cpos, format!("expected `)`, found {close}")));
                }
                Ok((inner, "parenthesized expression".into()))
            }
            other => Err(error(
                pos,
                format!("expected a number, coordinate or `(`, found {other}"),
            )),
        }
    }
}

/// Parses `src` into a polynomial on `chart`.
pub fn parse_expression(src: &str, chart: &Arc<Chart>) -> Result<SuperPolynomial, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0, chart };
    if *p.peek() == Tok::End {
        return Err(error(p.pos(), "empty expression"));
    }
    let value = p.expr()?;
    match p.peek() {
        Tok::End => Ok(value),
        Tok::RParen => Err(error(p.pos(), "unbalanced `)`")),
        other => Err(error(p.pos(), format!("unexpected {other}"))),
    }
}

/// Parses a constant expression (no coordinates may remain after
/// simplification).
pub fn parse_constant(src: &str, chart: &Arc<Chart>) -> Result<BigRational, ParseError> {
    let p = parse_expression(src, chart)?;
    if p.terms().any(|(m, _)| !m.is_one()) {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: format!("expected a constant, found `{p}`"),
        });
    }
    Ok(p.constant_term())
}
