//! Recursive-descent parser for the expression grammar.
//!
//! Sums of products of powers; `^` takes a signed integer exponent; there is
//! no `/` operator, but integer literals may carry a `/denominator` part and
//! decimal literals are read exactly. `i` is the imaginary unit and `D(u,x,..)`
//! a partial-derivative marker.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::ParseError;
use crate::scalar::{gauss, GaussianRational, Rational};

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Decimal(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match b {
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'/' => {
                    self.bump();
                    Tok::Slash
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'0'..=b'9' => self.number()?,
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => self.ident(),
                other => {
                    return Err(self.error(format!("unexpected character `{}`", other as char)))
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let mut digits = String::new();
        while let Some(b @ b'0'..=b'9') = self.peek() {
            digits.push(b as char);
            self.bump();
        }
        if self.peek() == Some(b'.') {
            self.bump();
            let mut frac = String::new();
            while let Some(b @ b'0'..=b'9') = self.peek() {
                frac.push(b as char);
                self.bump();
            }
            if frac.is_empty() {
                return Err(self.error("expected digits after decimal point"));
            }
            let scale = BigInt::from(10u8).pow(frac.len() as u32);
            let whole: BigInt = digits.parse().unwrap();
            let part: BigInt = frac.parse().unwrap();
            return Ok(Tok::Decimal(Rational::new(whole * &scale + part, scale)));
        }
        Ok(Tok::Int(digits.parse().unwrap()))
    }

    fn ident(&mut self) -> Tok {
        let mut s = String::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || b == b'_' {
                s.push(b as char);
                self.bump();
            } else {
                break;
            }
        }
        Tok::Ident(s)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn location(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.location();
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Expr::prod(vec![Expr::int(-1), t]));
                }
                _ => break,
            }
        }
        if terms.len() == 1 {
            Ok(terms.pop().unwrap())
        } else {
            Ok(Expr::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(Expr::Prod(factors))
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            let f = self.factor()?;
            return Ok(Expr::prod(vec![Expr::int(-1), f]));
        }
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let neg = if self.peek() == Some(&Tok::Minus) {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let mut e: i64 = n
                        .try_into()
                        .map_err(|_| self.error("exponent out of range"))?;
                    if neg {
                        e = -e;
                    }
                    Ok(Expr::pow(base, e))
                }
                _ => Err(self.error("expected integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(d)) => {
                            if d.is_zero() {
                                return Err(self.error("zero denominator in rational literal"));
                            }
                            Ok(Expr::Const(real(Rational::new(n, d))))
                        }
                        _ => Err(self.error("expected integer denominator after `/`")),
                    }
                } else {
                    Ok(Expr::Const(real(Rational::from_integer(n))))
                }
            }
            Some(Tok::Decimal(r)) => Ok(Expr::Const(real(r))),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident_expr(name),
            _ => Err(self.error("expected a number, symbol, function call, or `(`")),
        }
    }

    fn ident_expr(&mut self, name: String) -> Result<Expr, ParseError> {
        if name == "i" {
            return Ok(Expr::Const(gauss(
                Rational::zero(),
                Rational::one(),
            )));
        }
        if name == "D" {
            self.expect(Tok::LParen, "`(` after `D`")?;
            let mut names = Vec::new();
            loop {
                match self.bump() {
                    Some(Tok::Ident(s)) => names.push(s),
                    _ => return Err(self.error("expected a symbol name in `D(...)`")),
                }
                match self.bump() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    _ => return Err(self.error("expected `,` or `)` in `D(...)`")),
                }
            }
            if names.len() < 2 {
                return Err(self.error("`D(...)` needs a dependent symbol and at least one coordinate"));
            }
            let dep = names.remove(0);
            return Ok(Expr::Deriv { dep, coords: names });
        }
        if let Some(f) = Func::from_name(&name) {
            if self.peek() == Some(&Tok::LParen) {
                self.bump();
                let arg = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Expr::func(f, arg));
            }
            // A function name without a call acts as a plain symbol.
            return Ok(Expr::Sym(name));
        }
        Ok(Expr::Sym(name))
    }
}

fn real(r: Rational) -> GaussianRational {
    gauss(r, Rational::zero())
}

/// Parse the textual grammar into a raw AST (not yet canonicalized).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut end_line = 1;
    let mut end_col = 1;
    for ch in src.chars() {
        if ch == '\n' {
            end_line += 1;
            end_col = 1;
        } else {
            end_col += 1;
        }
    }
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
        end_col,
    };
    let e = p.sum()?;
    if p.peek().is_some() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}
