//! Recursive-descent parser for the chart expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | primary ('^' ['-'] integer)?
//! primary:= number | coordinate | '(' expr ')' | func '(' expr ')'
//! coordinate := x(i) | y(s[;j,..]) | v(s;[j,..]|p) | P(s;j,..)
//! ```
//!
//! Exponents are accepted after any primary. Decimal literals are converted
//! to exact rationals.

use num_bigint::BigInt;
use num_traits::Pow;

use super::expr::{Expr, Func, Rational};
use super::{ChartContext, Coord, MultiIndex};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a ChartContext,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            let found = self.peek().map(|c| format!("'{}'", c as char)).unwrap_or_else(|| "end of input".into());
            Err(syntax(self.pos, format!("expected '{}', found {found}", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc += self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.factor()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.factor()?;
                if d.is_zero() {
                    return Err(syntax(at, "division by constant zero"));
                }
                acc = acc.div(&d);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(-self.factor()?);
        }
        let base = self.primary()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let at = self.pos;
            let k = self.integer()?;
            let k: i32 = k.try_into().map_err(|_| syntax(at, "exponent too large"))?;
            let k = if neg { -k } else { k };
            if k < 0 && base.is_zero() {
                return Err(syntax(at, "negative power of constant zero"));
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(start, "expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().map_err(|_| syntax(start, "integer too large"))
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut value = Rational::from_integer(int_part.parse::<BigInt>().map_err(|_| syntax(start, "bad number"))?);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if fs == self.pos {
                return Err(syntax(fs, "expected digits after decimal point"));
            }
            let frac = std::str::from_utf8(&self.src[fs..self.pos]).unwrap();
            let num: BigInt = frac.parse().unwrap();
            let den: BigInt = BigInt::from(10u32).pow(frac.len() as u32);
            value += Rational::new(num, den);
        }
        Ok(Expr::constant(value))
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn index(&mut self) -> Result<u8> {
        let at = self.pos;
        let v = self.integer()?;
        u8::try_from(v).map_err(|_| Error::IndexOutOfRange(format!("index {v} at position {at}")))
    }

    fn index_list(&mut self, terminators: &[u8]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        match self.peek() {
            Some(c) if terminators.contains(&c) => return Ok(out),
            _ => {}
        }
        out.push(self.index()?);
        while self.eat(b',') {
            out.push(self.index()?);
        }
        Ok(out)
    }

    fn coordinate(&mut self, name: &str, at: usize) -> Result<Coord> {
        self.expect(b'(')?;
        let c = match name {
            "x" => Coord::Base(self.index()?),
            "y" => {
                let s = self.index()?;
                let j = if self.eat(b';') { self.index_list(b")")? } else { Vec::new() };
                Coord::Jet(s, MultiIndex::new(j))
            }
            "v" => {
                let s = self.index()?;
                self.expect(b';')?;
                let j = self.index_list(b"|")?;
                self.expect(b'|')?;
                let p = self.index()?;
                Coord::Vel(s, MultiIndex::new(j), p)
            }
            "P" => {
                let s = self.index()?;
                self.expect(b';')?;
                let j = self.index_list(b")")?;
                if j.is_empty() {
                    return Err(syntax(self.pos, "momentum needs at least one index"));
                }
                Coord::Mom(s, MultiIndex::new(j))
            }
            _ => return Err(syntax(at, format!("unknown identifier '{name}'"))),
        };
        self.expect(b')')?;
        self.ctx.validate(&c)?;
        Ok(c)
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => Err(syntax(at, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                if let Some(f) = Func::from_name(name) {
                    self.expect(b'(')?;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    Ok(Expr::apply(f, arg))
                } else {
                    Ok(Expr::coord(self.coordinate(name, at)?))
                }
            }
            Some(c) => Err(syntax(at, format!("unexpected character '{}'", c as char))),
        }
    }
}

/// Parses expression text against a chart, validating every coordinate.
pub fn parse_expr(text: &str, ctx: &ChartContext) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ctx };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(syntax(p.pos, format!("unexpected trailing '{}'", c as char)));
    }
    Ok(e)
}

/// Parses a single coordinate such as `y(1;1,2)` or `P(2;1)`.
pub fn parse_coord(text: &str, ctx: &ChartContext) -> Result<Coord> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ctx };
    p.skip_ws();
    let at = p.pos;
    let name = p.ident();
    let c = p.coordinate(name, at)?;
    if let Some(ch) = p.peek() {
        return Err(syntax(p.pos, format!("unexpected trailing '{}'", ch as char)));
    }
    Ok(c)
}
