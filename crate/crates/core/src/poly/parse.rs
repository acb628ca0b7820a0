//! Text form of polynomials: `x1..x{4n}`, `t`, `i`, `+ - * / ^`, decimals and parentheses.

use std::fmt;

use super::{group_nvars, Poly, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
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

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, column: c0 });
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Spanned { tok: Tok::Num(text), line: l0, column: c0 });
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Spanned { tok: Tok::Ident(text), line: l0, column: c0 });
        } else {
            return Err(err(l0, c0, format!("unexpected character `{c}`")));
        }
        column += i - start;
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser<R: Real> {
    toks: Vec<Spanned>,
    pos: usize,
    nvars: usize,
    _marker: std::marker::PhantomData<R>,
}

impl<R: Real> Parser<R> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Poly<R>> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<R>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                    self.check_size(&acc)?;
                }
                Tok::Slash => {
                    let at = self.bump();
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(err(at.line, at.column, "division only by a nonzero constant"));
                    }
                    let c = d.constant_term();
                    let inv = c.conj() / Cx::new(c.norm_sqr(), R::zero());
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly<R>> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly<R>> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.bump();
        let k = match &at.tok {
            Tok::Num(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                s.parse::<u32>().map_err(|_| err(at.line, at.column, "exponent too large"))?
            }
            _ => return Err(err(at.line, at.column, "expected a non-negative integer exponent")),
        };
        if k as usize * base.degree() > MAX_DEGREE {
            return Err(err(at.line, at.column, format!("degree exceeds {MAX_DEGREE}")));
        }
        Ok(base.pow(k))
    }

    fn atom(&mut self) -> Result<Poly<R>> {
        let at = self.bump();
        match &at.tok {
            Tok::Num(s) => {
                let v =
                    R::parse_decimal(s).ok_or_else(|| err(at.line, at.column, format!("malformed number `{s}`")))?;
                Ok(Poly::real_constant(self.nvars, v))
            }
            Tok::Ident(name) => self.ident(name, at.line, at.column),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(err(close.line, close.column, "expected `)`"));
                }
                Ok(inner)
            }
            Tok::End => Err(err(at.line, at.column, "unexpected end of input")),
            other => Err(err(at.line, at.column, format!("unexpected token {other:?}"))),
        }
    }

    fn ident(&self, name: &str, line: usize, column: usize) -> Result<Poly<R>> {
        if name == "t" {
            return Ok(Poly::var(self.nvars, self.nvars - 1));
        }
        if name == "i" {
            return Ok(Poly::constant(self.nvars, Cx::new(R::zero(), R::one())));
        }
        if let Some(idx) = name.strip_prefix('x') {
            if let Ok(a) = idx.parse::<usize>() {
                if (1..self.nvars).contains(&a) && !idx.starts_with('0') {
                    return Ok(Poly::var(self.nvars, a - 1));
                }
                return Err(err(line, column, format!("variable `{name}` out of range x1..x{}", self.nvars - 1)));
            }
        }
        Err(err(line, column, format!("unknown identifier `{name}`")))
    }

    fn check_size(&self, p: &Poly<R>) -> Result<()> {
        let at = self.peek();
        if p.degree() > MAX_DEGREE {
            return Err(err(at.line, at.column, format!("degree exceeds {MAX_DEGREE}")));
        }
        Ok(())
    }
}

/// Parses a polynomial on the group of half-dimension `n`.
pub fn parse_poly<R: Real>(src: &str, n: usize) -> Result<Poly<R>> {
    super::check_group_n(n)?;
    parse_poly_vars(src, group_nvars(n))
}

/// Parses a polynomial in `x1..x{nvars-1}, t`.
pub fn parse_poly_vars<R: Real>(src: &str, nvars: usize) -> Result<Poly<R>> {
    let toks = lex(src)?;
    let mut p = Parser::<R> { toks, pos: 0, nvars, _marker: std::marker::PhantomData };
    let out = p.expr()?;
    let end = p.peek().clone();
    if end.tok != Tok::End {
        return Err(err(end.line, end.column, format!("unexpected token {:?}", end.tok)));
    }
    Ok(out)
}

fn var_name(nvars: usize, v: usize) -> String {
    if v + 1 == nvars {
        "t".to_string()
    } else {
        format!("x{}", v + 1)
    }
}

impl<R: Real> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms().enumerate() {
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = var_name(self.nvars(), v);
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            let (negative, coeff) = if c.im.is_zero() {
                let mag = c.re.abs();
                let text = (!(mag.is_one() && !monomial.is_empty())).then(|| mag.to_string());
                (c.re.is_negative(), text)
            } else if c.re.is_zero() {
                let mag = c.im.abs();
                let text = if mag.is_one() { "i".to_string() } else { format!("{mag}*i") };
                (c.im.is_negative(), Some(text))
            } else {
                let sign = if c.im.is_negative() { "-" } else { "+" };
                (false, Some(format!("({} {sign} {}*i)", c.re, c.im.abs())))
            };
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mut parts: Vec<String> = coeff.into_iter().collect();
            parts.extend(monomial);
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}
