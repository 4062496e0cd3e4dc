//! Text form of polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | NAME | '(' expr ')'
//! ```
//!
//! Integer literals are reduced into the prime subfield. Over `F_{p^s}`
//! with `s > 1` the name `x` denotes the generator of the field. So
//! `-A3^2` parses as `-(A3^2)`.

use crate::error::{Error, Result};
use crate::ff::{FieldSpec, FqElem};
use crate::multipoly::MultiPoly;

const MAX_EXPONENT: u32 = 4096;

/// Ordered variable names; index `i` in a `MultiPoly` is `names[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variables {
    names: Vec<String>,
}

impl Variables {
    pub fn new(names: Vec<String>) -> Self {
        Variables { names }
    }

    /// `A_{d-1}, ..., A_1`, the coordinates of a family member.
    pub fn coefficients(d: usize) -> Self {
        Variables { names: (1..d).rev().map(|j| format!("A{j}")).collect() }
    }

    /// `Y_1, ..., Y_s`.
    pub fn symmetric(s: usize) -> Self {
        Variables { names: (1..=s).map(|j| format!("Y{j}")).collect() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub fn parse_poly_expr(text: &str, field: &FieldSpec, vars: &Variables) -> Result<MultiPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, field, vars };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FieldSpec,
    vars: &'a Variables,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.add(self.field, &rhs)? } else { acc.sub(self.field, &rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(self.field, &rhs)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg(self.field));
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.err("expected exponent"));
            }
            let e: u32 = match std::str::from_utf8(digits).unwrap().parse() {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => return Err(Error::Parse { pos: start, msg: format!("exponent exceeds {MAX_EXPONENT}") }),
            };
            return Ok(base.pow(self.field, e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let n = self.vars.len();
        match self.peek() {
            None => Err(self.err("expected operand, found end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.field.p();
                let v = self.digits().iter().fold(0u64, |v, &b| (v * 10 + (b - b'0') as u64) % p);
                Ok(MultiPoly::constant(n, self.field.from_int(v as i64)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(i) = self.vars.index_of(name) {
                    return MultiPoly::var(self.field, n, i);
                }
                if name == "x" {
                    if let Some(g) = self.field.generator() {
                        return Ok(MultiPoly::constant(n, g));
                    }
                }
                Err(Error::UnknownVariable { name: name.to_string(), pos: start })
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
        }
    }
}

fn format_coeff(field: &FieldSpec, c: FqElem) -> String {
    let s = field.format(c);
    if field.s() == 1 || s.bytes().all(|b| b.is_ascii_digit()) {
        s
    } else {
        format!("({s})")
    }
}

/// Renders `g` in the grammar above, highest terms first.
pub fn to_expr(field: &FieldSpec, g: &MultiPoly, vars: &Variables) -> String {
    let mut parts = Vec::new();
    for (m, c) in g.terms().rev() {
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(vars.names[i].clone()),
                _ => factors.push(format!("{}^{e}", vars.names[i])),
            }
        }
        if factors.is_empty() {
            parts.push(format_coeff(field, c));
        } else if c == field.one() {
            parts.push(factors.join("*"));
        } else {
            parts.push(format!("{}*{}", format_coeff(field, c), factors.join("*")));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
