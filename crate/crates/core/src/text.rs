//! Text grammar for polynomials in `x` and `y`.
//!
//! ```text
//! poly   := ['-'] term (('+'|'-') term)*
//! term   := coef ('*' factor)* | factor ('*' factor)*
//! coef   := integer | '(' ['-'] integer '/' positive-integer ')'
//! factor := ('x'|'y') ('^' positive-integer)?
//! ```
//!
//! Whitespace between tokens is ignored. The formatter writes terms in the
//! canonical monomial order with inline minus signs, suppresses unit
//! coefficients and parenthesizes non-integer ones.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Monomial, Poly};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
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

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", b as char))
        }
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digit run parses"))
    }

    fn positive(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let n = self.digits()?;
        if n.is_zero() {
            return Err(ParseError {
                offset: start,
                message: "expected a positive integer".into(),
            });
        }
        Ok(n)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let n = self.positive()?;
        u32::try_from(n).map_err(|_| ParseError {
            offset: start,
            message: "exponent too large".into(),
        })
    }

    fn factor(&mut self) -> Result<Monomial, ParseError> {
        let m = match self.peek() {
            Some(b'x') => Monomial::new(1, 0),
            Some(b'y') => Monomial::new(0, 1),
            _ => return self.err("expected 'x' or 'y'"),
        };
        self.pos += 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(Monomial::new(m.ex * e, m.ey * e));
        }
        Ok(m)
    }

    fn coef(&mut self) -> Result<Rational, ParseError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = self.digits()?;
            self.expect(b'/')?;
            let d = self.positive()?;
            self.expect(b')')?;
            let q = Rational::new(n, d);
            return Ok(if neg { -q } else { q });
        }
        Ok(Rational::from_integer(self.digits()?))
    }

    fn term(&mut self) -> Result<(Rational, Monomial), ParseError> {
        let (c, mut m) = match self.peek() {
            Some(b'x') | Some(b'y') => (Rational::one(), self.factor()?),
            Some(b'(') | Some(b'0'..=b'9') => (self.coef()?, Monomial::ONE),
            None => return self.err("unexpected end of input"),
            Some(_) => return self.err("expected a coefficient, 'x' or 'y'"),
        };
        while self.peek() == Some(b'*') {
            self.pos += 1;
            m = m * self.factor()?;
        }
        Ok((c, m))
    }

    fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut out = Poly::zero();
        let mut sign = if self.peek() == Some(b'-') {
            self.pos += 1;
            -1
        } else {
            1
        };
        loop {
            let (c, m) = self.term()?;
            out.add_term(m, if sign < 0 { -c } else { c });
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                None => return Ok(out),
                Some(_) => return self.err("expected '+', '-' or end of input"),
            }
            self.pos += 1;
        }
    }
}

pub fn parse_poly(text: &str) -> Result<Poly, ParseError> {
    Parser {
        src: text.as_bytes(),
        pos: 0,
    }
    .poly()
}

pub(crate) fn write_monomial(f: &mut impl fmt::Write, m: Monomial, vars: [&str; 2]) -> fmt::Result {
    if m == Monomial::ONE {
        return f.write_str("1");
    }
    let mut first = true;
    for (v, e) in vars.iter().zip([m.ex, m.ey]) {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(v)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_magnitude(out: &mut String, c: &Rational) {
    use fmt::Write;
    let c = c.abs();
    if c.is_integer() {
        let _ = write!(out, "{}", c.numer());
    } else {
        let _ = write!(out, "({}/{})", c.numer(), c.denom());
    }
}

/// Formats `p` with the given variable names, e.g. `["dx", "dy"]` for
/// differential-operator symbols.
pub fn format_poly_with(p: &Poly, vars: [&str; 2]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let unit = c.abs().is_one();
        if *m == Monomial::ONE {
            write_magnitude(&mut out, c);
        } else {
            if !unit {
                write_magnitude(&mut out, c);
                out.push('*');
            }
            let _ = write_monomial(&mut out, *m, vars);
        }
    }
    out
}

pub fn format_poly(p: &Poly) -> String {
    format_poly_with(p, ["x", "y"])
}
