//! Rational maps with rational coefficients, parsed from a small DSL:
//!
//! ```text
//! map      := poly ('/' poly)?
//! poly     := term (('+'|'-') term)*
//! term     := rational ('*'? 'x' ('^' nat)?)? | 'x' ('^' nat)?
//! rational := int ('/' posint)?
//! ```
//!
//! A leading sign on the first term and parentheses around either
//! polynomial are also accepted, so `(x+1)/(x-1)` and `-x+3` parse.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{ExactRational, PAdic, Prime};

pub const DEFAULT_DEGREE_CAP: usize = 64;

/// `num(x) / den(x)` with dense ascending-degree coefficient lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    num: Vec<ExactRational>,
    den: Vec<ExactRational>,
}

impl RationalMap {
    pub fn new(num: Vec<ExactRational>, den: Vec<ExactRational>) -> Result<Self> {
        let num = trimmed(num);
        let den = trimmed(den);
        if den.iter().all(Zero::is_zero) {
            return Err(Error::InvalidArgument("denominator is identically zero"));
        }
        Ok(RationalMap { num, den })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_cap(text, DEFAULT_DEGREE_CAP)
    }

    pub fn parse_with_cap(text: &str, degree_cap: usize) -> Result<Self> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
            cap: degree_cap,
        };
        let num = parser.poly_maybe_parens()?;
        parser.skip_ws();
        let den = if parser.eat(b'/') {
            parser.poly_maybe_parens()?
        } else {
            vec![ExactRational::one()]
        };
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(Error::parse(parser.pos, "unexpected trailing input"));
        }
        Self::new(num, den)
    }

    pub fn numerator(&self) -> &[ExactRational] {
        &self.num
    }

    pub fn denominator(&self) -> &[ExactRational] {
        &self.den
    }

    /// Converts the coefficients once for evaluation over `Q_p` with `prec`
    /// digits each.
    pub fn compile(&self, p: Prime, prec: u32) -> CompiledMap {
        let conv = |cs: &[ExactRational]| -> Vec<PAdic> {
            cs.iter().map(|c| PAdic::from_rational(c, p, prec)).collect()
        };
        CompiledMap {
            num: conv(&self.num),
            den: conv(&self.den),
        }
    }

    /// One-off evaluation; coefficients get `max(N, 1) + 16` digits.
    pub fn eval(&self, x: &PAdic) -> Result<PAdic> {
        let prec = x.precision().max(crate::padic::DEFAULT_PRECISION / 2) + 16;
        self.compile(x.prime(), prec).eval(x)
    }
}

/// A [`RationalMap`] with coefficients already embedded in `Q_p`.
#[derive(Clone, Debug)]
pub struct CompiledMap {
    num: Vec<PAdic>,
    den: Vec<PAdic>,
}

impl CompiledMap {
    pub fn eval(&self, x: &PAdic) -> Result<PAdic> {
        let n = horner(&self.num, x)?;
        let d = horner(&self.den, x)?;
        if d.is_exact_zero() || d.is_vanished() {
            return Err(Error::DivisionByZero);
        }
        n.checked_mul(&d.inv()?)
    }
}

fn horner(coeffs: &[PAdic], x: &PAdic) -> Result<PAdic> {
    let mut acc = PAdic::zero(x.prime());
    for c in coeffs.iter().rev() {
        acc = acc.checked_mul(x)?.checked_add(c)?;
    }
    Ok(acc)
}

fn trimmed(mut cs: Vec<ExactRational>) -> Vec<ExactRational> {
    while cs.len() > 1 && cs.last().is_some_and(Zero::is_zero) {
        cs.pop();
    }
    if cs.is_empty() {
        cs.push(ExactRational::zero());
    }
    cs
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cap: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn poly_maybe_parens(&mut self) -> Result<Vec<ExactRational>> {
        if self.eat(b'(') {
            let poly = self.poly()?;
            if !self.eat(b')') {
                return Err(Error::parse(self.pos, "expected ')'"));
            }
            Ok(poly)
        } else {
            self.poly()
        }
    }

    fn poly(&mut self) -> Result<Vec<ExactRational>> {
        let mut coeffs: Vec<ExactRational> = Vec::new();
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let (c, deg) = self.term()?;
            if deg >= coeffs.len() {
                coeffs.resize(deg + 1, ExactRational::zero());
            }
            coeffs[deg] += if negate { -c } else { c };
            negate = match self.peek() {
                Some(b'+') => false,
                Some(b'-') => true,
                _ => break,
            };
            self.pos += 1;
        }
        Ok(coeffs)
    }

    fn term(&mut self) -> Result<(ExactRational, usize)> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok((ExactRational::one(), self.power()?))
            }
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.rational()?;
                let start = self.pos;
                let starred = self.eat(b'*');
                if self.peek() == Some(b'x') {
                    self.pos += 1;
                    Ok((coeff, self.power()?))
                } else if starred {
                    Err(Error::parse(start, "expected 'x' after '*'"))
                } else {
                    Ok((coeff, 0))
                }
            }
            _ => Err(Error::parse(self.pos, "expected a coefficient or 'x'")),
        }
    }

    fn power(&mut self) -> Result<usize> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let n = self.integer()?;
        let deg = usize::try_from(&n).unwrap_or(usize::MAX);
        if deg > self.cap {
            return Err(Error::DegreeCap {
                degree: deg,
                cap: self.cap,
            });
        }
        Ok(deg)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a decimal integer"));
        }
        BigInt::parse_bytes(&self.src[start..self.pos], 10).ok_or_else(|| Error::parse(start, "bad integer"))
    }

    fn rational(&mut self) -> Result<ExactRational> {
        let n = self.integer()?;
        // '/' followed by a digit continues the rational; otherwise it is
        // the map's fraction bar
        let save = self.pos;
        if self.eat(b'/') && self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let at = self.pos;
            let d = self.integer()?;
            if d.is_zero() {
                return Err(Error::parse(at, "denominator must be positive"));
            }
            return Ok(ExactRational::new(n, d));
        }
        self.pos = save;
        Ok(ExactRational::from_integer(n))
    }
}

fn render_poly(cs: &[ExactRational], out: &mut String) -> fmt::Result {
    use core::fmt::Write;
    let mut first = true;
    for (deg, c) in cs.iter().enumerate().rev() {
        if c.is_zero() && !(cs.len() == 1) {
            continue;
        }
        let neg = c.is_negative();
        if first {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        first = false;
        let mag = c.abs();
        let unit = mag.is_one();
        if deg == 0 || !unit {
            if mag.denom().is_one() {
                write!(out, "{}", mag.numer())?;
            } else {
                write!(out, "{}/{}", mag.numer(), mag.denom())?;
                if deg > 0 {
                    out.push('*');
                }
            }
        }
        match deg {
            0 => {}
            1 => out.push('x'),
            _ => write!(out, "x^{deg}")?,
        }
    }
    Ok(())
}

fn term_count(cs: &[ExactRational]) -> usize {
    cs.iter().filter(|c| !c.is_zero()).count()
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = String::new();
        render_poly(&self.num, &mut num)?;
        let den_trivial = self.den.len() == 1 && self.den[0].is_one();
        if den_trivial {
            return f.write_str(&num);
        }
        let mut den = String::new();
        render_poly(&self.den, &mut den)?;
        let wrap = |s: &str, multi: bool| -> String {
            if multi {
                let mut w = String::from("(");
                w.push_str(s);
                w.push(')');
                w
            } else {
                String::from(s)
            }
        };
        let num_multi = term_count(&self.num) > 1 || num.starts_with('-');
        let den_multi = term_count(&self.den) > 1 || den.starts_with('-') || den.contains('/');
        write!(f, "{}/{}", wrap(&num, num_multi), wrap(&den, den_multi))
    }
}
