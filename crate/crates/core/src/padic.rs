//! Finite-precision arithmetic in `Q_p`.
//!
//! A nonzero [`PAdic`] is `p^v * u` where `u` is a unit known modulo `p^N`,
//! so the value itself is known modulo `p^(v+N)` (its absolute precision).
//! Two zero states exist: the exact zero, and a zero that is only known
//! modulo `p^k` because every known digit cancelled. The latter is a
//! legitimate intermediate result but raises [`Error::PrecisionExhausted`]
//! when something needs its norm or its inverse.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::{max, min};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Inputs and measures are exact rationals.
pub type ExactRational = BigRational;

/// Working precision used when nothing else is specified.
pub const DEFAULT_PRECISION: u32 = 32;

/// A prime number, checked by trial division at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        let small = u32::try_from(p).map_err(|_| Error::NotPrime(p))?;
        if small < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(small))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn pow(self, n: u32) -> BigUint {
        BigUint::from(self.0).pow(n)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A radius `p^e`, stored as its exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radius(i64);

impl Radius {
    pub const fn new(exp: i64) -> Self {
        Radius(exp)
    }

    #[inline]
    pub const fn exp(self) -> i64 {
        self.0
    }

    /// The radius as an exact rational `p^e`.
    pub fn to_rational(self, p: Prime) -> ExactRational {
        pow_rational(p, self.0)
    }
}

/// `p^e` as an exact rational.
pub fn pow_rational(p: Prime, e: i64) -> ExactRational {
    let mag = BigInt::from(p.pow(e.unsigned_abs() as u32));
    if e >= 0 {
        ExactRational::from_integer(mag)
    } else {
        ExactRational::new(BigInt::one(), mag)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Zero,
    /// Zero modulo `p^abs`; nothing more is known.
    Vanished { abs: i64 },
    Unit { v: i64, unit: BigUint, prec: u32 },
}

/// A p-adic number with a per-value precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PAdic {
    p: Prime,
    repr: Repr,
}

impl PAdic {
    pub fn zero(p: Prime) -> Self {
        PAdic { p, repr: Repr::Zero }
    }

    /// The zero known only modulo `p^abs`.
    pub fn vanished(p: Prime, abs: i64) -> Self {
        PAdic {
            p,
            repr: Repr::Vanished { abs },
        }
    }

    /// Embeds a rational with `prec` known unit digits.
    pub fn from_rational(q: &ExactRational, p: Prime, prec: u32) -> Self {
        assert!(prec >= 1, "precision must be at least one digit");
        if q.is_zero() {
            return Self::zero(p);
        }
        let pb = BigInt::from(p.get());
        let (num, vn) = strip_factor(q.numer().clone(), &pb);
        let (den, vd) = strip_factor(q.denom().clone(), &pb);
        let modulus = p.pow(prec);
        let num_res = signed_residue(&num, &modulus);
        let den_res = signed_residue(&den, &modulus);
        let den_inv = inverse_mod_prime_power(&den_res, p, prec);
        let unit = (num_res * den_inv) % &modulus;
        PAdic {
            p,
            repr: Repr::Unit {
                v: vn - vd,
                unit,
                prec,
            },
        }
    }

    pub fn from_int(n: i64, p: Prime, prec: u32) -> Self {
        Self::from_rational(&ExactRational::from_integer(BigInt::from(n)), p, prec)
    }

    /// `p^e` with `prec` digits `1, 0, 0, ...`.
    pub fn power_of_p(p: Prime, e: i64, prec: u32) -> Self {
        PAdic {
            p,
            repr: Repr::Unit {
                v: e,
                unit: BigUint::one(),
                prec,
            },
        }
    }

    /// Builds a value from its little-endian unit digits. `d_0` must be
    /// nonzero; an empty digit list denotes the zero known modulo `p^v`.
    pub fn from_digits(p: Prime, v: i64, digits: &[u32]) -> Result<Self> {
        if digits.is_empty() {
            return Ok(Self::vanished(p, v));
        }
        let mut unit = BigUint::zero();
        for (i, &d) in digits.iter().enumerate().rev() {
            if d >= p.get() {
                return Err(Error::DigitRange {
                    position: i,
                    digit: d as u64,
                    prime: p.get(),
                });
            }
            unit = unit * p.get() + d;
        }
        if digits[0] == 0 {
            return Err(Error::InvalidArgument("leading unit digit must be nonzero"));
        }
        Ok(PAdic {
            p,
            repr: Repr::Unit {
                v,
                unit,
                prec: digits.len() as u32,
            },
        })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// True for a zero that is only known to working precision.
    pub fn is_vanished(&self) -> bool {
        matches!(self.repr, Repr::Vanished { .. })
    }

    /// Valuation of a nonzero value; `None` for either zero state.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { v, .. } => Some(v),
            _ => None,
        }
    }

    /// Number of known unit digits `N` (0 for the zero states).
    pub fn precision(&self) -> u32 {
        match self.repr {
            Repr::Unit { prec, .. } => prec,
            _ => 0,
        }
    }

    /// The value is known modulo `p^k` for the returned `k`; `None` means
    /// exactly known (the exact zero).
    pub fn absolute_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Vanished { abs } => Some(abs),
            Repr::Unit { v, prec, .. } => Some(v + prec as i64),
        }
    }

    /// The unit part `u` with `0 < u < p^N`, for nonzero values.
    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Little-endian unit digits `d_0 .. d_{N-1}`.
    pub fn digits(&self) -> Vec<u32> {
        match &self.repr {
            Repr::Unit { unit, prec, .. } => to_digits(unit, self.p, *prec),
            _ => Vec::new(),
        }
    }

    /// `|x|_p` as a radius, `None` for the exact zero.
    pub fn norm(&self) -> Result<Option<Radius>> {
        match self.repr {
            Repr::Zero => Ok(None),
            Repr::Vanished { .. } => Err(Error::PrecisionExhausted),
            Repr::Unit { v, .. } => Ok(Some(Radius(-v))),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.add_unchecked(&other.negate()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    pub fn negate(&self) -> Self {
        let repr = match &self.repr {
            Repr::Unit { v, unit, prec } => Repr::Unit {
                v: *v,
                unit: self.p.pow(*prec) - unit,
                prec: *prec,
            },
            other => other.clone(),
        };
        PAdic { p: self.p, repr }
    }

    /// Multiplicative inverse; the unit part is lifted from its inverse
    /// modulo `p`.
    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Unit { v, unit, prec } => Ok(PAdic {
                p: self.p,
                repr: Repr::Unit {
                    v: -v,
                    unit: inverse_mod_prime_power(unit, self.p, *prec),
                    prec: *prec,
                },
            }),
            _ => Err(Error::DivisionByZero),
        }
    }

    /// Multiplication by `p^k`, which loses no digits.
    pub fn shift(&self, k: i64) -> Self {
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Vanished { abs } => Repr::Vanished { abs: abs + k },
            Repr::Unit { v, unit, prec } => Repr::Unit {
                v: v + k,
                unit: unit.clone(),
                prec: *prec,
            },
        };
        PAdic { p: self.p, repr }
    }

    /// Forgets every digit of weight `p^abs` and above.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero => Self::vanished(self.p, abs),
            Repr::Vanished { abs: a } => Self::vanished(self.p, min(*a, abs)),
            Repr::Unit { v, unit, prec } => {
                if abs <= *v {
                    return Self::vanished(self.p, abs);
                }
                let keep = min(*prec as i64, abs - v) as u32;
                PAdic {
                    p: self.p,
                    repr: Repr::Unit {
                        v: *v,
                        unit: unit % self.p.pow(keep),
                        prec: keep,
                    },
                }
            }
        }
    }

    /// Reads the known digits as a terminating expansion and pads it with
    /// zero digits up to absolute precision `abs`. Values already known
    /// beyond `abs` are returned unchanged.
    pub fn zero_extend(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero | Repr::Vanished { .. } => Self::zero(self.p),
            Repr::Unit { v, unit, prec } => {
                let want = max(*prec as i64, abs - v);
                PAdic {
                    p: self.p,
                    repr: Repr::Unit {
                        v: *v,
                        unit: unit.clone(),
                        prec: want as u32,
                    },
                }
            }
        }
    }

    /// Residue of `p^{-low} * x` modulo `p^width` for a value whose
    /// valuation is at least `low`. Needs absolute precision `low + width`.
    pub fn digits_window(&self, low: i64, width: u32) -> Result<BigUint> {
        let modulus = self.p.pow(width);
        match &self.repr {
            Repr::Zero => Ok(BigUint::zero()),
            Repr::Vanished { abs } => {
                if *abs >= low + width as i64 {
                    Ok(BigUint::zero())
                } else {
                    Err(Error::InsufficientPrecision)
                }
            }
            Repr::Unit { v, unit, prec } => {
                if *v + (*prec as i64) < low + width as i64 {
                    return Err(Error::InsufficientPrecision);
                }
                if *v < low {
                    return Err(Error::InvalidArgument("value has digits below the window"));
                }
                let offset = (*v - low) as u32;
                if offset >= width {
                    return Ok(BigUint::zero());
                }
                Ok((unit * self.p.pow(offset)) % modulus)
            }
        }
    }

    /// True when `self - other` vanishes modulo `p^abs`. Errors when the
    /// known digits are too few to tell.
    pub fn agrees_mod(&self, other: &Self, abs: i64) -> Result<bool> {
        let d = self.checked_sub(other)?;
        match d.repr {
            Repr::Zero => Ok(true),
            Repr::Vanished { abs: k } => {
                if k >= abs {
                    Ok(true)
                } else {
                    Err(Error::PrecisionExhausted)
                }
            }
            Repr::Unit { v, .. } => Ok(v >= abs),
        }
    }

    /// Equality over the common known window. A window holding no digit of
    /// either operand raises instead of answering.
    pub fn approx_eq(&self, other: &Self) -> Result<bool> {
        let d = self.checked_sub(other)?;
        match d.repr {
            Repr::Zero => Ok(true),
            Repr::Unit { .. } => Ok(false),
            Repr::Vanished { abs } => {
                let floor = match (self.valuation(), other.valuation()) {
                    (Some(a), Some(b)) => min(a, b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => return Ok(true),
                };
                if abs > floor {
                    Ok(true)
                } else {
                    Err(Error::PrecisionExhausted)
                }
            }
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::PrimeMismatch {
                left: self.p.get(),
                right: other.p.get(),
            })
        }
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => return other.clone(),
            (_, Repr::Zero) => return self.clone(),
            _ => {}
        }
        // both operands have finite absolute precision from here on
        let abs = min(
            self.absolute_precision().unwrap_or(i64::MAX),
            other.absolute_precision().unwrap_or(i64::MAX),
        );
        let low = match (self.valuation(), other.valuation()) {
            (Some(a), Some(b)) => min(a, b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return Self::vanished(p, abs),
        };
        if low >= abs {
            return Self::vanished(p, abs);
        }
        let width = (abs - low) as u32;
        let modulus = p.pow(width);
        let scaled = |x: &PAdic| -> BigUint {
            match &x.repr {
                Repr::Unit { v, unit, .. } => {
                    let off = (v - low) as u32;
                    if off >= width {
                        BigUint::zero()
                    } else {
                        unit * p.pow(off)
                    }
                }
                _ => BigUint::zero(),
            }
        };
        let sum = (scaled(self) + scaled(other)) % &modulus;
        normalize(p, low, sum, width)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Self::zero(p),
            (Repr::Vanished { abs: a }, Repr::Vanished { abs: b }) => Self::vanished(p, a + b),
            (Repr::Vanished { abs }, Repr::Unit { v, .. })
            | (Repr::Unit { v, .. }, Repr::Vanished { abs }) => Self::vanished(p, abs + v),
            (
                Repr::Unit {
                    v: va,
                    unit: ua,
                    prec: na,
                },
                Repr::Unit {
                    v: vb,
                    unit: ub,
                    prec: nb,
                },
            ) => {
                let prec = min(*na, *nb);
                PAdic {
                    p,
                    repr: Repr::Unit {
                        v: va + vb,
                        unit: (ua * ub) % p.pow(prec),
                        prec,
                    },
                }
            }
        }
    }

    /// Bit-exact literal `p:v:d0,d1,...`; exact zero is `p:inf:`.
    pub fn render(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        match &self.repr {
            Repr::Zero => {
                let _ = write!(out, "{}:inf:", self.p);
            }
            Repr::Vanished { abs } => {
                let _ = write!(out, "{}:{}:", self.p, abs);
            }
            Repr::Unit { v, .. } => {
                let _ = write!(out, "{}:{}:", self.p, v);
                for (i, d) in self.digits().iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{d}");
                }
            }
        }
        out
    }

    /// Parses the literal grammar produced by [`PAdic::render`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.splitn(3, ':');
        let p_text = parts.next().unwrap_or("");
        let v_text = parts
            .next()
            .ok_or_else(|| Error::parse(p_text.len(), "expected ':' after prime"))?;
        let digits_text = parts
            .next()
            .ok_or_else(|| Error::parse(p_text.len() + 1 + v_text.len(), "expected ':' after valuation"))?;
        let p_val = parse_decimal(p_text, 0)?;
        let p = Prime::new(p_val).map_err(|_| Error::parse(0, "modulus is not prime"))?;
        let v_pos = p_text.len() + 1;
        let d_pos = v_pos + v_text.len() + 1;
        if v_text == "inf" {
            if !digits_text.is_empty() {
                return Err(Error::parse(d_pos, "exact zero carries no digits"));
            }
            return Ok(Self::zero(p));
        }
        let v = parse_signed(v_text, v_pos)?;
        if digits_text.is_empty() {
            return Ok(Self::vanished(p, v));
        }
        let mut digits = Vec::new();
        let mut pos = d_pos;
        for chunk in digits_text.split(',') {
            let d = parse_decimal(chunk, pos)?;
            if d >= p.get() as u64 {
                return Err(Error::DigitRange {
                    position: pos,
                    digit: d,
                    prime: p.get(),
                });
            }
            digits.push(d as u32);
            pos += chunk.len() + 1;
        }
        if digits[0] == 0 {
            return Err(Error::parse(d_pos, "leading unit digit must be nonzero"));
        }
        Self::from_digits(p, v, &digits)
    }
}

/// The value `p^low * r` where the residue `r` is known modulo `p^width`.
pub fn from_residue(p: Prime, low: i64, residue: &BigUint, width: u32) -> PAdic {
    normalize(p, low, residue % p.pow(width), width)
}

fn normalize(p: Prime, low: i64, value: BigUint, width: u32) -> PAdic {
    if value.is_zero() {
        return PAdic::vanished(p, low + width as i64);
    }
    let pb = BigUint::from(p.get());
    let mut unit = value;
    let mut t = 0u32;
    loop {
        let (q, r) = unit.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        unit = q;
        t += 1;
    }
    PAdic {
        p,
        repr: Repr::Unit {
            v: low + t as i64,
            unit,
            prec: width - t,
        },
    }
}

fn to_digits(unit: &BigUint, p: Prime, prec: u32) -> Vec<u32> {
    let pb = BigUint::from(p.get());
    let mut out = Vec::with_capacity(prec as usize);
    let mut rest = unit.clone();
    for _ in 0..prec {
        let (q, r) = rest.div_rem(&pb);
        out.push(r.to_u32().unwrap_or(0));
        rest = q;
    }
    out
}

fn strip_factor(mut n: BigInt, p: &BigInt) -> (BigInt, i64) {
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return (n, count);
        }
        n = q;
        count += 1;
    }
}

fn signed_residue(n: &BigInt, modulus: &BigUint) -> BigUint {
    let mag = n.magnitude() % modulus;
    if n.sign() == Sign::Minus && !mag.is_zero() {
        modulus - mag
    } else {
        mag
    }
}

/// Inverse of a unit modulo `p^n`: brute-force inverse modulo `p`, then
/// Newton steps `y <- y(2 - uy)`, each doubling the number of correct digits.
pub(crate) fn inverse_mod_prime_power(unit: &BigUint, p: Prime, n: u32) -> BigUint {
    let pu = p.get() as u64;
    let u0 = (unit % pu).to_u64().unwrap_or(0);
    debug_assert!(u0 != 0, "not a unit");
    let y0 = (1..pu).find(|y| (u0 * y) % pu == 1).unwrap_or(1);
    let mut y = BigUint::from(y0);
    let mut known = 1u32;
    while known < n {
        known = min(2 * known, n);
        let m = p.pow(known);
        let uy = (unit * &y) % &m;
        let two = BigUint::from(2u32) % &m;
        let corr = (two + &m - uy) % &m;
        y = (y * corr) % &m;
    }
    y % p.pow(n)
}

fn parse_decimal(text: &str, pos: usize) -> Result<u64> {
    if text.is_empty() {
        return Err(Error::parse(pos, "expected a decimal integer"));
    }
    for (i, c) in text.char_indices() {
        if !c.is_ascii_digit() {
            return Err(Error::parse(pos + i, "expected a decimal digit"));
        }
    }
    text.parse::<u64>()
        .map_err(|_| Error::parse(pos, "integer out of range"))
}

fn parse_signed(text: &str, pos: usize) -> Result<i64> {
    let (neg, body, off) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..], 1),
        Some(b'+') => (false, &text[1..], 1),
        _ => (false, text, 0),
    };
    let mag = parse_decimal(body, pos + off)?;
    let mag = i64::try_from(mag).map_err(|_| Error::parse(pos, "integer out of range"))?;
    Ok(if neg { -mag } else { mag })
}

/// Parses `[+-]int[/posint]` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<ExactRational> {
    let t = text.trim();
    let (num_text, den_text) = match t.find('/') {
        Some(i) => (&t[..i], Some((&t[i + 1..], i + 1))),
        None => (t, None),
    };
    let (neg, digits, off) = match num_text.as_bytes().first() {
        Some(b'-') => (true, &num_text[1..], 1),
        Some(b'+') => (false, &num_text[1..], 1),
        _ => (false, num_text, 0),
    };
    let num = parse_big(digits, off)?;
    let num = if neg { -num } else { num };
    let den = match den_text {
        None => BigInt::one(),
        Some((d, pos)) => {
            let den = parse_big(d, pos)?;
            if den.is_zero() {
                return Err(Error::parse(pos, "denominator must be positive"));
            }
            den
        }
    };
    Ok(ExactRational::new(num, den))
}

fn parse_big(text: &str, pos: usize) -> Result<BigInt> {
    if text.is_empty() {
        return Err(Error::parse(pos, "expected a decimal integer"));
    }
    if let Some(i) = text.find(|c: char| !c.is_ascii_digit()) {
        return Err(Error::parse(pos + i, "expected a decimal digit"));
    }
    BigInt::parse_bytes(text.as_bytes(), 10).ok_or_else(|| Error::parse(pos, "bad integer"))
}

/// Renders a rational as `n/m`, or `n` when the denominator is one.
pub fn render_rational(q: &ExactRational) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    if q.denom().is_one() {
        let _ = write!(s, "{}", q.numer());
    } else {
        let _ = write!(s, "{}/{}", q.numer(), q.denom());
    }
    s
}

/// `p`-adic valuation of a nonzero rational.
pub fn rational_valuation(q: &ExactRational, p: Prime) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let pb = BigInt::from(p.get());
    let (_, vn) = strip_factor(q.numer().abs(), &pb);
    let (_, vd) = strip_factor(q.denom().clone(), &pb);
    Some(vn - vd)
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for PAdic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PAdic::parse(s)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a PAdic> for &'a PAdic {
            type Output = PAdic;

            /// Panics when the operands live over different primes.
            fn $method(self, rhs: &'a PAdic) -> PAdic {
                self.$checked(rhs).expect("p-adic operands over different primes")
            }
        }

        impl $trait<PAdic> for PAdic {
            type Output = PAdic;

            fn $method(self, rhs: PAdic) -> PAdic {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &PAdic {
    type Output = PAdic;

    fn neg(self) -> PAdic {
        self.negate()
    }
}

impl Neg for PAdic {
    type Output = PAdic;

    fn neg(self) -> PAdic {
        self.negate()
    }
}
