//! Operand and set syntax accepted on the command line.

use padic_core::{canonical_ball, parse_rational, Ball, Error, PAdic, Prime, Result, Sphere};

/// A rational such as `-3/4`, or a literal `p:v:d0,d1,...` over `p`.
pub fn operand(text: &str, p: Prime, prec: u32) -> Result<PAdic> {
    let text = text.trim();
    if text.contains(':') {
        let x = PAdic::parse(text)?;
        if x.prime() != p {
            return Err(Error::PrimeMismatch {
                left: p.get(),
                right: x.prime().get(),
            });
        }
        Ok(x)
    } else {
        Ok(PAdic::from_rational(&parse_rational(text)?, p, prec))
    }
}

/// A radius exponent written `e` or `p^e`.
fn exponent(text: &str, p: Prime) -> Result<i64> {
    let text = text.trim();
    let digits = match text.split_once('^') {
        Some((base, e)) => {
            if base.trim().parse::<u64>().ok() != Some(p.get() as u64) {
                return Err(Error::InvalidArgument("radius base must be the prime"));
            }
            e.trim()
        }
        None => text,
    };
    digits
        .parse::<i64>()
        .map_err(|_| Error::InvalidArgument("radius exponent must be a signed integer"))
}

/// Splits `X[e](c)` into its exponent and center text.
fn bracketed(text: &str, tag: char) -> Result<(&str, &str)> {
    let text = text.trim();
    let rest = text
        .strip_prefix(tag)
        .and_then(|r| r.strip_prefix('['))
        .ok_or(Error::InvalidArgument("expected a ball V[e](c) or sphere S[e](c)"))?;
    let (exp, rest) = rest.split_once(']').ok_or(Error::InvalidArgument("missing ']'"))?;
    let center = rest
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or(Error::InvalidArgument("center must be in parentheses"))?;
    Ok((exp, center))
}

pub fn ball(text: &str, p: Prime, prec: u32) -> Result<Ball> {
    let (exp, center) = bracketed(text, 'V')?;
    let e = exponent(exp, p)?;
    canonical_ball(&operand(center, p, prec)?, e)
}

pub fn sphere(text: &str, p: Prime, prec: u32) -> Result<Sphere> {
    let (exp, center) = bracketed(text, 'S')?;
    Ok(Sphere::new(operand(center, p, prec)?, exponent(exp, p)?))
}

/// Balls separated by whitespace, commas, or semicolons.
pub fn ball_list(text: &str, p: Prime, prec: u32) -> Result<Vec<Ball>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let end = rest
            .find(')')
            .ok_or(Error::InvalidArgument("unterminated ball"))?;
        out.push(ball(&rest[..=end], p, prec)?);
        rest = rest[end + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',' || c == ';');
    }
    Ok(out)
}
