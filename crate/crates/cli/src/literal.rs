//! Parsing of command-line literals: complex numbers, points, exponents.

use hgamma::{parse_rational, Complex64, GammaValue, IrrationalGamma, MultiIndex, Point, RationalExponent};
use thiserror::Error;

/// A literal that failed to parse, with the byte offset of the problem.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {text:?} at position {position}: {reason}")]
pub struct ParseError {
    pub text: String,
    pub position: usize,
    pub reason: &'static str,
}

fn fail(text: &str, position: usize, reason: &'static str) -> ParseError {
    ParseError { text: text.to_string(), position, reason }
}

/// A real number in plain decimal or scientific notation; `nan` and `inf` are rejected.
fn parse_real(full: &str, offset: usize, part: &str) -> Result<f64, ParseError> {
    if part.is_empty() {
        return Err(fail(full, offset, "missing number"));
    }
    if let Some(bad) = part.find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))) {
        return Err(fail(full, offset + bad, "unexpected character"));
    }
    let v: f64 = part.parse().map_err(|_| fail(full, offset, "malformed number"))?;
    if !v.is_finite() {
        return Err(fail(full, offset, "number is not finite"));
    }
    Ok(v)
}

/// Parses `RE`, `IMi` or `RE+IMi` / `RE-IMi`.
pub fn parse_complex(text: &str) -> Result<Complex64, ParseError> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    if t.is_empty() {
        return Err(fail(text, 0, "empty literal"));
    }
    if let Some(bad) = t.find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-' | 'i'))) {
        return Err(fail(text, lead + bad, "unexpected character"));
    }
    if let Some(k) = t.find('i').filter(|&k| k + 1 != t.len()) {
        return Err(fail(text, lead + k, "'i' may only close the literal"));
    }
    let bytes = t.as_bytes();
    // Sign separating the real and imaginary parts: not leading, not an exponent sign.
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match (t.strip_suffix('i'), split) {
        (Some(body), Some(k)) => {
            let re = parse_real(text, lead, &body[..k])?;
            let im = parse_real(text, lead + k, &body[k..])?;
            Ok(Complex64::new(re, im))
        }
        (Some(body), None) => Ok(Complex64::new(0.0, parse_real(text, lead, body)?)),
        (None, Some(k)) => Err(fail(text, lead + k, "imaginary part must end in 'i'")),
        (None, None) => Ok(Complex64::new(parse_real(text, lead, t)?, 0.0)),
    }
}

/// Inverse of [`parse_complex`] for finite values.
pub fn format_complex(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", c.re, sign, c.im.abs())
}

/// Parses `A,B` into the point `(A, B)`.
pub fn parse_point(text: &str) -> Result<Point, ParseError> {
    let (a, b) = text.split_once(',').ok_or_else(|| fail(text, text.len(), "expected two coordinates A,B"))?;
    let z1 = parse_complex(a).map_err(|e| ParseError { text: text.into(), ..e })?;
    let z2 = parse_complex(b).map_err(|e| ParseError { text: text.into(), position: e.position + a.len() + 1, ..e })?;
    Ok(Point::new(z1, z2))
}

/// Parses `A1,A2` into a multi-index.
pub fn parse_index(text: &str) -> Result<MultiIndex, ParseError> {
    let (a, b) = text.split_once(',').ok_or_else(|| fail(text, text.len(), "expected two integers A1,A2"))?;
    let a1 = a.trim().parse().map_err(|_| fail(text, 0, "malformed integer"))?;
    let a2 = b.trim().parse().map_err(|_| fail(text, a.len() + 1, "malformed integer"))?;
    Ok(MultiIndex::new(a1, a2))
}

/// `--gamma` literal: `sqrt(K)` and `phi` are irrational, an integer or `p/q`
/// is rational, and a decimal is an irrational exponent known to its written
/// digits (or to `precision` digits when given).
pub fn parse_gamma(text: &str, precision: Option<u32>) -> Result<GammaValue, hgamma::Error> {
    let t = text.trim();
    let is_exact = !t.is_empty() && (t.chars().all(|c| c.is_ascii_digit()) || t.contains('/'));
    if is_exact {
        let q = parse_rational(t).ok_or_else(|| hgamma::Error::InvalidExponent(format!("cannot parse {t:?}")))?;
        let m = i64::try_from(q.numer()).map_err(|_| hgamma::Error::Overflow("gamma numerator"))?;
        let n = i64::try_from(q.denom()).map_err(|_| hgamma::Error::Overflow("gamma denominator"))?;
        return Ok(GammaValue::Rational(RationalExponent::new(m, n)?));
    }
    let Some(d) = precision else {
        return Ok(GammaValue::Irrational(IrrationalGamma::parse(t)?));
    };
    let root = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')'));
    let g = if t.eq_ignore_ascii_case("phi") {
        IrrationalGamma::golden_ratio(d)
    } else if let Some(k) = root {
        let k = k.trim().parse().map_err(|_| hgamma::Error::InvalidExponent(format!("cannot parse {t:?}")))?;
        IrrationalGamma::sqrt(k, d)?
    } else {
        IrrationalGamma::from_decimal_with_digits(t, d)?
    };
    Ok(GammaValue::Irrational(g))
}
