//! Scalar abstraction for the floating-point evaluators.
//!
//! Everything combinatorial (exponents, residues, interval endpoints) is exact
//! and lives in [`crate::Rational`]. Kernel evaluation, quadrature and the
//! series oracle are written once against [`Real`] and instantiated for `f32`
//! and `f64`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Nearest representable value of an exact rational.
    #[inline]
    fn from_rational(q: &BigRational) -> Self {
        Self::lit(ratio_to_f64(q))
    }

    /// Conversion from an integer count.
    #[inline]
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer fits")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `f64` value of an exact rational, falling back to a scaled division when
/// numerator or denominator overflow `f64`.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Shift both parts down to 60 significant bits.
    let num = q.numer();
    let den = q.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let ns = (nb - 60).max(0);
    let ds = (db - 60).max(0);
    let n = (num >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den >> ds as usize).to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

/// Exact rational from an integer.
pub fn rat(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Exact rational `p/q`.
pub fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational equal to the binary value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Parses an exact rational from `p/q`, an integer, or a decimal with an
/// optional exponent such as `2.01` or `1e-3`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("5/2"), Some(frac(5, 2)));
        assert_eq!(parse_rational("2.01"), Some(frac(201, 100)));
        assert_eq!(parse_rational("-1e-3"), Some(frac(-1, 1000)));
        assert_eq!(parse_rational("3"), Some(rat(3)));
        assert_eq!(parse_rational("1.5E2"), Some(rat(150)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big = BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone() * BigInt::from(3), big);
        assert!((ratio_to_f64(&q) - 3.0).abs() < 1e-15);
    }
}
