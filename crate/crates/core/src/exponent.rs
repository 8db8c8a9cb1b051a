//! Exact arithmetic attached to the exponent `gamma`: reduction of `m/n`,
//! cap heights `E_j`, the floor of each lattice column, the critical residue
//! class and Dirichlet convergents of `1/gamma`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ratio_to_f64, Real};

/// Reduced positive fraction `m/n` with `gcd(m, n) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalExponent {
    m: u64,
    n: u64,
}

impl RationalExponent {
    /// Builds `m/n` in lowest terms. Both parts must be positive.
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m <= 0 || n <= 0 {
            return Err(Error::InvalidExponent(format!("{m}/{n}: both parts must be positive")));
        }
        let g = m.gcd(&n);
        Ok(Self { m: (m / g) as u64, n: (n / g) as u64 })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.m), BigInt::from(self.n))
    }

    pub fn to_real<T: Real>(&self) -> T {
        T::from_u64(self.m).unwrap() / T::from_u64(self.n).unwrap()
    }

    fn check_residue(&self, j: i64) -> Result<u64> {
        if j < 0 || j as u64 >= self.m {
            return Err(Error::InvalidResidue { j, m: self.m });
        }
        Ok(j as u64)
    }

    /// `E_j = floor(((j+1) n - 1) / m)` for `0 <= j < m`.
    pub fn cap_height(&self, j: i64) -> Result<i64> {
        let j = self.check_residue(j)? as u128;
        let num = (j + 1) * self.n as u128 - 1;
        i64::try_from(num / self.m as u128).map_err(|_| Error::Overflow("cap_height"))
    }

    /// Least `a2` such that `(a1, a2)` is allowable.
    pub fn min_alpha2(&self, a1: i64) -> Result<i64> {
        if a1 < 0 {
            return Err(Error::InvalidIndex(format!("alpha1 = {a1} must be non-negative")));
        }
        let m = self.m as i128;
        let j = a1 as i128 % m;
        let e = self.cap_height(j as i64)? as i128;
        let blocks = (a1 as i128 - j) / m;
        let v = -1 - self.n as i128 * blocks - e;
        i64::try_from(v).map_err(|_| Error::Overflow("min_alpha2"))
    }

    /// The residue `j0` with `n (j0 + 1) = 1 (mod m)`.
    pub fn critical_residue(&self) -> u64 {
        if self.m == 1 {
            return 0;
        }
        let m = self.m as i128;
        let ext = (self.n as i128).extended_gcd(&m);
        debug_assert_eq!(ext.gcd, 1);
        let x = ext.x.mod_floor(&m);
        let j0 = (x - 1).mod_floor(&m) as u64;
        debug_assert_eq!(
            self.m as i128 * self.cap_height(j0 as i64).unwrap() as i128 - self.n as i128 * j0 as i128,
            self.n as i128 - 1
        );
        j0
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}", self.m)
        } else {
            write!(f, "{}/{}", self.m, self.n)
        }
    }
}

impl Serialize for RationalExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn reduce_exponent(m: i64, n: i64) -> Result<RationalExponent> {
    RationalExponent::new(m, n)
}

pub fn cap_height(gamma: &RationalExponent, j: i64) -> Result<i64> {
    gamma.cap_height(j)
}

pub fn min_alpha2(gamma: &RationalExponent, a1: i64) -> Result<i64> {
    gamma.min_alpha2(a1)
}

pub fn critical_residue(gamma: &RationalExponent) -> u64 {
    gamma.critical_residue()
}

/// An irrational exponent known through a rational enclosure
/// `[center - radius, center + radius]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrationalGamma {
    center: BigRational,
    radius: BigRational,
    label: Option<String>,
}

const DEFAULT_DIGITS: u32 = 80;

impl IrrationalGamma {
    pub fn with_radius(center: BigRational, radius: BigRational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::InvalidExponent("negative radius".into()));
        }
        if &center - &radius <= BigRational::zero() {
            return Err(Error::InvalidExponent("gamma must be strictly positive".into()));
        }
        Ok(Self { center, radius, label: None })
    }

    /// Parses a plain decimal literal. The declared precision is one unit in
    /// the last written digit.
    pub fn from_decimal(text: &str) -> Result<Self> {
        let (center, digits) = parse_decimal(text)?;
        let radius = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
        let mut g = Self::with_radius(center, radius)?;
        g.label = Some(text.trim().to_string());
        Ok(g)
    }

    /// Decimal literal with an explicit precision in decimal digits.
    pub fn from_decimal_with_digits(text: &str, digits: u32) -> Result<Self> {
        let (center, _) = parse_decimal(text)?;
        let radius = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
        let mut g = Self::with_radius(center, radius)?;
        g.label = Some(text.trim().to_string());
        Ok(g)
    }

    /// `sqrt(k)` to `digits` decimal places. Fails for perfect squares.
    pub fn sqrt(k: u64, digits: u32) -> Result<Self> {
        let r = (k as f64).sqrt().round() as u64;
        if r * r == k {
            return Err(Error::NotIrrational);
        }
        let scale = BigInt::from(10u32).pow(digits);
        let root = (BigInt::from(k) * &scale * &scale).sqrt();
        let center = BigRational::new(root, scale.clone());
        let radius = BigRational::new(BigInt::one(), scale);
        let mut g = Self::with_radius(center, radius)?;
        g.label = Some(format!("sqrt({k})"));
        Ok(g)
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn golden_ratio(digits: u32) -> Self {
        let s5 = Self::sqrt(5, digits + 1).expect("5 is not a square");
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let center = (BigRational::one() + s5.center) * &half;
        let radius = s5.radius * half;
        Self { center, radius, label: Some("phi".into()) }
    }

    /// Parses `sqrt(K)`, `phi` or a decimal literal.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("phi") {
            return Ok(Self::golden_ratio(DEFAULT_DIGITS));
        }
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let k: u64 = inner
                .trim()
                .parse()
                .map_err(|_| Error::InvalidExponent(format!("cannot parse {t:?}")))?;
            return Self::sqrt(k, DEFAULT_DIGITS);
        }
        Self::from_decimal(t)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn center(&self) -> &BigRational {
        &self.center
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn lower(&self) -> BigRational {
        &self.center - &self.radius
    }

    pub fn upper(&self) -> BigRational {
        &self.center + &self.radius
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.center)
    }
}

fn parse_decimal(text: &str) -> Result<(BigRational, u32)> {
    let t = text.trim();
    let bad = || Error::InvalidExponent(format!("cannot parse {t:?} as a decimal"));
    let (int_part, frac_part) = match t.split_once('.') {
        Some((a, b)) => (a, b),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = frac_part.len() as u32;
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = joined.parse().map_err(|_| bad())?;
    Ok((BigRational::new(num, BigInt::from(10u32).pow(digits)), digits))
}

/// The exponent `gamma`: exact rational or an irrational enclosure.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaValue {
    Rational(RationalExponent),
    Irrational(IrrationalGamma),
}

impl From<RationalExponent> for GammaValue {
    fn from(g: RationalExponent) -> Self {
        GammaValue::Rational(g)
    }
}

impl From<IrrationalGamma> for GammaValue {
    fn from(g: IrrationalGamma) -> Self {
        GammaValue::Irrational(g)
    }
}

impl GammaValue {
    pub fn rational(m: i64, n: i64) -> Result<Self> {
        Ok(GammaValue::Rational(RationalExponent::new(m, n)?))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            GammaValue::Rational(r) => r.to_real(),
            GammaValue::Irrational(g) => g.to_f64(),
        }
    }

    pub fn to_real<T: Real>(&self) -> T {
        match self {
            GammaValue::Rational(r) => r.to_real(),
            GammaValue::Irrational(g) => T::lit(g.to_f64()),
        }
    }

    pub fn as_rational_exponent(&self) -> Option<&RationalExponent> {
        match self {
            GammaValue::Rational(r) => Some(r),
            GammaValue::Irrational(_) => None,
        }
    }

    /// Rational enclosure `(lo, hi)` of gamma; degenerate for rational gamma.
    pub fn enclosure(&self) -> (BigRational, BigRational) {
        match self {
            GammaValue::Rational(r) => (r.as_rational(), r.as_rational()),
            GammaValue::Irrational(g) => (g.lower(), g.upper()),
        }
    }

    /// Sign of `gamma * coef + constant`, decided exactly for rational gamma
    /// and over the whole enclosure otherwise.
    pub fn sign_affine(&self, coef: &BigRational, constant: &BigRational) -> Result<Ordering> {
        let (lo, hi) = self.enclosure();
        let a = &lo * coef + constant;
        let b = &hi * coef + constant;
        let sa = a.cmp(&BigRational::zero());
        let sb = b.cmp(&BigRational::zero());
        if sa == sb {
            Ok(sa)
        } else {
            Err(Error::PrecisionExhausted(format!(
                "sign of gamma*({coef}) + ({constant}) undecided over the enclosure of gamma"
            )))
        }
    }
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaValue::Rational(r) => write!(f, "{r}"),
            GammaValue::Irrational(g) => match &g.label {
                Some(l) => write!(f, "{l}"),
                None => write!(f, "{}", g.to_f64()),
            },
        }
    }
}

impl Serialize for GammaValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A convergent `n/m` of `1/gamma` with `|n/m - 1/gamma| < 1/m^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convergent {
    pub index: usize,
    pub m: u64,
    pub n: u64,
    /// `|n/m - 1/gamma|`, upper end of its enclosure.
    pub gap: f64,
}

impl Convergent {
    pub fn exponent(&self) -> RationalExponent {
        RationalExponent { m: self.m, n: self.n }
    }
}

/// Continued-fraction partial quotients of `1/gamma`, certified on the whole
/// enclosure, turned into Dirichlet pairs `(m_j, n_j)`.
struct ConvergentStream {
    lo: BigRational,
    hi: BigRational,
    err: BigRational,
    x_lo: BigRational,
    x_hi: BigRational,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    exhausted: Option<String>,
}

impl ConvergentStream {
    fn new(g: &IrrationalGamma) -> Self {
        let lo = BigRational::one() / g.upper();
        let hi = BigRational::one() / g.lower();
        let err = (&hi - &lo) / BigRational::from_integer(BigInt::from(2));
        Self {
            x_lo: lo.clone(),
            x_hi: hi.clone(),
            lo,
            hi,
            err,
            p: (BigInt::zero(), BigInt::one()),
            q: (BigInt::one(), BigInt::zero()),
            exhausted: None,
        }
    }

    /// Next raw convergent `(n, m)` of `1/gamma`.
    fn next_raw(&mut self) -> Option<(BigInt, BigInt)> {
        if self.exhausted.is_some() {
            return None;
        }
        let a_lo = self.x_lo.floor();
        let a_hi = self.x_hi.floor();
        if a_lo != a_hi {
            self.exhausted = Some("continued fraction of 1/gamma not determined by the enclosure".into());
            return None;
        }
        let a = a_lo.to_integer();
        let p_new = &a * &self.p.1 + &self.p.0;
        let q_new = &a * &self.q.1 + &self.q.0;
        self.p = (std::mem::replace(&mut self.p.1, p_new.clone()), p_new.clone());
        self.q = (std::mem::replace(&mut self.q.1, q_new.clone()), q_new.clone());
        let f_lo = &self.x_lo - &a_lo;
        let f_hi = &self.x_hi - &a_hi;
        if f_lo.is_zero() || f_hi.is_zero() {
            self.exhausted = Some("enclosure endpoint has a terminating expansion".into());
        } else {
            self.x_lo = f_lo.recip();
            self.x_hi = f_hi.recip();
        }
        Some((p_new, q_new))
    }

    /// Certifies the pair and returns `(gap_hi, m, n)`.
    fn certify(&self, n: &BigInt, m: &BigInt) -> Result<(f64, u64, u64)> {
        let approx = BigRational::new(n.clone(), m.clone());
        let d_lo = (&approx - &self.lo).abs();
        let d_hi = (&approx - &self.hi).abs();
        let inside = approx >= self.lo && approx <= self.hi;
        let gap_lo = if inside { BigRational::zero() } else { d_lo.clone().min(d_hi.clone()) };
        let gap_hi = d_lo.max(d_hi);
        let m_sq = BigRational::from_integer(m * m);
        let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
        if &m_sq * &self.err >= tenth * &gap_lo {
            return Err(Error::PrecisionExhausted(format!(
                "denominator {m} exceeds what the declared precision of gamma certifies"
            )));
        }
        if &gap_hi * &m_sq >= BigRational::one() {
            return Err(Error::PrecisionExhausted(format!("convergent {n}/{m} fails the Dirichlet bound")));
        }
        let mm = m.to_u64().ok_or(Error::Overflow("convergent denominator"))?;
        let nn = n.to_u64().ok_or(Error::Overflow("convergent numerator"))?;
        Ok((ratio_to_f64(&gap_hi), mm, nn))
    }
}

/// First `count` Dirichlet convergents `n_j/m_j` of `1/gamma`, with `m_j`
/// and `n_j` strictly increasing. When two consecutive convergents share a
/// numerator only the later (better) one is kept.
pub fn dirichlet_convergents(gamma: &GammaValue, count: usize) -> Result<Vec<Convergent>> {
    collect_convergents(gamma, count, true)
}

/// Up to `count` Dirichlet convergents, stopping early without error when the
/// enclosure of gamma certifies fewer (at least one is required).
pub fn dirichlet_convergents_available(gamma: &GammaValue, count: usize) -> Result<Vec<Convergent>> {
    collect_convergents(gamma, count, false)
}

fn collect_convergents(gamma: &GammaValue, count: usize, strict: bool) -> Result<Vec<Convergent>> {
    let g = match gamma {
        GammaValue::Rational(_) => return Err(Error::NotIrrational),
        GammaValue::Irrational(g) => g,
    };
    if count == 0 {
        return Err(Error::OutOfRange("count must be at least 1".into()));
    }
    let mut stream = ConvergentStream::new(g);
    let mut raw: Vec<(BigInt, BigInt)> = Vec::new();
    // One extra raw convergent decides whether the last kept one survives.
    while let Some((n, m)) = stream.next_raw() {
        if n.is_zero() {
            continue;
        }
        if let Some(last) = raw.last() {
            if last.0 == n {
                raw.pop();
            }
        }
        raw.push((n, m));
        if raw.len() > count {
            raw.truncate(count);
            break;
        }
    }
    let mut out = Vec::with_capacity(raw.len());
    for (index, (n, m)) in raw.iter().enumerate() {
        match stream.certify(n, m) {
            Ok((gap, m, n)) => out.push(Convergent { index, m, n, gap }),
            Err(e) if strict || out.is_empty() => return Err(e),
            Err(_) => break,
        }
    }
    if out.is_empty() || (strict && out.len() < count) {
        let why = stream.exhausted.unwrap_or_default();
        return Err(Error::PrecisionExhausted(format!("only {} convergents available: {why}", out.len())));
    }
    Ok(out)
}
