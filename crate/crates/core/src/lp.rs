//! Exact `L^p` ranges for type-A operators, the sub-Bergman projections and
//! the full projection, together with the monomial witnesses that show the
//! ranges are sharp.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::{dirichlet_convergents_available, Convergent, GammaValue, RationalExponent};
use crate::kernel::{modulus_pow, norm_denominator, CPoint2};
use crate::lattice::{is_allowable_a2, MultiIndex};
use crate::quad::integrate;
use crate::scalar::{frac, rat, ratio_to_f64, Real};

/// Open interval `(lower, upper)` of exponents with `1 < lower < 2 < upper`
/// and `1/lower + 1/upper = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpInterval {
    lower: BigRational,
    upper: BigRational,
}

impl LpInterval {
    pub fn new(lower: BigRational, upper: BigRational) -> Result<Self> {
        let one = BigRational::one();
        let two = rat(2);
        if !(lower > one && lower < two && upper > two) {
            return Err(Error::OutOfRange(format!("({lower}, {upper}) does not satisfy 1 < lower < 2 < upper")));
        }
        if lower.recip() + upper.recip() != one {
            return Err(Error::OutOfRange(format!("({lower}, {upper}) are not Hölder conjugates")));
        }
        Ok(Self { lower, upper })
    }

    /// `(N / d_lo, N / d_hi)` where `d_lo + d_hi = N`.
    fn from_denominators(numerator: i64, d_lo: &BigRational, d_hi: &BigRational) -> Result<Self> {
        Self::new(rat(numerator) / d_lo, rat(numerator) / d_hi)
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn contains(&self, p: &BigRational) -> bool {
        *p > self.lower && *p < self.upper
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            lower: self.lower.clone().max(other.lower.clone()),
            upper: self.upper.clone().min(other.upper.clone()),
        }
    }
}

impl fmt::Display for LpInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

impl Serialize for LpInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LpInterval", 3)?;
        st.serialize_field("lower", &self.lower.to_string())?;
        st.serialize_field("upper", &self.upper.to_string())?;
        st.serialize_field("open", &true)?;
        st.end()
    }
}

/// Range of `p` on which a type-A operator is bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeARange {
    Bounded(LpInterval),
    /// Every `1 < p < infinity`.
    FullRange,
}

impl Serialize for TypeARange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TypeARange::Bounded(i) => i.serialize(s),
            TypeARange::FullRange => {
                let mut st = s.serialize_struct("LpInterval", 4)?;
                st.serialize_field("lower", "1")?;
                st.serialize_field("upper", "inf")?;
                st.serialize_field("open", &true)?;
                st.serialize_field("full_range", &true)?;
                st.end()
            }
        }
    }
}

/// Why the type-A side conditions fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TypeARejection {
    /// `A m + 2n + 2m - 2nm <= 0`.
    LowerDenominatorNotPositive,
    /// `2nm - A m <= 0`.
    UpperDenominatorNotPositive,
    /// `A m + 2n + 2m - 2nm <= 2nm - A m`.
    NotOrdered,
}

/// Exponent `A` of a kernel dominated by `|t|^A / (|1-t|^2 |t^n - s^m|^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAParams {
    pub a: BigRational,
    pub m: u64,
    pub n: u64,
}

impl TypeAParams {
    pub fn new(a: BigRational, m: u64, n: u64) -> Self {
        Self { a, m, n }
    }

    fn mn(&self) -> (BigRational, BigRational) {
        (rat(self.m as i64), rat(self.n as i64))
    }

    /// `A m + 2n + 2m - 2nm`.
    pub fn lower_denominator(&self) -> BigRational {
        let (m, n) = self.mn();
        &self.a * &m + rat(2) * &n + rat(2) * &m - rat(2) * &n * &m
    }

    /// `2nm - A m`.
    pub fn upper_denominator(&self) -> BigRational {
        let (m, n) = self.mn();
        rat(2) * &n * &m - &self.a * &m
    }

    pub fn lower_denominator_positive(&self) -> bool {
        self.lower_denominator().is_positive()
    }

    pub fn upper_denominator_positive(&self) -> bool {
        self.upper_denominator().is_positive()
    }
}

/// `((2n+2m)/(Am+2n+2m-2nm), (2n+2m)/(2nm-Am))`, or the full range when `A = 2n`.
pub fn type_a_interval(params: &TypeAParams) -> std::result::Result<TypeARange, TypeARejection> {
    if params.a == rat(2 * params.n as i64) {
        return Ok(TypeARange::FullRange);
    }
    let lo = params.lower_denominator();
    let hi = params.upper_denominator();
    if !lo.is_positive() {
        return Err(TypeARejection::LowerDenominatorNotPositive);
    }
    if !hi.is_positive() {
        return Err(TypeARejection::UpperDenominatorNotPositive);
    }
    if lo <= hi {
        return Err(TypeARejection::NotOrdered);
    }
    // Positive denominators summing to 2n+2m with lo > hi give 1 < lower < 2 < upper.
    let total = 2 * (params.m + params.n) as i64;
    Ok(TypeARange::Bounded(
        LpInterval::from_denominators(total, &lo, &hi).expect("side conditions imply the interval invariants"),
    ))
}

/// `A = 2n - 1 - E_j + nj/m` for the sub-projection onto the class `j`.
pub fn subprojection_exponent(gamma: &RationalExponent, j: i64) -> Result<BigRational> {
    let e = gamma.cap_height(j)?;
    let (m, n) = (gamma.m() as i64, gamma.n() as i64);
    Ok(rat(2 * n - 1 - e) + frac(n * j, m))
}

/// Type-A exponent and exact boundedness interval of the sub-projection `K_j`.
pub fn subprojection_interval(gamma: &RationalExponent, j: i64) -> Result<(BigRational, LpInterval)> {
    let a = subprojection_exponent(gamma, j)?;
    let params = TypeAParams::new(a.clone(), gamma.m(), gamma.n());
    match type_a_interval(&params) {
        Ok(TypeARange::Bounded(interval)) => Ok((a, interval)),
        other => Err(Error::OutOfRange(format!("class {j} of {gamma} gave {other:?}"))),
    }
}

/// `((2m+2n)/(m - m E_j + 2n + jn), (2m+2n)/(m + m E_j - nj))` from the cap height directly.
pub fn subprojection_interval_direct(gamma: &RationalExponent, j: i64) -> Result<LpInterval> {
    let e = gamma.cap_height(j)? as i128;
    let (m, n, j) = (gamma.m() as i128, gamma.n() as i128, j as i128);
    let big = |v: i128| BigRational::from_integer(BigInt::from(v));
    LpInterval::from_denominators(
        2 * (m + n) as i64,
        &big(m - m * e + 2 * n + j * n),
        &big(m + m * e - n * j),
    )
}

/// Above this many classes the intersection is read off the critical class.
pub const EXHAUSTIVE_CLASS_LIMIT: u64 = 1 << 20;

/// Intersection over all classes of the sub-projection intervals.
///
/// Class `j` has upper denominator `D_j = m + m E_j - n j` and lower
/// denominator `2m + 2n - D_j`, so the intersection is the class with the
/// largest `D_j`. Since `D_j = m + n - 1 - ((j+1) n - 1 mod m)`, that is the
/// critical class; for `m` up to [`EXHAUSTIVE_CLASS_LIMIT`] the maximum is
/// found by scanning every class instead.
pub fn bergman_interval(gamma: &RationalExponent) -> Result<LpInterval> {
    let (m, n) = (gamma.m() as i128, gamma.n() as i128);
    let upper_denominator = |j: i64| -> Result<i128> { Ok(m + m * gamma.cap_height(j)? as i128 - n * j as i128) };
    let best = if gamma.m() <= EXHAUSTIVE_CLASS_LIMIT {
        let mut best = upper_denominator(0)?;
        for j in 1..gamma.m() as i64 {
            best = best.max(upper_denominator(j)?);
        }
        best
    } else {
        upper_denominator(gamma.critical_residue() as i64)?
    };
    let total = i64::try_from(2 * (m + n)).map_err(|_| Error::Overflow("bergman_interval"))?;
    let big = |v: i128| BigRational::from_integer(BigInt::from(v));
    LpInterval::from_denominators(total, &big(total as i128 - best), &big(best))
}

/// `((2m+2n)/(m+n+1), (2m+2n)/(m+n-1))`.
pub fn bergman_interval_formula(gamma: &RationalExponent) -> Result<LpInterval> {
    let s = (gamma.m() + gamma.n()) as i64;
    LpInterval::from_denominators(2 * s, &rat(s + 1), &rat(s - 1))
}

/// Half-open window `[a, b)` of admissible Schur exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurWindow {
    pub a: BigRational,
    pub b: BigRational,
}

impl SchurWindow {
    /// `((a+b)/b, (a+b)/a)`.
    pub fn interval(&self) -> Result<LpInterval> {
        let s = &self.a + &self.b;
        LpInterval::new(&s / &self.b, &s / &self.a)
    }
}

impl Serialize for SchurWindow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SchurWindow", 2)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.end()
    }
}

/// `a = 1 - A/(2n)`, `b = (A + 2n/m - 2n + 2) / (2n)`.
pub fn schur_window(params: &TypeAParams) -> Result<SchurWindow> {
    let (m, n) = params.mn();
    let two_n = rat(2) * &n;
    let a = BigRational::one() - &params.a / &two_n;
    let b = (&params.a + &two_n / &m - &two_n + rat(2)) / &two_n;
    if !a.is_positive() || a >= b {
        return Err(Error::EmptyWindow(format!("Schur window [{a}, {b})")));
    }
    Ok(SchurWindow { a, b })
}

/// The weight `(|z2|^(2n) - |z1|^(2m)) (1 - |z2|^2)` used in the Schur test.
pub fn schur_aux_weight<T: Real>(m: u64, n: u64, z: &CPoint2<T>) -> T {
    let r1 = z.z1.norm_sqr();
    let r2 = z.z2.norm_sqr();
    (r2.powi(n as i32) - r1.powi(m as i32)) * (T::one() - r2)
}

/// Monomial `z1^b1 z2^b2` whose conjugate-type input
/// `z1^b1 conj(z2)^(-b2)` is mapped by `K_j` outside `L^p` for `p >= p_star`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub gamma: RationalExponent,
    pub beta: MultiIndex,
    pub j: u64,
    pub k: u64,
    pub p_star: BigRational,
}

impl Witness {
    /// The bounded input `z1^b1 * conj(z2)^(-b2)`.
    pub fn bounded_input(&self) -> String {
        format!("z1^{} * conj(z2)^{}", self.beta.a1, -self.beta.a2)
    }

    pub fn radial_exponent(&self, p: &BigRational) -> BigRational {
        radial_exponent(&self.gamma, self.beta, p)
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Witness", 6)?;
        st.serialize_field("gamma", &self.gamma)?;
        st.serialize_field("beta", &[self.beta.a1, self.beta.a2])?;
        st.serialize_field("f", &self.bounded_input())?;
        st.serialize_field("p_star", &self.p_star.to_string())?;
        st.serialize_field("j", &self.j)?;
        st.serialize_field("k", &self.k)?;
        st.end()
    }
}

/// `e(p) = p b2 + 1 + n p b1 / m + 2n/m`; the radial integral diverges iff `e(p) <= -1`.
pub fn radial_exponent(gamma: &RationalExponent, beta: MultiIndex, p: &BigRational) -> BigRational {
    let g_inv = gamma.as_rational().recip();
    p * rat(beta.a2) + BigRational::one() + (p * rat(beta.a1) + rat(2)) * g_inv
}

pub fn witness(gamma: &RationalExponent, j: i64, k: u64) -> Result<Witness> {
    let e = gamma.cap_height(j)?;
    let (m, n) = (gamma.m() as i64, gamma.n() as i64);
    let k_i = i64::try_from(k).map_err(|_| Error::Overflow("witness offset"))?;
    let a1 = k_i
        .checked_mul(m)
        .and_then(|v| v.checked_add(j))
        .ok_or(Error::Overflow("witness index"))?;
    let a2 = n
        .checked_mul(k_i)
        .and_then(|v| v.checked_add(1 + e))
        .map(|v| -v)
        .ok_or(Error::Overflow("witness index"))?;
    debug_assert_eq!(a2, gamma.min_alpha2(a1)?);
    let p_star = frac(2 * m + 2 * n, m + m * e - n * j);
    Ok(Witness { gamma: *gamma, beta: MultiIndex::new(a1, a2), j: j as u64, k, p_star })
}

/// Exponent of `r2` in the radial form of `||z1^b1 z2^b2||_p^p` and its
/// divergence verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct LpExponent {
    pub value: f64,
    /// Present when gamma and p are both rational.
    pub exact: Option<BigRational>,
    pub diverges: bool,
}

/// `p b2 + 1 + p b1 / gamma + 2 / gamma`, with divergence when it is `<= -1`.
pub fn monomial_lp_exponent(gamma: &GammaValue, beta: MultiIndex, p: &BigRational) -> Result<LpExponent> {
    if beta.a1 < 0 {
        return Err(Error::InvalidIndex(format!("b1 = {} must be non-negative", beta.a1)));
    }
    if !p.is_positive() {
        return Err(Error::OutOfRange(format!("p = {p} must be positive")));
    }
    match gamma {
        GammaValue::Rational(r) => {
            let e = radial_exponent(r, beta, p);
            let diverges = e <= -BigRational::one();
            Ok(LpExponent { value: ratio_to_f64(&e), exact: Some(e), diverges })
        }
        GammaValue::Irrational(_) => {
            // e + 1 <= 0  <=>  gamma (p b2 + 2) + (p b1 + 2) <= 0.
            let coef = p * rat(beta.a2) + rat(2);
            let constant = p * rat(beta.a1) + rat(2);
            let sign = gamma.sign_affine(&coef, &constant)?;
            let g = gamma.to_f64();
            let pf = ratio_to_f64(p);
            let value = pf * beta.a2 as f64 + 1.0 + (pf * beta.a1 as f64 + 2.0) / g;
            Ok(LpExponent { value, exact: None, diverges: sign != Ordering::Greater })
        }
    }
}

/// `C` in `B(z1^b1 conj(z2)^b2) = C z1^b1 z2^(-b2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionConstant {
    /// Present for rational gamma.
    pub exact: Option<BigRational>,
    pub value: f64,
    /// The image monomial `(b1, -b2)`.
    pub image: MultiIndex,
}

impl Serialize for ProjectionConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProjectionConstant", 3)?;
        st.serialize_field("exact", &self.exact.as_ref().map(|q| q.to_string()))?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("image", &[self.image.a1, self.image.a2])?;
        st.end()
    }
}

/// `C = ||z1^b1||^2 / ||z1^b1 z2^(-b2)||^2`, the ratio of squared monomial norms.
pub fn projection_constant(gamma: &GammaValue, beta: MultiIndex) -> Result<ProjectionConstant> {
    let image = MultiIndex::new(beta.a1, -beta.a2);
    for alpha in [beta, image] {
        if !is_allowable_a2(gamma, alpha)? {
            return Err(Error::NotAllowable { a1: alpha.a1, a2: alpha.a2 });
        }
    }
    let base = MultiIndex::new(beta.a1, 0);
    // ||z^alpha||^2 = gamma pi^2 / D(alpha), so C = D(image) / D(base).
    match gamma {
        GammaValue::Rational(r) => {
            let g = r.as_rational();
            let c = norm_denominator(g.clone(), image) / norm_denominator(g, base);
            Ok(ProjectionConstant { value: ratio_to_f64(&c), exact: Some(c), image })
        }
        GammaValue::Irrational(_) => {
            let g = gamma.to_f64();
            let value = norm_denominator(g, image) / norm_denominator(g, base);
            Ok(ProjectionConstant { exact: None, value, image })
        }
    }
}

/// Outcome of the convergent search showing unboundedness at `p` for irrational gamma.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyWitness {
    pub gamma: GammaValue,
    pub p: BigRational,
    pub convergent: Convergent,
    /// Every convergent tried, ending with the successful one.
    pub examined: Vec<Convergent>,
    pub beta: MultiIndex,
    pub exponent: f64,
    /// `exponent + 1`; non-positive on success.
    pub margin: f64,
    /// Whether the cruder test `p (1 + (n-2)/m) > 2 + 2/gamma` also holds.
    pub sufficient: bool,
}

impl Serialize for DegeneracyWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DegeneracyWitness", 8)?;
        st.serialize_field("gamma", &self.gamma)?;
        st.serialize_field("p", &self.p.to_string())?;
        st.serialize_field("convergent", &self.convergent)?;
        st.serialize_field("examined", &self.examined)?;
        st.serialize_field("beta", &[self.beta.a1, self.beta.a2])?;
        st.serialize_field("exponent", &self.exponent)?;
        st.serialize_field("margin", &self.margin)?;
        st.serialize_field("sufficient", &self.sufficient)?;
        st.end()
    }
}

/// Walks the Dirichlet convergents `n_j/m_j` of `1/gamma` and returns the
/// first whose critical-class floor monomial escapes `L^p`.
pub fn irrational_degeneracy_witness(
    gamma: &GammaValue,
    p: &BigRational,
    max_convergents: usize,
) -> Result<DegeneracyWitness> {
    if matches!(gamma, GammaValue::Rational(_)) {
        return Err(Error::NotIrrational);
    }
    if *p <= rat(2) {
        return Err(Error::OutOfRange(format!("p = {p} must exceed 2")));
    }
    let convergents = dirichlet_convergents_available(gamma, max_convergents)?;
    let (g_lo, _) = gamma.enclosure();
    let threshold = rat(2) + rat(2) / g_lo;
    let mut examined = Vec::new();
    for c in &convergents {
        examined.push(*c);
        let local = c.exponent();
        let b1 = local.critical_residue() as i128;
        let (m, n) = (c.m as i128, c.n as i128);
        let num = 1 - n * b1 - n - m;
        debug_assert_eq!(num % m, 0);
        let b2 = i64::try_from(num / m).map_err(|_| Error::Overflow("borderline index"))?;
        let beta = MultiIndex::new(b1 as i64, b2);
        if !is_allowable_a2(gamma, beta)? {
            return Err(Error::NotAllowable { a1: beta.a1, a2: beta.a2 });
        }
        let e = monomial_lp_exponent(gamma, beta, p)?;
        if e.diverges {
            let sufficient = p * (BigRational::one() + frac(c.n as i64 - 2, c.m as i64)) > threshold;
            return Ok(DegeneracyWitness {
                gamma: gamma.clone(),
                p: p.clone(),
                convergent: *c,
                examined,
                beta,
                exponent: e.value,
                margin: e.value + 1.0,
                sufficient,
            });
        }
    }
    if convergents.len() < max_convergents {
        return Err(Error::PrecisionExhausted(format!(
            "only {} convergents certified by the precision of gamma",
            convergents.len()
        )));
    }
    Err(Error::NotFound(max_convergents))
}

/// Hölder conjugate `q = p / (p - 1)`.
pub fn dual_exponent<S: Num + PartialOrd + Clone>(p: S) -> Result<S> {
    if p <= S::one() {
        return Err(Error::OutOfRange("p must exceed 1".into()));
    }
    Ok(p.clone() / (p - S::one()))
}

/// Value of `I(z) = 2 pi int_0^1 r^(1-beta) (1-r^2)^(-eps) / (1 - r^2 |z|^2) dr`
/// and of `I(z) (1-|z|^2)^eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchurProbe<T> {
    pub value: T,
    pub ratio: T,
    pub error: T,
}

/// Absolute accuracy targeted by [`schur_probe_disc`].
pub const SCHUR_PROBE_TOL: f64 = 1e-9;

/// Evaluates `I(z)`. `[0, 1/2]` is mapped by `r = v^(1/(2-beta))`, which
/// absorbs `r^(1-beta)`; `[1/2, 1)` by `r = 1 - e^(-x)`, truncated where the
/// remaining tail is below `1e-12`. `radial_nodes` caps integrand evaluations.
pub fn schur_probe_disc<T: Real>(eps: T, beta: T, z_abs: T, radial_nodes: usize) -> Result<SchurProbe<T>> {
    let (zero, one, two) = (T::zero(), T::one(), T::lit(2.0));
    if !(eps > zero && eps < one) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(beta < two) {
        return Err(Error::OutOfRange(format!("beta = {beta} must be below 2")));
    }
    if !(z_abs >= zero && z_abs < one) {
        return Err(Error::OutOfRange(format!("|z| = {z_abs} must lie in [0, 1)")));
    }
    let max_panels = (radial_nodes / 30).max(1);
    let half = T::lit(0.5);
    let rho2 = z_abs * z_abs;
    let one_minus_rho2 = (one - z_abs) * (one + z_abs);
    let tol = T::lit(SCHUR_PROBE_TOL) / (two * T::PI());

    let a = two - beta;
    let inner = integrate(
        |v: T| {
            let r = modulus_pow(v, one / a);
            let r2 = r * r;
            (one - r2).powf(-eps) / (one - r2 * rho2) / a
        },
        zero,
        half.powf(a),
        tol * half,
        max_panels,
    )?;

    let tail_const = two.powf((one - beta).abs()) / ((one - eps) * one_minus_rho2);
    let cutoff = (tail_const / T::lit(1e-12)).ln() / (one - eps);
    let x0 = two.ln();
    let outer = integrate(
        |x: T| {
            let ex = (-x).exp();
            let r = one - ex;
            let one_minus_r2 = ex * (two - ex);
            let den = one_minus_rho2 + rho2 * one_minus_r2;
            r.powf(one - beta) * (two - ex).powf(-eps) * ((eps - one) * x).exp() / den
        },
        x0,
        cutoff.max(x0),
        tol * half,
        max_panels,
    )?;

    let scale = two * T::PI();
    let value = scale * (inner.value + outer.value);
    let error = scale * (inner.error + outer.error) + T::lit(1e-12) * scale;
    Ok(SchurProbe { value, ratio: value * one_minus_rho2.powf(eps), error })
}
