//! Monomial norms, sub-kernel coefficients, closed-form Bergman kernels for
//! rational exponents and the truncated monomial series for any exponent.
//!
//! Points and kernel values are generic over [`Real`]; all coefficients are
//! built exactly in [`BigRational`] and rounded once when a kernel is
//! compiled for a scalar type.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{GammaValue, RationalExponent};
use crate::lattice::{is_allowable_a2, MultiIndex};
use crate::scalar::{frac, rat, Real};

/// Default distance kept from the zero sets of `1 - t` and `t^n - s^m`.
pub const DEFAULT_GUARD: f64 = 1e-9;

/// Hard cap on the number of series terms.
pub const SERIES_TERM_CAP: u64 = 10_000_000;

/// A point `(z1, z2)` of `C^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CPoint2<T> {
    pub z1: Complex<T>,
    pub z2: Complex<T>,
}

/// `|x|^g` for a modulus `x >= 0`, taking `0^g = 0`.
#[inline]
pub(crate) fn modulus_pow<T: Real>(x: T, g: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        (g * x.ln()).exp()
    }
}

impl<T: Real> CPoint2<T> {
    pub fn new(z1: Complex<T>, z2: Complex<T>) -> Self {
        Self { z1, z2 }
    }

    /// `(|z2| - |z1|^gamma, 1 - |z2|)`; both positive exactly on the domain.
    pub fn margins(&self, gamma: T) -> (T, T) {
        let r2 = self.z2.norm();
        (r2 - modulus_pow(self.z1.norm(), gamma), T::one() - r2)
    }

    pub fn in_domain(&self, gamma: T) -> bool {
        let (a, b) = self.margins(gamma);
        a > T::zero() && b > T::zero()
    }

    /// The map `(z1, z2) -> (z1 z2, z2)`.
    pub fn psi(&self) -> Self {
        Self { z1: self.z1 * self.z2, z2: self.z2 }
    }

    pub fn monomial(&self, alpha: MultiIndex) -> Complex<T> {
        self.z1.powi(alpha.a1 as i32) * self.z2.powi(alpha.a2 as i32)
    }
}

/// JSON form `{"re": .., "im": ..}` of a complex number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl<T: Real> From<Complex<T>> for ComplexJson {
    fn from(c: Complex<T>) -> Self {
        Self { re: c.re.to_f64().unwrap_or(f64::NAN), im: c.im.to_f64().unwrap_or(f64::NAN) }
    }
}

impl<T: Real> Serialize for CPoint2<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [ComplexJson::from(self.z1), ComplexJson::from(self.z2)].serialize(s)
    }
}

/// `s = z1 conj(w1)`, `t = z2 conj(w2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizedPair<T> {
    pub s: Complex<T>,
    pub t: Complex<T>,
}

impl<T: Real> PolarizedPair<T> {
    pub fn new(s: Complex<T>, t: Complex<T>) -> Self {
        Self { s, t }
    }

    pub fn from_points(z: &CPoint2<T>, w: &CPoint2<T>) -> Self {
        Self { s: z.z1 * w.z1.conj(), t: z.z2 * w.z2.conj() }
    }
}

/// `(a1 + 1)^2 + gamma (a1 + 1)(a2 + 1)`, over any numeric ring.
pub fn norm_denominator<S>(gamma: S, alpha: MultiIndex) -> S
where
    S: Num + Clone + FromPrimitive,
{
    let a = S::from_i64(alpha.a1 + 1).expect("index fits");
    let b = S::from_i64(alpha.a2 + 1).expect("index fits");
    a.clone() * a.clone() + gamma * a * b
}

/// `||z^alpha||^2 / pi^2 = gamma / ((a1+1)^2 + gamma (a1+1)(a2+1))`, exactly.
pub fn monomial_norm_sq_over_pi2(gamma: &RationalExponent, alpha: MultiIndex) -> Result<BigRational> {
    if !is_allowable_a2(&GammaValue::Rational(*gamma), alpha)? {
        return Err(Error::NotAllowable { a1: alpha.a1, a2: alpha.a2 });
    }
    let g = gamma.as_rational();
    Ok(g.clone() / norm_denominator(g, alpha))
}

/// `||z^alpha||^2` on the domain with exponent `gamma`.
pub fn monomial_norm_sq<T: Real>(gamma: &GammaValue, alpha: MultiIndex) -> Result<T> {
    if !is_allowable_a2(gamma, alpha)? {
        return Err(Error::NotAllowable { a1: alpha.a1, a2: alpha.a2 });
    }
    let pi2 = T::PI() * T::PI();
    match gamma {
        GammaValue::Rational(r) => Ok(T::from_rational(&monomial_norm_sq_over_pi2(r, alpha)?) * pi2),
        GammaValue::Irrational(_) => {
            let g: T = gamma.to_real();
            Ok(g * pi2 / norm_denominator(g, alpha))
        }
    }
}

/// Exact coefficients of the sub-kernel `K_j` of `gamma = m/n`:
///
/// `K_j = (n / (m pi^2)) f_j(s,t) g_j(t) s^j t^(n-1-E_j) / ((1-t)^2 (t^n - s^m)^2)`
/// with `f_j = (j+1) t^n + (m-j-1) s^m` and `g_j = g0 + g1 t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubKernelSpec {
    pub gamma: RationalExponent,
    pub j: u64,
    pub cap_height: i64,
    /// Coefficients of `t^n` and `s^m` in `f_j`.
    pub f_coeffs: [BigInt; 2],
    /// Constant and linear coefficients of `g_j`.
    pub g_coeffs: [BigRational; 2],
    pub s_exponent: u64,
    pub t_exponent: i64,
    /// `n/m`; the full prefactor is this times `pi^-2`.
    pub prefactor: BigRational,
}

pub fn build_subkernel_spec(gamma: &RationalExponent, j: i64) -> Result<SubKernelSpec> {
    let e = gamma.cap_height(j)?;
    let (m, n) = (gamma.m() as i64, gamma.n() as i64);
    let ratio = gamma.as_rational();
    let g0 = rat(j + 1) - &ratio * rat(e);
    let g1 = &ratio + &ratio * rat(e) - rat(j + 1);
    Ok(SubKernelSpec {
        gamma: *gamma,
        j: j as u64,
        cap_height: e,
        f_coeffs: [BigInt::from(j + 1), BigInt::from(m - j - 1)],
        g_coeffs: [g0, g1],
        s_exponent: j as u64,
        t_exponent: n - 1 - e,
        prefactor: frac(n, m),
    })
}

impl SubKernelSpec {
    pub fn compile<T: Real>(&self) -> Result<CompiledSubKernel<T>> {
        let to_i32 = |v: i64, what| i32::try_from(v).map_err(|_| Error::Overflow(what));
        Ok(CompiledSubKernel {
            m: to_i32(self.gamma.m() as i64, "m")?,
            n: to_i32(self.gamma.n() as i64, "n")?,
            s_exp: to_i32(self.s_exponent as i64, "s exponent")?,
            t_exp: to_i32(self.t_exponent, "t exponent")?,
            f: [
                T::lit(self.f_coeffs[0].to_f64().unwrap()),
                T::lit(self.f_coeffs[1].to_f64().unwrap()),
            ],
            g: [T::from_rational(&self.g_coeffs[0]), T::from_rational(&self.g_coeffs[1])],
            prefactor: T::from_rational(&self.prefactor) / (T::PI() * T::PI()),
        })
    }
}

/// A sub-kernel with coefficients rounded to `T`.
#[derive(Clone, Debug)]
pub struct CompiledSubKernel<T> {
    m: i32,
    n: i32,
    s_exp: i32,
    t_exp: i32,
    f: [T; 2],
    g: [T; 2],
    prefactor: T,
}

/// Kernel value together with `1 / min(|1-t|, |t^n - s^m|)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue<T> {
    pub value: Complex<T>,
    pub condition: T,
}

struct SharedFactors<T> {
    sm: Complex<T>,
    tn: Complex<T>,
    inv_den: Complex<T>,
    condition: T,
}

fn shared_factors<T: Real>(m: i32, n: i32, pair: &PolarizedPair<T>, guard: T) -> Result<SharedFactors<T>> {
    let (s, t) = (pair.s, pair.t);
    let sm = s.powi(m);
    let tn = t.powi(n);
    if !(t.norm() < T::one() && sm.norm() < tn.norm()) {
        return Err(Error::NotInDomain(format!(
            "need |s|^m < |t|^n < 1, got |s|^m = {:e}, |t|^n = {:e}",
            sm.norm().to_f64().unwrap_or(f64::NAN),
            tn.norm().to_f64().unwrap_or(f64::NAN)
        )));
    }
    let one_minus_t = Complex::new(T::one(), T::zero()) - t;
    let diff = tn - sm;
    let (a, b) = (one_minus_t.norm(), diff.norm());
    if a <= guard {
        return Err(Error::NearSingular { factor: "1 - t", magnitude: a.to_f64().unwrap_or(0.0) });
    }
    if b <= guard {
        return Err(Error::NearSingular { factor: "t^n - s^m", magnitude: b.to_f64().unwrap_or(0.0) });
    }
    let den = one_minus_t * one_minus_t * diff * diff;
    let worst = a.min(b);
    Ok(SharedFactors { sm, tn, inv_den: den.inv(), condition: T::one() / (worst * worst) })
}

impl<T: Real> CompiledSubKernel<T> {
    fn numerator(&self, pair: &PolarizedPair<T>, sm: Complex<T>, tn: Complex<T>) -> Complex<T> {
        let f = tn * self.f[0] + sm * self.f[1];
        let g = pair.t * self.g[1] + self.g[0];
        f * g * pair.s.powi(self.s_exp) * pair.t.powi(self.t_exp) * self.prefactor
    }

    pub fn eval(&self, pair: &PolarizedPair<T>, guard: T) -> Result<KernelValue<T>> {
        let sh = shared_factors(self.m, self.n, pair, guard)?;
        Ok(KernelValue { value: self.numerator(pair, sh.sm, sh.tn) * sh.inv_den, condition: sh.condition })
    }
}

/// `K_j(s, t)` from its exact coefficients.
pub fn subkernel_eval<T: Real>(spec: &SubKernelSpec, pair: &PolarizedPair<T>, guard: T) -> Result<Complex<T>> {
    Ok(spec.compile::<T>()?.eval(pair, guard)?.value)
}

/// Closed-form Bergman kernel of `H_{m/n}`, precompiled for repeated use.
#[derive(Clone, Debug)]
pub struct BergmanKernel<T> {
    gamma: RationalExponent,
    gamma_real: T,
    parts: Vec<CompiledSubKernel<T>>,
    guard: T,
}

impl<T: Real> BergmanKernel<T> {
    pub fn new(gamma: &RationalExponent) -> Result<Self> {
        let parts = (0..gamma.m() as i64)
            .map(|j| build_subkernel_spec(gamma, j)?.compile())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gamma: *gamma, gamma_real: gamma.to_real(), parts, guard: T::lit(DEFAULT_GUARD) })
    }

    pub fn with_guard(mut self, guard: T) -> Self {
        self.guard = guard;
        self
    }

    pub fn gamma(&self) -> &RationalExponent {
        &self.gamma
    }

    /// Sum of the sub-kernels at a polarized pair; no domain check on points.
    pub fn eval_pair(&self, pair: &PolarizedPair<T>) -> Result<KernelValue<T>> {
        let p0 = &self.parts[0];
        let sh = shared_factors(p0.m, p0.n, pair, self.guard)?;
        let num = self
            .parts
            .iter()
            .fold(Complex::<T>::zero(), |acc, k| acc + k.numerator(pair, sh.sm, sh.tn));
        Ok(KernelValue { value: num * sh.inv_den, condition: sh.condition })
    }

    pub fn subkernel_pair(&self, j: usize, pair: &PolarizedPair<T>) -> Result<Complex<T>> {
        let part = self.parts.get(j).ok_or(Error::InvalidResidue { j: j as i64, m: self.gamma.m() })?;
        Ok(part.eval(pair, self.guard)?.value)
    }

    fn check_domain(&self, z: &CPoint2<T>, which: &str) -> Result<()> {
        if z.in_domain(self.gamma_real) {
            Ok(())
        } else {
            Err(Error::NotInDomain(format!("{which} is outside H_{}", self.gamma)))
        }
    }

    pub fn eval_detailed(&self, z: &CPoint2<T>, w: &CPoint2<T>) -> Result<KernelValue<T>> {
        self.check_domain(z, "z")?;
        self.check_domain(w, "w")?;
        self.eval_pair(&PolarizedPair::from_points(z, w))
    }

    pub fn eval(&self, z: &CPoint2<T>, w: &CPoint2<T>) -> Result<Complex<T>> {
        Ok(self.eval_detailed(z, w)?.value)
    }
}

/// Closed-form `B_{m/n}(z, w)` with the default singular guard.
pub fn kernel_eval<T: Real>(gamma: &RationalExponent, z: &CPoint2<T>, w: &CPoint2<T>) -> Result<Complex<T>> {
    BergmanKernel::new(gamma)?.eval(z, w)
}

/// Result of a truncated series evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesReport<T> {
    #[serde(skip)]
    pub value: Complex<T>,
    pub terms_used: u64,
    pub tail_bound: f64,
    pub converged: bool,
}

/// How a kernel value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMethod {
    Closed,
    Series,
}

/// Serializable record of one kernel evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub gamma: GammaValue,
    pub z: CPoint2<f64>,
    pub w: CPoint2<f64>,
    pub value: ComplexJson,
    pub method: KernelMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms_used: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    /// `1 / min(|1-t|, |t^n - s^m|)^2` for the closed form; `1 / (1 - |t|)^2` for the series.
    pub condition: f64,
}

impl KernelEvaluation {
    pub fn closed(gamma: &RationalExponent, z: &CPoint2<f64>, w: &CPoint2<f64>) -> Result<Self> {
        let kv = BergmanKernel::<f64>::new(gamma)?.eval_detailed(z, w)?;
        Ok(Self {
            gamma: GammaValue::Rational(*gamma),
            z: *z,
            w: *w,
            value: kv.value.into(),
            method: KernelMethod::Closed,
            terms_used: None,
            tail_bound: None,
            condition: kv.condition,
        })
    }

    pub fn series(gamma: &GammaValue, z: &CPoint2<f64>, w: &CPoint2<f64>, tol: f64) -> Result<Self> {
        let rep = kernel_series_eval(gamma, z, w, tol)?;
        let t = z.z2 * w.z2.conj();
        Ok(Self {
            gamma: gamma.clone(),
            z: *z,
            w: *w,
            value: rep.value.into(),
            method: KernelMethod::Series,
            terms_used: Some(rep.terms_used),
            tail_bound: Some(rep.tail_bound),
            condition: (1.0 - t.norm()).powi(-2),
        })
    }
}

/// Least allowable `a2` in column `a1` for any exponent.
pub fn column_floor(gamma: &GammaValue, a1: i64) -> Result<i64> {
    match gamma {
        GammaValue::Rational(r) => r.min_alpha2(a1),
        GammaValue::Irrational(_) => {
            let g = gamma.to_f64();
            let mut a2 = (-1.0 - (a1 as f64 + 1.0) / g).floor() as i64 + 1;
            while is_allowable_a2(gamma, MultiIndex::new(a1, a2 - 1))? {
                a2 -= 1;
            }
            while !is_allowable_a2(gamma, MultiIndex::new(a1, a2))? {
                a2 += 1;
            }
            Ok(a2)
        }
    }
}

/// `sum_{i >= start} (i + 1) r^i`.
fn weighted_geometric_tail(start: u64, r: f64) -> f64 {
    if r <= 0.0 {
        return if start == 0 { 1.0 } else { 0.0 };
    }
    let n = start as f64;
    r.powf(n) * ((n + 1.0) / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)))
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy)]
struct CompensatedSum<T> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: Real> CompensatedSum<T> {
    fn new() -> Self {
        Self { sum: Complex::zero(), comp: Complex::zero() }
    }

    fn add_part(sum: &mut T, comp: &mut T, x: T) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    fn add(&mut self, x: Complex<T>) {
        Self::add_part(&mut self.sum.re, &mut self.comp.re, x.re);
        Self::add_part(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    fn value(&self) -> Complex<T> {
        self.sum + self.comp
    }
}

/// Partial sum over columns `0..cols` and rows `floor..floor+rows`.
fn series_box<T: Real>(
    gamma: &GammaValue,
    pair: &PolarizedPair<T>,
    floors: &[i64],
    cols: usize,
    rows: usize,
) -> Complex<T> {
    let g: T = gamma.to_real();
    let inv = T::one() / (g * T::PI() * T::PI());
    let (s, t) = (pair.s, pair.t);
    let mut acc = CompensatedSum::new();
    let mut base = t.powi(floors[0] as i32); // s^a1 t^floor(a1)
    for a1 in 0..cols {
        if a1 > 0 {
            let step = floors[a1] - floors[a1 - 1];
            base = base * s * t.powi(step as i32);
        }
        if base.re == T::zero() && base.im == T::zero() {
            break;
        }
        let a = T::from_int(a1 as i64 + 1);
        let mut term = base;
        for k in 0..rows {
            let b = T::from_int(floors[a1] + k as i64 + 1);
            acc.add(term * ((a * a + g * a * b) * inv));
            term *= t;
        }
    }
    acc.value()
}

/// `B_gamma(z, w)` as the monomial series
/// `sum (1/(gamma pi^2)) [(a1+1)^2 + gamma (a1+1)(a2+1)] s^a1 t^a2`,
/// truncated once a geometric majorant of the omitted terms is below `tol`.
pub fn kernel_series_eval<T: Real>(
    gamma: &GammaValue,
    z: &CPoint2<T>,
    w: &CPoint2<T>,
    tol: f64,
) -> Result<SeriesReport<T>> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange("tolerance must be positive".into()));
    }
    let g: T = gamma.to_real();
    for (p, name) in [(z, "z"), (w, "w")] {
        if !p.in_domain(g) {
            return Err(Error::NotInDomain(format!("{name} is outside H_{gamma}")));
        }
    }
    let pair = PolarizedPair::from_points(z, w);
    series_on_pair(gamma, &pair, tol)
}

/// Series evaluation at a polarized pair with `|s| < |t|^(1/gamma)`, `0 < |t| < 1`.
pub fn series_on_pair<T: Real>(gamma: &GammaValue, pair: &PolarizedPair<T>, tol: f64) -> Result<SeriesReport<T>> {
    let gf = gamma.to_f64() * (1.0 - 1e-12);
    let x = pair.s.norm().to_f64().unwrap();
    let y = pair.t.norm().to_f64().unwrap();
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::NotInDomain(format!("|t| = {y} outside (0, 1)")));
    }
    let rho = x * y.powf(-1.0 / gf);
    if !(rho < 1.0) {
        return Err(Error::NotInDomain(format!("|s| |t|^(-1/gamma) = {rho} >= 1")));
    }
    let scale = (1.0 + 1e-9) / (std::f64::consts::PI.powi(2) * y.powf(1.0 + 1.0 / gf));
    let col_tail = |cols: usize| scale * weighted_geometric_tail(cols as u64, rho) / (1.0 - y).powi(2);
    let row_tail = |rows: usize| scale * weighted_geometric_tail(rows as u64, y) / (1.0 - rho).powi(2);

    let mut cols = 8usize;
    let mut rows = 8usize;
    let mut floors: Vec<i64> = Vec::new();
    let mut previous: Option<Complex<T>> = None;
    loop {
        let terms = (cols as u64) * (rows as u64);
        let bound = col_tail(cols) + row_tail(rows);
        if terms > SERIES_TERM_CAP {
            return Err(Error::NotConverged { terms, tail_bound: bound });
        }
        while floors.len() < cols {
            floors.push(column_floor(gamma, floors.len() as i64)?);
        }
        let value = series_box(gamma, pair, &floors, cols, rows);
        let settled = previous.is_some_and(|p| (value - p).norm().to_f64().unwrap() < tol / 4.0);
        if bound < tol / 2.0 && settled {
            return Ok(SeriesReport { value, terms_used: terms, tail_bound: bound, converged: true });
        }
        previous = Some(value);
        let (ct, rt) = (col_tail(cols), row_tail(rows));
        if ct >= tol / 4.0 || rt < tol / 4.0 {
            cols *= 2;
        }
        if rt >= tol / 4.0 {
            rows *= 2;
        }
    }
}

/// `B_gamma((0, z2), (0, w2))` as a function of `t = z2 conj(w2)`:
///
/// `t^(d-1) ((1 + gamma d) - (1 + gamma d - gamma) t) / (gamma pi^2 (1 - t)^2)`
///
/// where `d - 1` is the least allowable `a2` in column zero. For `gamma >= 1`,
/// `d = 0` and this is `(1 + (gamma - 1) t) / (gamma pi^2 t (1 - t)^2)`.
pub fn kernel_restricted_s0<T: Real>(gamma: &GammaValue, t: Complex<T>) -> Result<Complex<T>> {
    let r = t.norm();
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::OutOfRange(format!("|t| = {} must lie in (0, 1)", r)));
    }
    let d = column_floor(gamma, 0)? + 1;
    let g: T = gamma.to_real();
    let one = Complex::new(T::one(), T::zero());
    let c0 = T::one() + g * T::from_int(d);
    let num = one * c0 - t * (c0 - g);
    let omt = one - t;
    let power = i32::try_from(d - 1).map_err(|_| Error::Overflow("column floor"))?;
    Ok(num * t.powi(power) / (omt * omt) / (g * T::PI() * T::PI()))
}

/// The polynomial factor `(1 + gamma d) - (1 + gamma d - gamma) t` of
/// [`kernel_restricted_s0`], and the exponent `d - 1` of `t`.
pub fn restricted_s0_numerator<T: Real>(gamma: &GammaValue, t: Complex<T>) -> Result<(Complex<T>, i64)> {
    let d = column_floor(gamma, 0)? + 1;
    let g: T = gamma.to_real();
    let c0 = T::one() + g * T::from_int(d);
    Ok((Complex::new(c0, T::zero()) - t * (c0 - g), d - 1))
}
