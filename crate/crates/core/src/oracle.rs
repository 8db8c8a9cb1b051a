//! Independent numerical oracles: the analytic radial reduction of monomial
//! norms and a reproducible Monte-Carlo integrator over `H_gamma`.
//!
//! Sampling uses `u_k = |z_k|^2`, so `dV = (1/4) du1 dth1 du2 dth2`. With
//! `u2 ~ U(0,1)` and `u1 ~ U(0, u2^(1/gamma))` the integral equals
//! `pi^2 E[f(z) u2^(1/gamma)]`. Sample `i` always consumes the ChaCha8 words
//! `8i..8i+8` of the stream keyed by the seed, so results do not depend on how
//! samples are split between threads.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::{GammaValue, RationalExponent};
use crate::kernel::{series_on_pair, BergmanKernel, CPoint2, PolarizedPair};
use crate::lattice::{is_allowable_a2, MultiIndex};
use crate::scalar::{rat, ratio_to_f64, rational_from_f64};

/// Samples per independently keyed block.
const CHUNK: u64 = 4096;

/// Per-sample distance kept from the kernel's singular factors.
pub const SAMPLE_GUARD: f64 = 1e-6;

/// Largest tolerated fraction of rejected samples.
pub const MAX_REJECTED_FRACTION: f64 = 0.01;

/// The Reinhardt shadow `{0 < r1 < r2^(1/gamma), 0 < r2 < 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowRegion {
    pub gamma: GammaValue,
}

impl ShadowRegion {
    pub fn new(gamma: GammaValue) -> Self {
        Self { gamma }
    }

    /// `r2^(1/gamma)` with the positive real root.
    pub fn r1_bound(&self, r2: f64) -> f64 {
        r2.powf(1.0 / self.gamma.to_f64())
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        r2 > 0.0 && r2 < 1.0 && r1 >= 0.0 && r1 < self.r1_bound(r2)
    }
}

/// `4 pi^2 int int r1^a r2^b` over the shadow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialIntegral {
    Finite(f64),
    Divergent,
}

/// `4 pi^2 / ((a+1)(b + 1 + (a+1)/gamma))`, or `Divergent` when
/// `b + (a+1)/gamma <= -1`. The rational factor is exact for rational gamma.
pub fn radial_monomial_integral(gamma: &GammaValue, a: f64, b: f64) -> Result<RadialIntegral> {
    if !(a > -1.0) {
        return Err(Error::InnerDivergent(a));
    }
    let qa = rational_from_f64(a).ok_or_else(|| Error::OutOfRange(format!("a = {a}")))?;
    let qb = rational_from_f64(b).ok_or_else(|| Error::OutOfRange(format!("b = {b}")))?;
    let a1 = &qa + BigRational::one();
    let b1 = &qb + BigRational::one();
    // b + 1 + (a+1)/gamma > 0  <=>  gamma (b+1) + (a+1) > 0.
    if gamma.sign_affine(&b1, &a1)? != Ordering::Greater {
        return Ok(RadialIntegral::Divergent);
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let value = match gamma {
        GammaValue::Rational(r) => {
            let q = rat(4) / (&a1 * (&b1 + &a1 / r.as_rational()));
            ratio_to_f64(&q) * pi2
        }
        GammaValue::Irrational(_) => {
            let (af, bf) = (a + 1.0, b + 1.0);
            4.0 * pi2 / (af * (bf + af / gamma.to_f64()))
        }
    };
    Ok(RadialIntegral::Finite(value))
}

/// Monte-Carlo estimate of `int f dV` over `H_gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: Complex64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    /// Samples whose integrand was rejected and counted as zero.
    pub rejected: u64,
}

impl McEstimate {
    /// `|value - target| <= k * stderr`.
    pub fn agrees_with(&self, target: Complex64, k: f64) -> bool {
        (self.value - target).norm() <= k * self.stderr
    }
}

impl Serialize for McEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("McEstimate", 5)?;
        st.serialize_field("value", &crate::kernel::ComplexJson::from(self.value))?;
        st.serialize_field("stderr", &self.stderr)?;
        st.serialize_field("samples", &self.samples)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("rejected", &self.rejected)?;
        st.end()
    }
}

/// Count, mean and summed squared deviation (real plus imaginary parts).
#[derive(Clone, Copy, Debug)]
struct Moments {
    count: u64,
    mean: Complex64,
    m2: f64,
    rejected: u64,
}

impl Moments {
    const EMPTY: Self = Self { count: 0, mean: Complex64::new(0.0, 0.0), m2: 0.0, rejected: 0 };

    fn push(&mut self, x: Complex64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += (delta.conj() * (x - self.mean)).re;
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.count == 0 {
            return Self { rejected: a.rejected + b.rejected, ..b };
        }
        if b.count == 0 {
            return Self { rejected: a.rejected + b.rejected, ..a };
        }
        let n = a.count + b.count;
        let delta = b.mean - a.mean;
        let wb = b.count as f64 / n as f64;
        Self {
            count: n,
            mean: a.mean + delta * wb,
            m2: a.m2 + b.m2 + delta.norm_sqr() * a.count as f64 * wb,
            rejected: a.rejected + b.rejected,
        }
    }
}

/// Fixed-shape pairwise reduction; the tree depends only on `items.len()`.
fn pairwise(items: &[Moments]) -> Moments {
    match items.len() {
        0 => Moments::EMPTY,
        1 => items[0],
        n => Moments::merge(pairwise(&items[..n / 2]), pairwise(&items[n / 2..])),
    }
}

#[inline]
fn unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// The point and weight of sample `i`, drawn from `rng` positioned at word `8i`.
#[inline]
fn draw(rng: &mut ChaCha8Rng, inv_gamma: f64) -> (CPoint2<f64>, f64) {
    let tau = std::f64::consts::TAU;
    let u2 = unit(rng.next_u64());
    let weight = u2.powf(inv_gamma);
    let u1 = unit(rng.next_u64()) * weight;
    let th1 = tau * unit(rng.next_u64());
    let th2 = tau * unit(rng.next_u64());
    let z = CPoint2::new(Complex64::from_polar(u1.sqrt(), th1), Complex64::from_polar(u2.sqrt(), th2));
    (z, weight)
}

fn chunk_moments<F>(seed: u64, start: u64, len: u64, inv_gamma: f64, f: &F) -> Moments
where
    F: Fn(&CPoint2<f64>) -> Option<Complex64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(start as u128 * 8);
    let mut acc = Moments::EMPTY;
    for _ in 0..len {
        let (z, weight) = draw(&mut rng, inv_gamma);
        match f(&z) {
            Some(v) => acc.push(v * weight),
            None => {
                acc.push(Complex64::zero());
                acc.rejected += 1;
            }
        }
    }
    acc
}

fn run<F>(gamma: &GammaValue, f: &F, samples: u64, seed: u64) -> Result<McEstimate>
where
    F: Fn(&CPoint2<f64>) -> Option<Complex64> + Sync,
{
    if samples == 0 {
        return Err(Error::OutOfRange("at least one sample is required".into()));
    }
    let inv_gamma = 1.0 / gamma.to_f64();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            chunk_moments(seed, start, CHUNK.min(samples - start), inv_gamma, f)
        })
        .collect();
    let total = pairwise(&parts);
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let var = if total.count > 1 { total.m2 / (total.count - 1) as f64 } else { 0.0 };
    Ok(McEstimate {
        value: total.mean * pi2,
        stderr: pi2 * (var / total.count as f64).sqrt(),
        samples,
        seed,
        rejected: total.rejected,
    })
}

/// Monte-Carlo estimate of `int_{H_gamma} f dV`.
pub fn mc_integral<F>(gamma: &GammaValue, f: F, samples: u64, seed: u64) -> Result<McEstimate>
where
    F: Fn(&CPoint2<f64>) -> Complex64 + Sync,
{
    run(gamma, &|z: &CPoint2<f64>| Some(f(z)), samples, seed)
}

/// As [`mc_integral`], with `None` marking a rejected sample. Fails with
/// `UnreliableEstimate` when more than 1% of samples are rejected.
pub fn mc_integral_guarded<F>(gamma: &GammaValue, f: F, samples: u64, seed: u64) -> Result<McEstimate>
where
    F: Fn(&CPoint2<f64>) -> Option<Complex64> + Sync,
{
    let est = run(gamma, &f, samples, seed)?;
    if est.rejected as f64 > MAX_REJECTED_FRACTION * samples as f64 {
        return Err(Error::UnreliableEstimate(format!("{} of {} samples rejected", est.rejected, samples)));
    }
    Ok(est)
}

/// [`mc_integral`] on a dedicated pool of `threads` workers.
pub fn mc_integral_with_threads<F>(
    gamma: &GammaValue,
    f: F,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<McEstimate>
where
    F: Fn(&CPoint2<f64>) -> Complex64 + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
    pool.install(|| mc_integral(gamma, f, samples, seed))
}

/// `B_gamma(z, w)` as a per-sample integrand in `w`, `None` near the singular set.
fn kernel_in_w<'a>(kernel: &'a BergmanKernel<f64>, z: &'a CPoint2<f64>) -> impl Fn(&CPoint2<f64>) -> Option<Complex64> + 'a {
    move |w: &CPoint2<f64>| kernel.eval_pair(&PolarizedPair::from_points(z, w)).ok().map(|k| k.value)
}

/// Estimate of `int B_gamma(z, w) w^beta dV(w) - z^beta`, which vanishes by
/// the reproducing property.
pub fn reproducing_check(
    gamma: &RationalExponent,
    beta: MultiIndex,
    z: &CPoint2<f64>,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    let g = GammaValue::Rational(*gamma);
    if !is_allowable_a2(&g, beta)? {
        return Err(Error::NotAllowable { a1: beta.a1, a2: beta.a2 });
    }
    if !z.in_domain(gamma.to_real()) {
        return Err(Error::NotInDomain("z is outside the domain".into()));
    }
    let kernel = BergmanKernel::<f64>::new(gamma)?.with_guard(SAMPLE_GUARD);
    let k = kernel_in_w(&kernel, z);
    let mut est = mc_integral_guarded(&g, |w: &CPoint2<f64>| k(w).map(|v| v * w.monomial(beta)), samples, seed)?;
    est.value -= z.monomial(beta);
    Ok(est)
}

/// Series tolerance used per sample when gamma is irrational.
const ORACLE_SERIES_TOL: f64 = 1e-10;

/// Estimate of `(B_gamma f)(z)` for `f(w) = w1^b1 conj(w2)^b2`.
pub fn projection_oracle(
    gamma: &GammaValue,
    beta: MultiIndex,
    z: &CPoint2<f64>,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    for alpha in [beta, MultiIndex::new(beta.a1, -beta.a2)] {
        if !is_allowable_a2(gamma, alpha)? {
            return Err(Error::NotAllowable { a1: alpha.a1, a2: alpha.a2 });
        }
    }
    if !z.in_domain(gamma.to_f64()) {
        return Err(Error::NotInDomain("z is outside the domain".into()));
    }
    let input = |w: &CPoint2<f64>| w.z1.powi(beta.a1 as i32) * w.z2.conj().powi(beta.a2 as i32);
    match gamma {
        GammaValue::Rational(r) => {
            let kernel = BergmanKernel::<f64>::new(r)?.with_guard(SAMPLE_GUARD);
            let k = kernel_in_w(&kernel, z);
            mc_integral_guarded(gamma, |w: &CPoint2<f64>| k(w).map(|v| v * input(w)), samples, seed)
        }
        GammaValue::Irrational(_) => mc_integral_guarded(
            gamma,
            |w: &CPoint2<f64>| {
                let pair = PolarizedPair::from_points(z, w);
                series_on_pair(gamma, &pair, ORACLE_SERIES_TOL).ok().map(|r| r.value * input(w))
            },
            samples,
            seed,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g(m: i64, n: i64) -> GammaValue {
        GammaValue::rational(m, n).unwrap()
    }

    #[test]
    fn radial_values() {
        match radial_monomial_integral(&g(1, 1), 1.0, 1.0).unwrap() {
            RadialIntegral::Finite(v) => assert!((v - PI * PI / 2.0).abs() < 1e-14),
            RadialIntegral::Divergent => panic!("finite"),
        }
        match radial_monomial_integral(&g(3, 2), 1.0, -1.0).unwrap() {
            RadialIntegral::Finite(v) => assert!((v - 1.5 * PI * PI).abs() < 1e-13),
            RadialIntegral::Divergent => panic!("finite"),
        }
        assert_eq!(radial_monomial_integral(&g(1, 1), 1.0, -3.0).unwrap(), RadialIntegral::Divergent);
        assert!(matches!(radial_monomial_integral(&g(1, 1), -1.0, 0.0), Err(Error::InnerDivergent(_))));
    }

    #[test]
    fn shadow() {
        let s = ShadowRegion::new(g(2, 1));
        assert!(s.contains(0.5, 0.5));
        assert!(!s.contains(0.8, 0.5));
        assert!(!s.contains(0.1, 1.0));
    }

    #[test]
    fn volume_and_orthogonality() {
        let vol = mc_integral(&g(1, 1), |_| Complex64::new(1.0, 0.0), 200_000, 7).unwrap();
        assert!(vol.agrees_with(Complex64::new(PI * PI / 2.0, 0.0), 4.0));
        let orth = mc_integral(&g(1, 1), |z| z.z1 * z.z2.conj(), 200_000, 8).unwrap();
        assert!(orth.agrees_with(Complex64::zero(), 4.0));
        let norm = mc_integral(&g(1, 1), |z| Complex64::new(z.z2.norm_sqr().recip(), 0.0), 200_000, 9).unwrap();
        assert!(norm.agrees_with(Complex64::new(PI * PI, 0.0), 4.0));
    }

    #[test]
    fn chunking_is_invisible() {
        let f = |z: &CPoint2<f64>| z.z1 + z.z2 * z.z2;
        let a = mc_integral(&g(3, 2), f, 10_000, 3).unwrap();
        let b = mc_integral_with_threads(&g(3, 2), f, 10_000, 3, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.value, mc_integral(&g(3, 2), f, 10_000, 4).unwrap().value);
    }

    #[test]
    fn rejections_are_counted() {
        let r = mc_integral_guarded(&g(1, 1), |z| (z.z2.norm() > 0.2).then_some(Complex64::new(1.0, 0.0)), 5000, 1);
        assert!(matches!(r, Err(Error::UnreliableEstimate(_))));
    }
}
