//! Zeros of the Bergman kernel: explicit zero pairs for `gamma >= 2`,
//! residual certificates, exploratory slice scans and the biholomorphism
//! `(z1, z2) -> (z1 z2, z2)` onto `H_{gamma/(1+gamma)}`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{GammaValue, IrrationalGamma, RationalExponent};
use crate::kernel::{
    kernel_restricted_s0, kernel_series_eval, restricted_s0_numerator, series_on_pair, BergmanKernel, CPoint2,
    ComplexJson, PolarizedPair,
};
use crate::scalar::rat;

/// Residual below which a canonical pair is reported as a zero.
pub const CANONICAL_TOL: f64 = 1e-10;

/// Series tolerance used when verifying zeros for irrational gamma.
const VERIFY_SERIES_TOL: f64 = 1e-13;

/// How a residual was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualMethod {
    Closed,
    Series,
    Restricted,
}

/// `|B_gamma(z, w)|` at a pair together with the pair's distance to the boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCertificate {
    pub gamma: GammaValue,
    pub z: CPoint2<f64>,
    pub w: CPoint2<f64>,
    pub residual: f64,
    pub tol: f64,
    pub certified: bool,
    pub method: ResidualMethod,
    /// `|z2| - |z1|^gamma`, `1 - |z2|`, then the same for `w`.
    pub interior_margins: [f64; 4],
}

fn margins(gamma: f64, z: &CPoint2<f64>, w: &CPoint2<f64>) -> [f64; 4] {
    let (a, b) = z.margins(gamma);
    let (c, d) = w.margins(gamma);
    [a, b, c, d]
}

fn certificate(
    gamma: &GammaValue,
    z: CPoint2<f64>,
    w: CPoint2<f64>,
    residual: f64,
    tol: f64,
    method: ResidualMethod,
) -> ZeroCertificate {
    let interior_margins = margins(gamma.to_f64(), &z, &w);
    let inside = interior_margins.iter().all(|&m| m > 0.0);
    ZeroCertificate { gamma: gamma.clone(), z, w, residual, tol, certified: inside && residual <= tol, method, interior_margins }
}

/// The explicit zero pair of `B_gamma`: `((0, i c), (0, -i c))` with
/// `c = (gamma - 1)^(-1/2)` for `gamma > 2`, a separate pair for `gamma = 2`,
/// and nothing for `gamma < 2`.
pub fn canonical_zero(gamma: &GammaValue) -> Result<Option<ZeroCertificate>> {
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    match gamma.sign_affine(&BigRational::one(), &rat(-2))? {
        Ordering::Less => Ok(None),
        Ordering::Equal => {
            let r2 = std::f64::consts::FRAC_1_SQRT_2;
            let s7 = 7f64.sqrt();
            let z = CPoint2::new(i * r2, Complex64::new(s7, 1.0) / 4.0);
            let w = CPoint2::new(-i * r2, Complex64::new(s7, -1.0) / 4.0);
            let g2 = RationalExponent::new(2, 1)?;
            let residual = BergmanKernel::<f64>::new(&g2)?.eval(&z, &w)?.norm();
            Ok(Some(certificate(gamma, z, w, residual, CANONICAL_TOL, ResidualMethod::Closed)))
        }
        Ordering::Greater => {
            let c = (gamma.to_f64() - 1.0).powf(-0.5);
            let z = CPoint2::new(zero, i * c);
            let w = CPoint2::new(zero, -i * c);
            let t = z.z2 * w.z2.conj();
            let mut residual = kernel_restricted_s0(gamma, t)?.norm();
            let mut method = ResidualMethod::Restricted;
            if let GammaValue::Rational(r) = gamma {
                let closed = BergmanKernel::<f64>::new(r)?.eval(&z, &w)?.norm();
                if closed >= residual {
                    residual = closed;
                    method = ResidualMethod::Closed;
                }
            }
            Ok(Some(certificate(gamma, z, w, residual, CANONICAL_TOL, method)))
        }
    }
}

/// `|B_gamma(z, w)|` by the closed form for rational gamma and by the series
/// otherwise; certified when it is at most `tol`.
pub fn verify_zero(gamma: &GammaValue, z: &CPoint2<f64>, w: &CPoint2<f64>, tol: f64) -> Result<ZeroCertificate> {
    let g = gamma.to_f64();
    for (p, name) in [(z, "z"), (w, "w")] {
        if !p.in_domain(g) {
            return Err(Error::NotInDomain(format!("{name} is outside H_{gamma}")));
        }
    }
    let (residual, method) = match gamma {
        GammaValue::Rational(r) => (BergmanKernel::<f64>::new(r)?.eval(z, w)?.norm(), ResidualMethod::Closed),
        GammaValue::Irrational(_) => {
            let series_tol = VERIFY_SERIES_TOL.min(tol / 10.0);
            (kernel_series_eval(gamma, z, w, series_tol)?.value.norm(), ResidualMethod::Series)
        }
    };
    Ok(certificate(gamma, *z, *w, residual, tol, method))
}

/// A complex line through the polarized variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slice {
    /// `s = 0`, `0 < |t| <= t_max`.
    S0 { t_max: f64 },
    /// Fixed `s`, `0 < |t| <= t_max`; points with `|s|^gamma >= |t|` are skipped.
    FixedS { s: ComplexJson, t_max: f64 },
}

/// One sampled point of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanValue {
    pub t: ComplexJson,
    pub modulus: f64,
}

/// Minimum of `|B_gamma|` over a polar grid in `t`. Exploration data only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub gamma: GammaValue,
    pub slice: Slice,
    /// Radial and angular node count.
    pub grid: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub min_modulus: f64,
    pub argmin: ComplexJson,
    /// On the `s = 0` slice: least modulus of `B gamma pi^2 t^(1-d) (1-t)^2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_numerator: Option<f64>,
    pub evidence_only: bool,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<ScanValue>>,
}

impl ScanReport {
    /// `t_re,t_im,modulus` rows for every evaluated point.
    pub fn to_csv(&self) -> Option<String> {
        let values = self.values.as_ref()?;
        let mut out = String::from("t_re,t_im,modulus\n");
        for v in values {
            let _ = writeln!(out, "{:e},{:e},{:e}", v.t.re, v.t.im, v.modulus);
        }
        Some(out)
    }
}

enum Evaluator {
    Closed(BergmanKernel<f64>),
    Restricted,
    Series,
}

/// Scans `|B_gamma|` on `grid x grid` polar nodes `t = t_max (i+1)/grid e^(2 pi i k / grid)`.
pub fn scan_slice_min_modulus(gamma: &GammaValue, slice: Slice, grid: usize, keep_values: bool) -> Result<ScanReport> {
    if grid < 2 {
        return Err(Error::OutOfRange("grid must be at least 2".into()));
    }
    let (s, t_max) = match slice {
        Slice::S0 { t_max } => (Complex64::new(0.0, 0.0), t_max),
        Slice::FixedS { s, t_max } => (Complex64::new(s.re, s.im), t_max),
    };
    if !(t_max > 0.0 && t_max < 1.0) {
        return Err(Error::OutOfRange(format!("t_max = {t_max} must lie in (0, 1)")));
    }
    let is_s0 = matches!(slice, Slice::S0 { .. });
    let evaluator = match (gamma, is_s0) {
        (GammaValue::Rational(r), _) => Evaluator::Closed(BergmanKernel::new(r)?),
        (GammaValue::Irrational(_), true) => Evaluator::Restricted,
        (GammaValue::Irrational(_), false) => Evaluator::Series,
    };
    let g = gamma.to_f64();
    let (_, shift) = restricted_s0_numerator::<f64>(gamma, Complex64::new(0.5, 0.0))?;
    let cells: Vec<Option<(Complex64, f64, f64)>> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (i, k) = (idx / grid, idx % grid);
            let r = t_max * (i + 1) as f64 / grid as f64;
            let t = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / grid as f64);
            let pair = PolarizedPair::new(s, t);
            let b = match &evaluator {
                Evaluator::Closed(k) => k.eval_pair(&pair).ok().map(|v| v.value),
                Evaluator::Restricted => kernel_restricted_s0(gamma, t).ok(),
                Evaluator::Series => series_on_pair(gamma, &pair, 1e-12).ok().map(|rep| rep.value),
            }?;
            let one = Complex64::new(1.0, 0.0);
            let num = b * g * std::f64::consts::PI.powi(2) * t.powi((-shift) as i32) * (one - t) * (one - t);
            Some((t, b.norm(), num.norm()))
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    let mut min_num = f64::INFINITY;
    let mut evaluated = 0;
    for (idx, cell) in cells.iter().enumerate() {
        if let Some((_, m, n)) = cell {
            evaluated += 1;
            min_num = min_num.min(*n);
            if best.is_none_or(|(_, bm)| *m < bm) {
                best = Some((idx, *m));
            }
        }
    }
    let (best_idx, min_modulus) = best.ok_or_else(|| Error::OutOfRange("no grid point could be evaluated".into()))?;
    let argmin = ComplexJson::from(cells[best_idx].unwrap().0);
    let values = keep_values.then(|| {
        cells
            .iter()
            .flatten()
            .map(|(t, m, _)| ScanValue { t: ComplexJson::from(*t), modulus: *m })
            .collect()
    });
    let note = if gamma.sign_affine(&BigRational::one(), &rat(-1))? == Ordering::Greater
        && gamma.sign_affine(&BigRational::one(), &rat(-2))? == Ordering::Less
    {
        "sampled minimum only; for 1 < gamma < 2 the existence of zeros is open and a slice scan does not settle it"
    } else {
        "sampled minimum only; a positive minimum is not a proof of non-vanishing"
    };
    Ok(ScanReport {
        gamma: gamma.clone(),
        slice,
        grid,
        evaluated,
        skipped: cells.len() - evaluated,
        min_modulus,
        argmin,
        min_numerator: is_s0.then_some(min_num),
        evidence_only: true,
        note: note.into(),
        values,
    })
}

/// `[gamma/(1+gamma), gamma/(1+2 gamma), ..., gamma/(1+k gamma)]`.
pub fn biholo_chain(gamma: &GammaValue, k: usize) -> Result<Vec<GammaValue>> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    (1..=k as i64)
        .map(|i| match gamma {
            GammaValue::Rational(r) => {
                let denom = (r.n() as i64)
                    .checked_add(i.checked_mul(r.m() as i64).ok_or(Error::Overflow("chain"))?)
                    .ok_or(Error::Overflow("chain"))?;
                Ok(GammaValue::Rational(RationalExponent::new(r.m() as i64, denom)?))
            }
            GammaValue::Irrational(_) => {
                // x -> x / (1 + i x) is increasing, so endpoints map to endpoints.
                let (lo, hi) = gamma.enclosure();
                let f = |x: BigRational| &x / (BigRational::one() + rat(i) * &x);
                let (a, b) = (f(lo), f(hi));
                let two = BigRational::from_integer(BigInt::from(2));
                let g = IrrationalGamma::with_radius((&a + &b) / &two, (&b - &a) / two)?;
                Ok(GammaValue::Irrational(g.with_label(format!("{gamma}/(1+{i}*{gamma})"))))
            }
        })
        .collect()
}

/// The exponent `m/(m+n)` of the image of `H_{m/n}` under `(z1, z2) -> (z1 z2, z2)`.
pub fn psi_target(gamma: &RationalExponent) -> Result<RationalExponent> {
    RationalExponent::new(gamma.m() as i64, (gamma.m() + gamma.n()) as i64)
}

/// `|B_gamma(z,w) - z2 conj(w2) B_{gamma/(1+gamma)}(Psi z, Psi w)| / |B_gamma(z,w)|`.
pub fn transform_check(gamma: &RationalExponent, z: &CPoint2<f64>, w: &CPoint2<f64>) -> Result<f64> {
    let lhs = BergmanKernel::<f64>::new(gamma)?.eval(z, w)?;
    let target = psi_target(gamma)?;
    let rhs = BergmanKernel::<f64>::new(&target)?.eval(&z.psi(), &w.psi())? * (z.z2 * w.z2.conj());
    Ok((lhs - rhs).norm() / lhs.norm())
}
