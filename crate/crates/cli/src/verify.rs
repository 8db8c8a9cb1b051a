//! Self-check suites behind `hgamma verify`. Each check compares two
//! independent computations; the suite fails if any check does. Monte-Carlo
//! and random-pair suites draw from the seed, the others ignore it.

use hgamma::exponent::IrrationalGamma;
use hgamma::kernel::{column_floor, kernel_series_eval};
use hgamma::lp::{bergman_interval_formula, radial_exponent, subprojection_interval_direct};
use hgamma::oracle::RadialIntegral;
use hgamma::scalar::{frac, rat};
use hgamma::zeros::psi_target;
use hgamma::{
    bergman_interval, canonical_zero, is_allowable_a2, monomial_norm_sq, projection_constant, projection_oracle,
    radial_monomial_integral, reproducing_check, schur_probe_disc, schur_window, subprojection_interval,
    transform_check, verify_zero, witness, Complex64, GammaValue, Kernel, MultiIndex, Point, RationalExponent,
    TypeAParams,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::{CliError, Output, Suite};

pub const NORM_REL_TOL: f64 = 1e-10;
pub const SERIES_REL_TOL: f64 = 1e-8;
pub const TRANSFORM_TOL: f64 = 1e-8;
pub const MC_SAMPLES: u64 = 200_000;
pub const MC_SIGMAS: f64 = 4.0;
pub const SCHUR_GROWTH: f64 = 2.0;
pub const SCHUR_CENTER_TOL: f64 = 1e-8;
const SCHUR_NODES: usize = 200_000;
const INTERVAL_MAX_SUM: u64 = 30;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    /// Records an evaluation error as a failed check.
    fn attempt<T>(&mut self, name: &str, r: hgamma::Result<T>) -> Option<T> {
        r.map_err(|e| self.record(name, false, e.to_string())).ok()
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Norms => "norms",
        Suite::Series => "series",
        Suite::Reproducing => "reproducing",
        Suite::Schur => "schur",
        Suite::Biholo => "biholo",
        Suite::Intervals => "intervals",
    }
}

pub fn report(suite: Suite, seed: u64) -> SuiteReport {
    let mut c = Checks::default();
    match suite {
        Suite::Norms => norms(&mut c),
        Suite::Series => series(&mut c, seed),
        Suite::Reproducing => reproducing(&mut c, seed),
        Suite::Schur => schur(&mut c),
        Suite::Biholo => biholo(&mut c, seed),
        Suite::Intervals => intervals(&mut c),
    }
    let failed = c.0.iter().filter(|k| !k.passed).count();
    SuiteReport { suite: suite_name(suite), seed, passed: failed == 0, total: c.0.len(), failed, checks: c.0 }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Output, CliError> {
    let r = report(suite, seed);
    let failure = (!r.passed).then(|| CliError::VerifyFailed { suite: r.suite.into(), failed: r.failed, total: r.total });
    Ok(Output { json: Some(json!(r)), artifact: None, failure })
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn phase(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r, std::f64::consts::TAU * uniform(rng))
}

/// Pair inside `H_{m/n}` with `|t| <= 0.8` and `|s|^m <= 0.5 |t|^n`.
fn sample_pair(rng: &mut ChaCha8Rng, m: u64, n: u64) -> (Point, Point) {
    let gamma = m as f64 / n as f64;
    let shrink = 0.5f64.powf(1.0 / (2.0 * m as f64));
    let rz2 = 0.25 + 0.7 * uniform(rng);
    let rw2 = (0.8 / rz2).min(0.95) * (0.3 + 0.7 * uniform(rng));
    let rz1 = uniform(rng) * rz2.powf(1.0 / gamma) * shrink;
    let rw1 = uniform(rng) * rw2.powf(1.0 / gamma) * shrink;
    (Point::new(phase(rng, rz1), phase(rng, rz2)), Point::new(phase(rng, rw1), phase(rng, rw2)))
}

fn norms(c: &mut Checks) {
    let s2: GammaValue = IrrationalGamma::sqrt(2, 60).expect("2 is not a square").into();
    let mut gammas: Vec<GammaValue> = [(1, 1), (3, 2), (2, 3), (3, 1)]
        .iter()
        .map(|&(m, n)| GammaValue::rational(m, n).expect("positive"))
        .collect();
    gammas.push(s2);
    for gamma in &gammas {
        let mut worst: f64 = 0.0;
        let mut bad = None;
        for a1 in 0..6i64 {
            let Some(floor) = c.attempt("column floor", column_floor(gamma, a1)) else { return };
            for a2 in floor..floor + 4 {
                let alpha = MultiIndex::new(a1, a2);
                let norm = monomial_norm_sq::<f64>(gamma, alpha);
                let radial = radial_monomial_integral(gamma, (2 * a1 + 1) as f64, (2 * a2 + 1) as f64);
                match (norm, radial) {
                    (Ok(x), Ok(RadialIntegral::Finite(y))) => worst = worst.max((x - y).abs() / x),
                    _ => bad = bad.or(Some(alpha)),
                }
            }
        }
        let passed = bad.is_none() && worst <= NORM_REL_TOL;
        c.record(format!("norm vs radial, gamma {gamma}"), passed, match bad {
            Some(a) => format!("evaluation failed at ({},{})", a.a1, a.a2),
            None => format!("worst relative difference {worst:.2e}"),
        });
        let mut mismatches = 0;
        for a1 in 0..8i64 {
            for a2 in -12..4i64 {
                let alpha = MultiIndex::new(a1, a2);
                let verdict = is_allowable_a2(gamma, alpha);
                let radial = radial_monomial_integral(gamma, (2 * a1 + 1) as f64, (2 * a2 + 1) as f64);
                match (verdict, radial) {
                    (Ok(v), Ok(r)) if v != (r == RadialIntegral::Divergent) => {}
                    _ => mismatches += 1,
                }
            }
        }
        c.record(format!("divergence verdicts, gamma {gamma}"), mismatches == 0, format!("{mismatches} mismatches"));
    }
}

fn series(c: &mut Checks, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (m, n) in [(1u64, 1u64), (2, 1), (3, 2), (5, 3), (1, 2)] {
        let gamma = RationalExponent::new(m as i64, n as i64).expect("positive");
        let name = format!("closed form vs series, gamma {gamma}");
        let Some(kernel) = c.attempt(&name, Kernel::new(&gamma)) else { continue };
        let mut worst: f64 = 0.0;
        let mut failure = None;
        for _ in 0..10 {
            let (z, w) = sample_pair(&mut rng, m, n);
            let outcome = kernel.eval(&z, &w).and_then(|closed| {
                let rep = kernel_series_eval(&GammaValue::Rational(gamma), &z, &w, 1e-11 * closed.norm())?;
                Ok((rep.value - closed).norm() / closed.norm())
            });
            match outcome {
                Ok(rel) => worst = worst.max(rel),
                Err(e) => failure = Some(e.to_string()),
            }
        }
        let passed = failure.is_none() && worst <= SERIES_REL_TOL;
        c.record(name, passed, failure.unwrap_or_else(|| format!("10 pairs, worst relative difference {worst:.2e}")));
    }
}

fn reproducing(c: &mut Checks, seed: u64) {
    let z = Point::new(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0));
    let g1 = GammaValue::rational(1, 1).expect("positive");
    let beta = MultiIndex::new(0, 1);
    if let Some(pc) = c.attempt("projection constant", projection_constant(&g1, beta)) {
        let target = z.monomial(pc.image) * pc.value;
        if let Some(est) = c.attempt("projection oracle", projection_oracle(&g1, beta, &z, MC_SAMPLES, seed)) {
            let sig = (est.value - target).norm() / est.stderr;
            c.record("projection oracle, gamma 1", sig <= MC_SIGMAS, format!("C = {}, {sig:.2} sigma", pc.value));
        }
    }
    for ((m, n), beta, z) in [
        ((1, 1), MultiIndex::new(1, 0), z),
        ((1, 1), MultiIndex::new(0, -1), z),
        ((3, 2), MultiIndex::new(1, -2), Point::new(Complex64::new(0.2, 0.0), Complex64::new(0.6, 0.0))),
    ] {
        let gamma = RationalExponent::new(m, n).expect("positive");
        let name = format!("reproducing defect, gamma {gamma}, beta ({},{})", beta.a1, beta.a2);
        if let Some(d) = c.attempt(&name, reproducing_check(&gamma, beta, &z, MC_SAMPLES, seed)) {
            let sig = d.value.norm() / d.stderr;
            c.record(name, sig <= MC_SIGMAS, format!("{sig:.2} sigma"));
        }
    }
}

fn schur(c: &mut Checks) {
    for eps in [0.25, 0.5, 0.75] {
        for beta in [0.0, 0.5, 1.0] {
            let name = format!("Schur ratio growth, eps {eps}, beta {beta}");
            let ratios: hgamma::Result<Vec<f64>> =
                [0.9, 0.99, 0.999].iter().map(|&r| schur_probe_disc(eps, beta, r, SCHUR_NODES).map(|p| p.ratio)).collect();
            if let Some(ratios) = c.attempt(&name, ratios) {
                let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
                let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
                c.record(name, hi / lo <= SCHUR_GROWTH, format!("growth {:.4}", hi / lo));
            }
        }
    }
    if let Some(p) = c.attempt("Schur probe at the center", schur_probe_disc(0.5, 0.0, 0.0, SCHUR_NODES)) {
        let err = (p.value - std::f64::consts::TAU).abs();
        c.record("Schur probe at the center", err <= SCHUR_CENTER_TOL, format!("|I(0) - 2 pi| = {err:.2e}"));
    }
}

fn biholo(c: &mut Checks, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (m, n) in [(1u64, 1u64), (2, 1), (3, 2)] {
        let gamma = RationalExponent::new(m as i64, n as i64).expect("positive");
        let name = format!("kernel transformation law, gamma {gamma}");
        let d: hgamma::Result<Vec<f64>> = (0..10)
            .map(|_| {
                let (z, w) = sample_pair(&mut rng, m, n);
                transform_check(&gamma, &z, &w)
            })
            .collect();
        if let Some(d) = c.attempt(&name, d) {
            let worst = d.iter().cloned().fold(0.0, f64::max);
            c.record(name, worst <= TRANSFORM_TOL, format!("worst discrepancy {worst:.2e}"));
        }
    }
    let g3 = RationalExponent::new(3, 1).expect("positive");
    let name = "transferred zero";
    let image = canonical_zero(&GammaValue::Rational(g3)).and_then(|cert| {
        let cert = cert.ok_or(hgamma::Error::NotFound(0))?;
        let target = GammaValue::Rational(psi_target(&g3)?);
        verify_zero(&target, &cert.z.psi(), &cert.w.psi(), TRANSFORM_TOL)
    });
    if let Some(img) = c.attempt(name, image) {
        c.record(name, img.certified, format!("gamma {}: residual {:.2e}", img.gamma, img.residual));
    }
}

fn intervals(c: &mut Checks) {
    let step = frac(1, 100);
    let minus_one = rat(-1);
    for s in 2..=INTERVAL_MAX_SUM {
        let mut failures = Vec::new();
        let mut classes = 0;
        for m in 1..s {
            let n = s - m;
            if num_integer::gcd(m, n) != 1 {
                continue;
            }
            let gamma = RationalExponent::new(m as i64, n as i64).expect("positive");
            if let Err(e) = interval_checks(&gamma, &step, &minus_one, &mut classes) {
                failures.push(format!("{gamma}: {e}"));
            }
        }
        let detail = if failures.is_empty() { format!("{classes} classes exact") } else { failures.join("; ") };
        c.record(format!("intervals and witnesses, m+n = {s}"), failures.is_empty(), detail);
    }
}

fn interval_checks(
    gamma: &RationalExponent,
    step: &num_rational::BigRational,
    minus_one: &num_rational::BigRational,
    classes: &mut usize,
) -> Result<(), String> {
    let err = |e: hgamma::Error| e.to_string();
    let (m, n) = (gamma.m(), gamma.n());
    let total = rat(2 * (m + n) as i64);
    for j in 0..m as i64 {
        let (a, interval) = subprojection_interval(gamma, j).map_err(err)?;
        if interval != subprojection_interval_direct(gamma, j).map_err(err)? {
            return Err(format!("j={j}: interval disagrees with the direct formula"));
        }
        if &total / interval.lower() + &total / interval.upper() != total {
            return Err(format!("j={j}: endpoint denominators do not sum to 2m+2n"));
        }
        if schur_window(&TypeAParams::new(a, m, n)).and_then(|w| w.interval()).map_err(err)? != interval {
            return Err(format!("j={j}: Schur window disagrees"));
        }
        let w = witness(gamma, j, 0).map_err(err)?;
        let e = |p: num_rational::BigRational| radial_exponent(gamma, w.beta, &p);
        if e(w.p_star.clone()) != *minus_one || e(&w.p_star - step) <= *minus_one || e(&w.p_star + step) >= *minus_one {
            return Err(format!("j={j}: witness exponent does not cross -1 at p* = {}", w.p_star));
        }
        *classes += 1;
    }
    let b = bergman_interval(gamma).map_err(err)?;
    let j0 = gamma.critical_residue() as i64;
    if b != bergman_interval_formula(gamma).map_err(err)? || b != subprojection_interval(gamma, j0).map_err(err)?.1 {
        return Err("Bergman interval disagrees with its formula or the critical class".into());
    }
    if witness(gamma, j0, 0).map_err(err)?.p_star != *b.upper() {
        return Err("critical witness p* is not the upper endpoint".into());
    }
    Ok(())
}
