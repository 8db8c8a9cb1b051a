//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use hgamma::exponent::IrrationalGamma;
use hgamma::kernel::kernel_series_eval;
use hgamma::lp::{bergman_interval_formula, radial_exponent, subprojection_interval_direct};
use hgamma::oracle::RadialIntegral;
use hgamma::scalar::{frac, rat};
use hgamma::zeros::psi_target;
use hgamma::*;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SERIES_REL_TOL: f64 = 1e-8;
const SERIES_RUNTIME: Duration = Duration::from_secs(60);
const NORM_REL_TOL: f64 = 1e-10;
const INTERVAL_RUNTIME: Duration = Duration::from_secs(5);
const ZERO_TOL: f64 = 1e-10;
const SCAN_GRID: usize = 400;
const SCAN_T_MAX: f64 = 0.99;
const SCAN_FLOOR_REL: f64 = 1e-9;
const MAX_CONVERGENTS: usize = 25;
const MC_SAMPLES: u64 = 1_000_000;
const MC_SEED: u64 = 42;
const MC_SIGMAS: f64 = 4.0;
const TRANSFORM_TOL: f64 = 1e-8;
const TRANSFER_TOL: f64 = 1e-8;
const SCHUR_GROWTH: f64 = 2.0;
const SCHUR_CENTER_TOL: f64 = 1e-8;
const SCHUR_NODES: usize = 200_000;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn phase(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r, std::f64::consts::TAU * uniform(rng))
}

fn coprime_pairs(max_sum: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 1..max_sum {
        for n in 1..=(max_sum - m) {
            if num_integer::gcd(m, n) == 1 {
                out.push((m, n));
            }
        }
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for (m, n) in [(1u64, 1u64), (2, 1), (3, 2), (5, 3), (1, 2)] {
        let gamma = RationalExponent::new(m as i64, n as i64).unwrap();
        let kernel = Kernel::new(&gamma).unwrap();
        for _ in 0..25 {
            let (z, w) = sample_pair(&mut rng, m, n);
            let t = z.z2 * w.z2.conj();
            let s = z.z1 * w.z1.conj();
            ensure(t.norm() <= 0.8 && s.norm().powi(m as i32) <= 0.5 * t.norm().powi(n as i32), || {
                "sampler produced a pair outside the test region".into()
            })?;
            let closed = kernel.eval(&z, &w).map_err(|e| e.to_string())?;
            let tol = 1e-11 * closed.norm();
            let series = kernel_series_eval(&GammaValue::Rational(gamma), &z, &w, tol).map_err(|e| e.to_string())?;
            let rel = (series.value - closed).norm() / closed.norm();
            worst = worst.max(rel);
            ensure(rel <= SERIES_REL_TOL, || format!("gamma {gamma}: relative difference {rel:e}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < SERIES_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("125 pairs, worst relative difference {worst:.2e}, {elapsed:.2?}"))
}

/// Pair with `|t| <= 0.8` and `|s|^m <= 0.5 |t|^n`, both points inside `H_{m/n}`.
fn sample_pair(rng: &mut ChaCha8Rng, m: u64, n: u64) -> (Point, Point) {
    let gamma = m as f64 / n as f64;
    let shrink = 0.5f64.powf(1.0 / (2.0 * m as f64));
    let rz2 = 0.25 + 0.7 * uniform(rng);
    let rw2 = (0.8 / rz2).min(0.95) * (0.3 + 0.7 * uniform(rng));
    let rz1 = uniform(rng) * rz2.powf(1.0 / gamma) * shrink;
    let rw1 = uniform(rng) * rw2.powf(1.0 / gamma) * shrink;
    let z = Point::new(phase(rng, rz1), phase(rng, rz2));
    let w = Point::new(phase(rng, rw1), phase(rng, rw2));
    (z, w)
}

fn criterion_2() -> Outcome {
    let mut compared = 0;
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for (m, n) in [(1, 1), (3, 2), (2, 3), (3, 1)] {
        let gamma = GammaValue::rational(m, n).unwrap();
        let mut taken = 0;
        'outer: for a1 in 0..10i64 {
            let floor = hgamma::kernel::column_floor(&gamma, a1).unwrap();
            for a2 in floor..floor + 5 {
                let alpha = MultiIndex::new(a1, a2);
                let norm: f64 = monomial_norm_sq(&gamma, alpha).map_err(|e| e.to_string())?;
                let radial = radial_monomial_integral(&gamma, (2 * a1 + 1) as f64, (2 * a2 + 1) as f64)
                    .map_err(|e| e.to_string())?;
                let RadialIntegral::Finite(v) = radial else {
                    return Err(format!("gamma {gamma}: allowable {alpha:?} reported divergent"));
                };
                let rel = (v - norm).abs() / norm;
                worst = worst.max(rel);
                ensure(rel <= NORM_REL_TOL, || format!("gamma {gamma} {alpha:?}: relative {rel:e}"))?;
                taken += 1;
                if taken == 20 {
                    break 'outer;
                }
            }
        }
        compared += taken;
        for a1 in 0..8i64 {
            for a2 in -12..4i64 {
                let alpha = MultiIndex::new(a1, a2);
                let allowable = is_allowable_a2(&gamma, alpha).unwrap();
                let radial = radial_monomial_integral(&gamma, (2 * a1 + 1) as f64, (2 * a2 + 1) as f64).unwrap();
                if allowable == (radial == RadialIntegral::Divergent) {
                    mismatches += 1;
                }
            }
        }
    }
    ensure(compared == 80, || format!("only {compared} indices compared"))?;
    ensure(mismatches == 0, || format!("{mismatches} divergence mismatches"))?;
    Ok(format!("80 norms, worst relative difference {worst:.2e}, 0 verdict mismatches"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut classes = 0;
    for (m, n) in coprime_pairs(30) {
        let gamma = RationalExponent::new(m as i64, n as i64).unwrap();
        let total = rat(2 * (m + n) as i64);
        let mut meet: Option<LpInterval> = None;
        for j in 0..m as i64 {
            let (a, interval) = subprojection_interval(&gamma, j).map_err(|e| e.to_string())?;
            meet = Some(meet.map_or(interval.clone(), |acc| acc.intersect(&interval)));
            let direct = subprojection_interval_direct(&gamma, j).map_err(|e| e.to_string())?;
            ensure(interval == direct, || format!("{gamma} j={j}: {interval} vs {direct}"))?;
            let d_lo = &total / interval.lower();
            let d_hi = &total / interval.upper();
            ensure(d_lo + d_hi == total, || format!("{gamma} j={j}: denominators do not sum to 2m+2n"))?;
            let window = schur_window(&TypeAParams::new(a, m, n)).map_err(|e| e.to_string())?;
            let from_window = window.interval().map_err(|e| e.to_string())?;
            ensure(from_window == interval, || format!("{gamma} j={j}: Schur window gives {from_window}"))?;
            classes += 1;
        }
        let b = bergman_interval(&gamma).map_err(|e| e.to_string())?;
        let formula = bergman_interval_formula(&gamma).map_err(|e| e.to_string())?;
        let worst = subprojection_interval(&gamma, gamma.critical_residue() as i64).unwrap().1;
        ensure(b == formula && b == worst, || format!("{gamma}: {b} vs {formula} vs {worst}"))?;
        ensure(meet.as_ref() == Some(&b), || format!("{gamma}: intersection of class intervals is {meet:?}"))?;
    }
    for ((m, n), (lo, hi)) in [((1, 1), (frac(4, 3), rat(4))), ((3, 2), (frac(5, 3), frac(5, 2))), ((2, 1), (frac(3, 2), rat(3)))] {
        let b = bergman_interval(&RationalExponent::new(m, n).unwrap()).unwrap();
        ensure(*b.lower() == lo && *b.upper() == hi, || format!("spot value ({m},{n}) gave {b}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < INTERVAL_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("{classes} classes over all coprime m+n <= 30, {elapsed:.2?}"))
}

fn criterion_4() -> Outcome {
    let step = frac(1, 100);
    let minus_one = rat(-1);
    let mut count = 0;
    for (m, n) in coprime_pairs(30) {
        let gamma = RationalExponent::new(m as i64, n as i64).unwrap();
        for j in 0..m as i64 {
            let w = witness(&gamma, j, 0).map_err(|e| e.to_string())?;
            let e = |p| radial_exponent(&gamma, w.beta, &p);
            ensure(e(w.p_star.clone()) == minus_one, || format!("{gamma} j={j}: e(p*) != -1"))?;
            ensure(e(&w.p_star - &step) > minus_one, || format!("{gamma} j={j}: e(p*-1/100) <= -1"))?;
            ensure(e(&w.p_star + &step) < minus_one, || format!("{gamma} j={j}: e(p*+1/100) >= -1"))?;
            count += 1;
        }
        let w0 = witness(&gamma, gamma.critical_residue() as i64, 0).unwrap();
        let upper = bergman_interval(&gamma).unwrap().upper().clone();
        ensure(w0.p_star == upper, || format!("{gamma}: critical p* {} vs upper {upper}", w0.p_star))?;
    }
    Ok(format!("{count} witnesses exact at p*"))
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m, n) in [(5, 2), (3, 1), (4, 1), (7, 3), (2, 1)] {
        let gamma = GammaValue::rational(m, n).unwrap();
        let cert = canonical_zero(&gamma).map_err(|e| e.to_string())?.ok_or("no canonical zero")?;
        ensure(cert.residual <= ZERO_TOL, || format!("gamma {gamma}: residual {:e}", cert.residual))?;
        ensure(cert.interior_margins.iter().all(|&x| x > 0.0), || format!("gamma {gamma}: margins {:?}", cert.interior_margins))?;
        worst = worst.max(cert.residual);
    }
    let mut floors = Vec::new();
    for (m, n) in [(1, 1), (1, 2), (1, 3)] {
        let gamma = GammaValue::rational(m, n).unwrap();
        let rep = scan_slice_min_modulus(&gamma, Slice::S0 { t_max: SCAN_T_MAX }, SCAN_GRID, false)
            .map_err(|e| e.to_string())?;
        let bound = m as f64 / n as f64;
        let got = rep.min_numerator.unwrap();
        ensure(got >= bound * (1.0 - SCAN_FLOOR_REL), || format!("gamma {gamma}: min numerator {got} below {bound}"))?;
        ensure(rep.skipped == 0, || format!("gamma {gamma}: {} points skipped", rep.skipped))?;
        floors.push(format!("{gamma}:{got:.6}"));
    }
    Ok(format!("max zero residual {worst:.2e}; s=0 numerator minima {}", floors.join(" ")))
}

fn criterion_6() -> Outcome {
    let s2: GammaValue = IrrationalGamma::sqrt(2, 80).unwrap().into();
    let mut last_index = 0;
    let mut found = Vec::new();
    for p in [frac(5, 2), frac(21, 10), frac(201, 100)] {
        let w = irrational_degeneracy_witness(&s2, &p, MAX_CONVERGENTS).map_err(|e| format!("p = {p}: {e}"))?;
        ensure(w.convergent.index < MAX_CONVERGENTS, || "index beyond cap".into())?;
        ensure(is_allowable_a2(&s2, w.beta).unwrap(), || format!("p = {p}: beta {:?} not allowable", w.beta))?;
        let e = monomial_lp_exponent(&s2, w.beta, &p).unwrap();
        ensure(e.diverges && w.exponent <= -1.0, || format!("p = {p}: exponent {}", w.exponent))?;
        ensure(w.convergent.index >= last_index, || format!("p = {p}: index decreased"))?;
        for c in &w.examined {
            ensure(c.gap * (c.m as f64).powi(2) < 1.0, || format!("convergent {}/{} fails Dirichlet", c.n, c.m))?;
        }
        last_index = w.convergent.index;
        found.push(format!("p={p}:#{}({}/{})", w.convergent.index, w.convergent.n, w.convergent.m));
    }
    Ok(found.join(" "))
}

fn criterion_7() -> Outcome {
    let g1 = GammaValue::rational(1, 1).unwrap();
    let c = projection_constant(&g1, MultiIndex::new(0, 1)).map_err(|e| e.to_string())?;
    ensure(c.exact == Some(frac(1, 2)), || format!("C = {:?}", c.exact))?;
    let z = Point::new(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0));
    let est = projection_oracle(&g1, MultiIndex::new(0, 1), &z, MC_SAMPLES, MC_SEED).map_err(|e| e.to_string())?;
    let target = z.monomial(c.image) * c.value;
    ensure(est.agrees_with(target, MC_SIGMAS), || {
        format!("projection oracle {} vs {target}, stderr {:e}", est.value, est.stderr)
    })?;
    let mut defects = Vec::new();
    for ((m, n), beta, z) in [
        ((1, 1), MultiIndex::new(1, 0), Point::new(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0))),
        ((1, 1), MultiIndex::new(0, -1), Point::new(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0))),
        ((3, 2), MultiIndex::new(1, -2), Point::new(Complex64::new(0.2, 0.0), Complex64::new(0.6, 0.0))),
    ] {
        let gamma = RationalExponent::new(m, n).unwrap();
        let d = reproducing_check(&gamma, beta, &z, MC_SAMPLES, MC_SEED).map_err(|e| e.to_string())?;
        ensure(d.agrees_with(Complex64::new(0.0, 0.0), MC_SIGMAS), || {
            format!("reproducing defect {} at gamma {gamma} {beta:?}, stderr {:e}", d.value, d.stderr)
        })?;
        defects.push(format!("{:.1}", d.value.norm() / d.stderr));
    }
    Ok(format!(
        "C = 1/2, oracle {:.1} sigma; reproducing defects [{}] sigma",
        (est.value - target).norm() / est.stderr,
        defects.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for (m, n) in [(1, 1), (2, 1), (3, 2)] {
        let gamma = RationalExponent::new(m, n).unwrap();
        for _ in 0..10 {
            let (z, w) = sample_pair(&mut rng, m as u64, n as u64);
            let d = transform_check(&gamma, &z, &w).map_err(|e| e.to_string())?;
            worst = worst.max(d);
            ensure(d <= TRANSFORM_TOL, || format!("gamma {gamma}: discrepancy {d:e}"))?;
        }
    }
    let g3 = RationalExponent::new(3, 1).unwrap();
    let cert = canonical_zero(&GammaValue::Rational(g3)).unwrap().unwrap();
    let target = GammaValue::Rational(psi_target(&g3).unwrap());
    let image = verify_zero(&target, &cert.z.psi(), &cert.w.psi(), TRANSFER_TOL).map_err(|e| e.to_string())?;
    ensure(target.to_string() == "3/4", || format!("target exponent {target}"))?;
    ensure(image.certified, || format!("transferred residual {:e}", image.residual))?;
    Ok(format!("worst discrepancy {worst:.2e}; transferred zero residual {:.2e}", image.residual))
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 1.0;
    for eps in [0.25, 0.5, 0.75] {
        for beta in [0.0, 0.5, 1.0] {
            let ratios: Vec<f64> = [0.9, 0.99, 0.999]
                .iter()
                .map(|&r| schur_probe_disc(eps, beta, r, SCHUR_NODES).map(|p| p.ratio))
                .collect::<Result<_>>()
                .map_err(|e| e.to_string())?;
            let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
            worst = worst.max(hi / lo);
            ensure(hi / lo <= SCHUR_GROWTH, || format!("eps {eps} beta {beta}: ratios {ratios:?}"))?;
        }
    }
    let center = schur_probe_disc(0.5, 0.0, 0.0, SCHUR_NODES).map_err(|e| e.to_string())?;
    let err = (center.value - std::f64::consts::TAU).abs();
    ensure(err <= SCHUR_CENTER_TOL, || format!("I(0) = {} differs from 2 pi by {err:e}", center.value))?;
    Ok(format!("largest growth factor {worst:.4}; |I(0) - 2 pi| = {err:.1e}"))
}

fn criterion_10() -> Outcome {
    let gamma = GammaValue::rational(3, 2).unwrap();
    let f = |z: &Point| z.z1 * z.z2.conj() + Complex64::new(z.z2.norm_sqr(), 0.0);
    let runs: Vec<McEstimate> = [1, 2, 8]
        .iter()
        .map(|&t| mc_integral_with_threads(&gamma, f, 300_001, 2024, t))
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    for r in &runs[1..] {
        ensure(
            r.value.re.to_bits() == runs[0].value.re.to_bits()
                && r.value.im.to_bits() == runs[0].value.im.to_bits()
                && r.stderr.to_bits() == runs[0].stderr.to_bits(),
            || "estimates differ across thread counts".into(),
        )?;
    }
    Ok("identical bits on 1, 2 and 8 threads".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("series and closed-form kernels agree", criterion_1),
        ("norm identities", criterion_2),
        ("exact interval identities", criterion_3),
        ("witness exactness", criterion_4),
        ("kernel zeros", criterion_5),
        ("irrational degeneracy", criterion_6),
        ("projection constant and reproducing property", criterion_7),
        ("biholomorphism identity", criterion_8),
        ("Schur probe", criterion_9),
        ("Monte-Carlo determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
