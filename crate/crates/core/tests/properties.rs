use hgamma::lp::{bergman_interval_formula, radial_exponent, subprojection_interval};
use hgamma::scalar::rat;
use hgamma::*;
use num_complex::Complex;
use num_traits::One;
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = RationalExponent> {
    (1i64..40, 1i64..40).prop_map(|(m, n)| RationalExponent::new(m, n).unwrap())
}

/// A point of `H_gamma` from polar parameters in the open unit square.
fn point(gamma: f64, u: (f64, f64, f64, f64)) -> Point {
    let r2 = 0.05 + 0.9 * u.0;
    let r1 = u.1 * r2.powf(1.0 / gamma);
    Point::new(
        Complex64::from_polar(r1, std::f64::consts::TAU * u.2),
        Complex64::from_polar(r2, std::f64::consts::TAU * u.3),
    )
}

fn unit4() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.01f64..0.99, 0.0f64..0.95, 0.0f64..1.0, 0.0f64..1.0)
}

proptest! {
    #[test]
    fn floor_shifts_by_n_every_m_columns(g in exponent(), a1 in 0i64..500) {
        let m = g.m() as i64;
        prop_assert_eq!(g.min_alpha2(a1 + m).unwrap(), g.min_alpha2(a1).unwrap() - g.n() as i64);
    }

    #[test]
    fn cap_height_is_a_floor(g in exponent(), j in 0i64..40) {
        prop_assume!((j as u64) < g.m());
        let e = g.cap_height(j).unwrap() as i128;
        let (m, n) = (g.m() as i128, g.n() as i128);
        let top = (j as i128 + 1) * n - 1;
        prop_assert!(m * e <= top && top < m * (e + 1));
    }

    #[test]
    fn floor_is_least_allowable(g in exponent(), a1 in 0i64..300) {
        let gv = GammaValue::Rational(g);
        let f = g.min_alpha2(a1).unwrap();
        prop_assert!(is_allowable_a2(&gv, MultiIndex::new(a1, f)).unwrap());
        prop_assert!(!is_allowable_a2(&gv, MultiIndex::new(a1, f - 1)).unwrap());
    }

    #[test]
    fn allowable_set_is_up_closed(g in exponent(), a1 in 0i64..100, a2 in -200i64..20) {
        let gv = GammaValue::Rational(g);
        if is_allowable_a2(&gv, MultiIndex::new(a1, a2)).unwrap() {
            prop_assert!(is_allowable_a2(&gv, MultiIndex::new(a1 + 1, a2)).unwrap());
            prop_assert!(is_allowable_a2(&gv, MultiIndex::new(a1, a2 + 1)).unwrap());
        }
    }

    #[test]
    fn endpoints_are_hoelder_conjugate(g in exponent(), j in 0i64..40) {
        prop_assume!((j as u64) < g.m());
        let (_, i) = subprojection_interval(&g, j).unwrap();
        prop_assert_eq!(i.lower().recip() + i.upper().recip(), One::one());
        prop_assert_eq!(dual_exponent(i.lower().clone()).unwrap(), i.upper().clone());
    }

    #[test]
    fn bergman_interval_is_the_narrowest(g in exponent(), j in 0i64..40) {
        prop_assume!((j as u64) < g.m());
        let b = bergman_interval(&g).unwrap();
        let (_, i) = subprojection_interval(&g, j).unwrap();
        prop_assert!(b.lower() >= i.lower() && b.upper() <= i.upper());
    }

    #[test]
    fn bergman_interval_is_the_class_intersection(g in exponent()) {
        let mut meet = subprojection_interval(&g, 0).unwrap().1;
        for j in 1..g.m() as i64 {
            meet = meet.intersect(&subprojection_interval(&g, j).unwrap().1);
        }
        prop_assert_eq!(bergman_interval(&g).unwrap(), meet);
    }

    #[test]
    fn bergman_interval_for_huge_exponents(m in 1i64..4_000_000_000, n in 1i64..4_000_000_000) {
        let g = RationalExponent::new(m, n).unwrap();
        prop_assert_eq!(bergman_interval(&g).unwrap(), bergman_interval_formula(&g).unwrap());
    }

    #[test]
    fn witness_threshold_ignores_the_block(g in exponent(), j in 0i64..40, k in 1u64..50) {
        prop_assume!((j as u64) < g.m());
        let w0 = witness(&g, j, 0).unwrap();
        let wk = witness(&g, j, k).unwrap();
        prop_assert_eq!(&w0.p_star, &wk.p_star);
        prop_assert_eq!(radial_exponent(&g, wk.beta, &wk.p_star), rat(-1));
        prop_assert_eq!(wk.beta.a2, g.min_alpha2(wk.beta.a1).unwrap());
    }

    #[test]
    fn kernel_is_hermitian(g in exponent(), u in unit4(), v in unit4()) {
        let k = Kernel::new(&g).unwrap();
        let gf = g.to_real::<f64>();
        let (z, w) = (point(gf, u), point(gf, v));
        let (Ok(a), Ok(b)) = (k.eval(&z, &w), k.eval(&w, &z)) else { return Ok(()) };
        prop_assert!((a - b.conj()).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn kernel_diagonal_is_positive(g in exponent(), u in unit4()) {
        let z = point(g.to_real(), u);
        let Ok(b) = Kernel::new(&g).unwrap().eval(&z, &z) else { return Ok(()) };
        prop_assert!(b.re > 0.0 && b.im.abs() <= 1e-9 * b.re);
        // The diagonal dominates the constant term of the series.
        prop_assert!(b.re >= g.to_real::<f64>().recip() / std::f64::consts::PI.powi(2) * 0.999);
    }

    #[test]
    fn single_precision_tracks_double(m in 1i64..6, n in 1i64..6, u in unit4(), v in unit4()) {
        let g = RationalExponent::new(m, n).unwrap();
        let gf = g.to_real::<f64>();
        let (z, w) = (point(gf, u), point(gf, v));
        let pair = PolarizedPair::from_points(&z, &w);
        let t = pair.t;
        // Stay where f32 cancellation in (t^n - s^m) and (1 - t) is harmless.
        prop_assume!((1.0 - t).norm() > 0.1 && (t.powu(n as u32) - pair.s.powu(m as u32)).norm() > 0.05);
        let conv = |c: Complex64| Complex::new(c.re as f32, c.im as f32);
        let (z32, w32) = (Pointf32::new(conv(z.z1), conv(z.z2)), Pointf32::new(conv(w.z1), conv(w.z2)));
        let b64 = Kernel::new(&g).unwrap().eval(&z, &w).unwrap();
        let b32 = BergmanKernel::<f32>::new(&g).unwrap().eval(&z32, &w32).unwrap();
        let d = Complex64::new(b32.re as f64, b32.im as f64) - b64;
        prop_assert!(d.norm() <= 1e-3 * b64.norm().max(1e-2), "f64 {b64} f32 {b32}");
    }

    #[test]
    fn irrational_verdicts_match_rational_neighbours(k in 2u64..50, a1 in 0i64..30, a2 in -60i64..5) {
        prop_assume!(((k as f64).sqrt().round() as u64).pow(2) != k);
        let g: GammaValue = IrrationalGamma::sqrt(k, 40).unwrap().into();
        let alpha = MultiIndex::new(a1, a2);
        let x = (a1 + 1) as f64 + g.to_f64() * (a2 + 1) as f64;
        prop_assume!(x.abs() > 1e-6);
        prop_assert_eq!(is_allowable_a2(&g, alpha).unwrap(), x > 0.0);
    }

    #[test]
    fn convergent_intervals_squeeze_to_two(k in 2u64..60) {
        prop_assume!(((k as f64).sqrt().round() as u64).pow(2) != k);
        let g: GammaValue = IrrationalGamma::sqrt(k, 60).unwrap().into();
        let cs = dirichlet_convergents(&g, 8).unwrap();
        let uppers: Vec<_> = cs
            .iter()
            .map(|c| bergman_interval(&c.exponent()).unwrap().upper().clone())
            .collect();
        for w in uppers.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(*uppers.last().unwrap() > rat(2));
        prop_assert!(cs.iter().all(|c| c.gap * (c.m as f64).powi(2) < 1.0));
    }

    #[test]
    fn lp_exponent_decreases_for_witnesses(g in exponent(), j in 0i64..40, p_num in 21i64..80) {
        prop_assume!((j as u64) < g.m());
        let w = witness(&g, j, 0).unwrap();
        let gv = GammaValue::Rational(g);
        let p = num_rational::BigRational::new(p_num.into(), 10.into());
        let e = monomial_lp_exponent(&gv, w.beta, &p).unwrap();
        prop_assert_eq!(e.diverges, p >= w.p_star);
    }
}
