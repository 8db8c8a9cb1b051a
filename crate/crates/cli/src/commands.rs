//! One function per subcommand. Each is pure given its arguments.

use hgamma::kernel::monomial_norm_sq_over_pi2;
use hgamma::lp::subprojection_interval;
use hgamma::oracle::RadialIntegral;
use hgamma::{
    bergman_interval, canonical_zero, irrational_degeneracy_witness, is_allowable_a2, lattice_diagram, mc_integral,
    monomial_norm_sq, parse_rational, radial_monomial_integral, scan_slice_min_modulus, witness, Complex64,
    ComplexJson, GammaValue, KernelEvaluation, RationalExponent, Slice,
};
use serde_json::{json, Value};

use crate::literal::{parse_complex, parse_gamma, parse_index, parse_point};
use crate::{
    verify, Cli, CliError, Command, DegenerateArgs, GammaArgs, KernelArgs, LatticeArgs, LatticeFormat, LpRangeArgs,
    NormsArgs, OracleKind, Output, RationalArgs, SliceKind, WitnessArgs, ZerosArgs,
};

type CmdResult = Result<Output, CliError>;

pub fn dispatch(cli: &Cli) -> CmdResult {
    let precision = cli.precision;
    match &cli.command {
        Command::LpRange(a) => lp_range(a),
        Command::Kernel(a) => kernel(a, precision),
        Command::Lattice(a) => lattice(a),
        Command::Witness(a) => witness_cmd(a),
        Command::Degenerate(a) => degenerate(a, precision),
        Command::Zeros(a) => zeros(a, precision, cli.out.is_some()),
        Command::Norms(a) => norms(a, precision),
        Command::Verify(a) => verify::run_suite(a.suite, a.seed),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize to JSON")
}

fn rational(a: &RationalArgs) -> Result<RationalExponent, CliError> {
    Ok(RationalExponent::new(a.m, a.n)?)
}

/// The exponent and whether it came from `--m/--n`, the only route to closed forms.
fn gamma_value(a: &GammaArgs, precision: Option<u32>) -> Result<(GammaValue, bool), CliError> {
    match (a.m, a.n, &a.gamma) {
        (Some(m), Some(n), None) => Ok((GammaValue::Rational(RationalExponent::new(m, n)?), true)),
        (None, None, Some(text)) => Ok((parse_gamma(text, precision)?, false)),
        _ => Err(CliError::Usage("give either --m M --n N or --gamma X".into())),
    }
}

fn lp_range(a: &LpRangeArgs) -> CmdResult {
    let gamma = rational(&a.gamma)?;
    let Some(j) = a.j else {
        return Ok(Output::json(to_json(&bergman_interval(&gamma)?)));
    };
    let (exponent, interval) = subprojection_interval(&gamma, j)?;
    let mut v = to_json(&interval);
    v["j"] = json!(j);
    v["a"] = json!(exponent.to_string());
    Ok(Output::json(v))
}

fn kernel(a: &KernelArgs, precision: Option<u32>) -> CmdResult {
    let (gamma, closed_ok) = gamma_value(&a.gamma, precision)?;
    let z = parse_point(&a.z)?;
    let w = parse_point(&a.w)?;
    let g = gamma.to_f64();
    for (p, name) in [(&z, "z"), (&w, "w")] {
        if !p.in_domain(g) {
            return Err(hgamma::Error::NotInDomain(format!("{name} is outside H_{gamma}")).into());
        }
    }
    if !(a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol {} must be positive", a.tol)));
    }
    let eval = match (&gamma, closed_ok && !a.series) {
        (GammaValue::Rational(r), true) => KernelEvaluation::closed(r, &z, &w)?,
        _ => KernelEvaluation::series(&gamma, &z, &w, a.tol)?,
    };
    Ok(Output::json(to_json(&eval)))
}

fn lattice(a: &LatticeArgs) -> CmdResult {
    let gamma = rational(&a.gamma)?;
    let d = lattice_diagram(&gamma, a.a1_max, a.a2_min)?;
    Ok(match a.format {
        LatticeFormat::Svg => Output { artifact: Some(crate::render_lattice_svg(&d)), ..Output::default() },
        LatticeFormat::Ascii => Output { artifact: Some(crate::render_lattice_ascii(&d)), ..Output::default() },
        LatticeFormat::Json => Output::json(to_json(&d)),
    })
}

fn witness_cmd(a: &WitnessArgs) -> CmdResult {
    let gamma = rational(&a.gamma)?;
    let j = a.j.unwrap_or(gamma.critical_residue() as i64);
    Ok(Output::json(to_json(&witness(&gamma, j, a.k)?)))
}

fn degenerate(a: &DegenerateArgs, precision: Option<u32>) -> CmdResult {
    let gamma = parse_gamma(&a.gamma, precision)?;
    let p = parse_rational(&a.p).ok_or_else(|| CliError::Usage(format!("cannot parse --p {:?}", a.p)))?;
    if a.max_convergents == 0 {
        return Err(CliError::Usage("--max-convergents must be positive".into()));
    }
    Ok(Output::json(to_json(&irrational_degeneracy_witness(&gamma, &p, a.max_convergents)?)))
}

fn zeros(a: &ZerosArgs, precision: Option<u32>, to_file: bool) -> CmdResult {
    let gamma = parse_gamma(&a.gamma, precision)?;
    if !a.scan {
        return Ok(Output::json(match canonical_zero(&gamma)? {
            Some(cert) => to_json(&cert),
            None => json!({
                "gamma": gamma.to_string(),
                "zero": null,
                "note": "no explicit zero pair is known for gamma < 2",
            }),
        }));
    }
    let slice = match (a.slice, &a.s) {
        (SliceKind::S0, None) => Slice::S0 { t_max: a.t_max },
        (SliceKind::FixedS, Some(s)) => Slice::FixedS { s: ComplexJson::from(parse_complex(s)?), t_max: a.t_max },
        (SliceKind::S0, Some(_)) => return Err(CliError::Usage("--s only applies to --slice fixed-s".into())),
        (SliceKind::FixedS, None) => return Err(CliError::Usage("--slice fixed-s needs --s".into())),
    };
    let mut report = scan_slice_min_modulus(&gamma, slice, a.grid, to_file)?;
    let artifact = report.to_csv();
    report.values = None;
    Ok(Output { json: Some(to_json(&report)), artifact, failure: None })
}

fn norms(a: &NormsArgs, precision: Option<u32>) -> CmdResult {
    let (gamma, _) = gamma_value(&a.gamma, precision)?;
    let alpha = parse_index(&a.alpha)?;
    let allowable = is_allowable_a2(&gamma, alpha)?;
    let mut v = json!({
        "gamma": gamma.to_string(),
        "alpha": [alpha.a1, alpha.a2],
        "allowable": allowable,
        "norm_sq": null,
    });
    let norm = if allowable { Some(monomial_norm_sq::<f64>(&gamma, alpha)?) } else { None };
    if let Some(x) = norm {
        v["norm_sq"] = json!(x);
        if let GammaValue::Rational(r) = &gamma {
            v["norm_sq_over_pi2"] = json!(monomial_norm_sq_over_pi2(r, alpha)?.to_string());
        }
    }
    match a.oracle {
        None => {}
        Some(OracleKind::Radial) => {
            let (ra, rb) = ((2 * alpha.a1 + 1) as f64, (2 * alpha.a2 + 1) as f64);
            v["oracle"] = match radial_monomial_integral(&gamma, ra, rb)? {
                RadialIntegral::Finite(x) => json!({
                    "kind": "radial",
                    "divergent": false,
                    "value": x,
                    "relative_difference": norm.map(|n| (x - n).abs() / n),
                }),
                RadialIntegral::Divergent => json!({ "kind": "radial", "divergent": true }),
            };
        }
        Some(OracleKind::Mc) => {
            let Some(n) = norm else {
                return Err(hgamma::Error::NotAllowable { a1: alpha.a1, a2: alpha.a2 }.into());
            };
            if a.samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
            let est = mc_integral(&gamma, |z| Complex64::new(z.monomial(alpha).norm_sqr(), 0.0), a.samples, a.seed)?;
            let mut o = to_json(&est);
            o["kind"] = json!("mc");
            o["sigmas"] = json!((est.value.re - n).abs() / est.stderr);
            v["oracle"] = o;
        }
    }
    Ok(Output::json(v))
}
