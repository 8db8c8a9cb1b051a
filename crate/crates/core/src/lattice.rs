//! Allowable multi-indices, residue classes and the lattice point diagram.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{GammaValue, RationalExponent};
use crate::scalar::rat;

/// Exponent pair of the Laurent monomial `z1^a1 z2^a2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    pub a1: i64,
    pub a2: i64,
}

impl MultiIndex {
    pub const fn new(a1: i64, a2: i64) -> Self {
        Self { a1, a2 }
    }
}

impl From<(i64, i64)> for MultiIndex {
    fn from((a1, a2): (i64, i64)) -> Self {
        Self { a1, a2 }
    }
}

/// `z^alpha` lies in the Bergman space `A^2`.
///
/// Rational `m/n` uses the closed integer test `n a1 + m a2 >= 1 - m - n`;
/// irrational gamma decides `a1 + gamma (a2 + 1) > -1` over its enclosure.
pub fn is_allowable_a2(gamma: &GammaValue, alpha: MultiIndex) -> Result<bool> {
    if alpha.a1 < 0 {
        return Ok(false);
    }
    match gamma {
        GammaValue::Rational(r) => Ok(allowable_closed_form(r, alpha)),
        GammaValue::Irrational(_) => {
            let s = gamma.sign_affine(&rat(alpha.a2 + 1), &rat(alpha.a1 + 1))?;
            Ok(s == Ordering::Greater)
        }
    }
}

/// Integer form of the `A^2` condition for `gamma = m/n`.
pub fn allowable_closed_form(gamma: &RationalExponent, alpha: MultiIndex) -> bool {
    let (m, n) = (gamma.m() as i128, gamma.n() as i128);
    alpha.a1 >= 0 && n * alpha.a1 as i128 + m * alpha.a2 as i128 >= 1 - m - n
}

/// `z^alpha` lies in `A^p`: `a2 > -a1/gamma - 2/p - 2/(gamma p)`.
pub fn is_allowable_ap(gamma: &GammaValue, p: &BigRational, alpha: MultiIndex) -> Result<bool> {
    if *p <= rat(0) {
        return Err(Error::OutOfRange(format!("p = {p} must be positive")));
    }
    if alpha.a1 < 0 {
        return Ok(false);
    }
    // Multiplying through by gamma * p > 0: gamma (p a2 + 2) + (p a1 + 2) > 0.
    let coef = p * rat(alpha.a2) + rat(2);
    let constant = p * rat(alpha.a1) + rat(2);
    Ok(gamma.sign_affine(&coef, &constant)? == Ordering::Greater)
}

/// `a1 mod m`.
pub fn residue_class(a1: i64, m: u64) -> u64 {
    debug_assert!(a1 >= 0 && m >= 1);
    (a1 as i128).rem_euclid(m as i128) as u64
}

/// One lattice point with its diagram flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramPoint {
    pub a1: i64,
    pub a2: i64,
    pub allowable: bool,
    pub on_boundary: bool,
    pub floor: bool,
    pub critical_class: bool,
}

/// The boundary line `a2 = slope * a1 + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLine {
    pub slope: BigRational,
    pub intercept: BigRational,
}

impl BoundaryLine {
    pub fn at(&self, a1: f64) -> f64 {
        crate::scalar::ratio_to_f64(&self.slope) * a1 + crate::scalar::ratio_to_f64(&self.intercept)
    }
}

impl Serialize for BoundaryLine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundaryLine", 2)?;
        st.serialize_field("slope", &self.slope.to_string())?;
        st.serialize_field("intercept", &self.intercept.to_string())?;
        st.end()
    }
}

/// Window `0 <= a1 <= a1_max`, `a2_min <= a2 <= 0` of the lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeDiagram {
    pub gamma: RationalExponent,
    pub a1_max: i64,
    pub a2_min: i64,
    pub critical_residue: u64,
    pub boundary_line: BoundaryLine,
    pub points: Vec<DiagramPoint>,
}

impl LatticeDiagram {
    pub fn floor_points(&self) -> Vec<MultiIndex> {
        self.points.iter().filter(|p| p.floor).map(|p| MultiIndex::new(p.a1, p.a2)).collect()
    }

    pub fn point(&self, a1: i64, a2: i64) -> Option<&DiagramPoint> {
        if a1 < 0 || a1 > self.a1_max || a2 < self.a2_min || a2 > 0 {
            return None;
        }
        let rows = (-self.a2_min + 1) as usize;
        self.points.get(a1 as usize * rows + (-a2) as usize)
    }
}

pub fn lattice_diagram(gamma: &RationalExponent, a1_max: i64, a2_min: i64) -> Result<LatticeDiagram> {
    if a1_max < 0 || a2_min > -1 {
        return Err(Error::EmptyWindow(format!("a1_max = {a1_max}, a2_min = {a2_min}")));
    }
    let (m, n) = (gamma.m() as i64, gamma.n() as i64);
    let j0 = gamma.critical_residue();
    let boundary_line = BoundaryLine {
        slope: BigRational::new(BigInt::from(-n), BigInt::from(m)),
        intercept: BigRational::new(BigInt::from(1 - n - m), BigInt::from(m)),
    };
    let mut points = Vec::with_capacity(((a1_max + 1) * (1 - a2_min)) as usize);
    for a1 in 0..=a1_max {
        let floor = gamma.min_alpha2(a1)?;
        let class = residue_class(a1, gamma.m());
        for a2 in (a2_min..=0).rev() {
            let alpha = MultiIndex::new(a1, a2);
            points.push(DiagramPoint {
                a1,
                a2,
                allowable: allowable_closed_form(gamma, alpha),
                on_boundary: m as i128 * a2 as i128 == -(n as i128) * a1 as i128 + 1 - n as i128 - m as i128,
                floor: a2 == floor,
                critical_class: class == j0,
            });
        }
    }
    Ok(LatticeDiagram { gamma: *gamma, a1_max, a2_min, critical_residue: j0, boundary_line, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::IrrationalGamma;
    use crate::scalar::frac;

    fn g(m: i64, n: i64) -> GammaValue {
        GammaValue::rational(m, n).unwrap()
    }

    #[test]
    fn a2_membership() {
        assert!(is_allowable_a2(&g(1, 1), MultiIndex::new(0, -1)).unwrap());
        assert!(!is_allowable_a2(&g(1, 1), MultiIndex::new(0, -2)).unwrap());
        assert!(is_allowable_a2(&g(3, 2), MultiIndex::new(1, -2)).unwrap());
        let s2: GammaValue = IrrationalGamma::sqrt(2, 40).unwrap().into();
        assert!(is_allowable_a2(&s2, MultiIndex::new(1, -2)).unwrap());
        assert!(!is_allowable_a2(&s2, MultiIndex::new(-1, 5)).unwrap());
    }

    #[test]
    fn knife_edge_is_reported() {
        // gamma ~ 2 +- 0.1 and (1, -2): 1 + gamma * (-1) vs -1 is undecided.
        let coarse: GammaValue = IrrationalGamma::from_decimal("2.0").unwrap().into();
        assert!(matches!(is_allowable_a2(&coarse, MultiIndex::new(1, -2)), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn ap_membership() {
        assert!(!is_allowable_ap(&g(1, 1), &rat(4), MultiIndex::new(0, -1)).unwrap());
        let p = crate::scalar::rational_from_f64(3.9).unwrap();
        assert!(is_allowable_ap(&g(1, 1), &p, MultiIndex::new(0, -1)).unwrap());
        assert!(is_allowable_ap(&g(1, 1), &rat(0), MultiIndex::new(0, 0)).is_err());
    }

    #[test]
    fn p2_agrees_with_a2() {
        let gammas = [g(1, 1), g(3, 2), g(2, 3), g(5, 1), IrrationalGamma::sqrt(3, 30).unwrap().into()];
        let mut count = 0;
        for gamma in &gammas {
            for a1 in 0..8 {
                for a2 in -6..0 {
                    let alpha = MultiIndex::new(a1, a2);
                    assert_eq!(
                        is_allowable_ap(gamma, &frac(2, 1), alpha).unwrap(),
                        is_allowable_a2(gamma, alpha).unwrap(),
                        "{gamma} {alpha:?}"
                    );
                    count += 1;
                }
            }
        }
        assert!(count >= 200);
    }

    #[test]
    fn residues() {
        assert_eq!(residue_class(7, 3), 1);
        assert_eq!(residue_class(0, 5), 0);
        assert_eq!(residue_class(4, 1), 0);
    }

    #[test]
    fn diagram_three_halves() {
        let gamma = RationalExponent::new(3, 2).unwrap();
        let d = lattice_diagram(&gamma, 8, -7).unwrap();
        let floors: Vec<_> = d.floor_points().iter().map(|p| (p.a1, p.a2)).collect();
        assert_eq!(floors, vec![(0, -1), (1, -2), (2, -2), (3, -3), (4, -4), (5, -4), (6, -5), (7, -6), (8, -6)]);
        for p in &d.points {
            if p.allowable {
                assert!(2 * p.a1 + 3 * p.a2 >= -4);
            }
        }
        assert!(d.point(1, -2).unwrap().on_boundary);
        assert!(d.point(4, -4).unwrap().on_boundary);
        assert!(!d.point(0, -1).unwrap().on_boundary);
        assert_eq!(d.critical_residue, 1);
    }

    #[test]
    fn diagram_lines() {
        let d = lattice_diagram(&RationalExponent::new(1, 1).unwrap(), 6, -8).unwrap();
        let floors: Vec<_> = d.floor_points().iter().map(|p| (p.a1, p.a2)).collect();
        assert_eq!(floors, (0..=6).map(|k| (k, -k - 1)).collect::<Vec<_>>());
        let d = lattice_diagram(&RationalExponent::new(3, 1).unwrap(), 6, -4).unwrap();
        assert_eq!(d.boundary_line.slope, frac(-1, 3));
        assert_eq!(d.boundary_line.intercept, rat(-1));
    }

    #[test]
    fn empty_window() {
        let gamma = RationalExponent::new(1, 1).unwrap();
        assert!(matches!(lattice_diagram(&gamma, -1, -3), Err(Error::EmptyWindow(_))));
        assert!(matches!(lattice_diagram(&gamma, 3, 0), Err(Error::EmptyWindow(_))));
    }
}
