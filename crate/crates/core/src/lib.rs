//! Bergman kernels, projection intervals and degeneracy witnesses on the
//! power-generalized Hartogs triangles `H_gamma = { |z1|^gamma < |z2| < 1 }`.
//!
//! Combinatorics and interval endpoints are exact. Numerical evaluators are
//! generic over [`Real`] and come with `f64` aliases below.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponent;
pub mod kernel;
pub mod lattice;
pub mod lp;
pub mod oracle;
pub mod quad;
pub mod scalar;
pub mod zeros;

pub use error::{Error, Result};
pub use exponent::{
    cap_height, critical_residue, dirichlet_convergents, dirichlet_convergents_available, min_alpha2, reduce_exponent, Convergent, GammaValue,
    IrrationalGamma, RationalExponent,
};
pub use kernel::{
    build_subkernel_spec, column_floor, kernel_eval, kernel_restricted_s0, restricted_s0_numerator, kernel_series_eval, monomial_norm_sq,
    monomial_norm_sq_over_pi2, subkernel_eval, BergmanKernel, CPoint2, ComplexJson, KernelEvaluation, KernelMethod, KernelValue, PolarizedPair, SeriesReport,
    SubKernelSpec,
};
pub use lattice::{
    is_allowable_a2, is_allowable_ap, lattice_diagram, residue_class, LatticeDiagram, MultiIndex,
};
pub use lp::{
    bergman_interval, dual_exponent, irrational_degeneracy_witness, monomial_lp_exponent, projection_constant,
    schur_probe_disc, schur_window, subprojection_interval, type_a_interval, witness, DegeneracyWitness, LpExponent,
    LpInterval, ProjectionConstant, SchurProbe, SchurWindow, TypeAParams, TypeARange, TypeARejection, Witness,
};
pub use oracle::{
    mc_integral, mc_integral_guarded, mc_integral_with_threads, projection_oracle, radial_monomial_integral,
    reproducing_check, McEstimate, RadialIntegral, ShadowRegion,
};
pub use scalar::{parse_rational, Real};
pub use zeros::{
    biholo_chain, canonical_zero, scan_slice_min_modulus, transform_check, verify_zero, ScanReport, Slice,
    ZeroCertificate,
};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;
/// Double-precision complex numbers.
pub type Complex64 = num_complex::Complex<f64>;
/// Point of `C^2` in double precision.
pub type Point = CPoint2<f64>;
/// Point of `C^2` in single precision.
pub type Pointf32 = CPoint2<f32>;
/// Closed-form kernel in double precision.
pub type Kernel = BergmanKernel<f64>;
