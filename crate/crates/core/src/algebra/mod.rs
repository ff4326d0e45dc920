//! Exact arithmetic: prime fields, integer homogeneous forms, projective
//! points over Q and F_p, and rational roots of integer polynomials.

mod field;
mod parse;
mod poly;
mod projective;
mod roots;

pub use field::{is_prime, Fp, PrimeField, MAX_PRIME};
pub(crate) use parse::parse_terms;
pub use poly::{evaluate, HomogeneousPolynomial, Monomial, ReducedPolynomial};
pub use projective::{
    enumerate_projective, enumerate_stratum, projective_point_count, FpPoint, ProjectiveEnumerator,
    ProjectivePoint, RationalPoint, Scalar, DEFAULT_ENUMERATION_CAP,
};
pub use roots::{eval_at_rational, rational_roots};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("dimension mismatch: polynomial has {poly_vars} variables, point has {point_coords} coordinates")]
    DimensionMismatch { poly_vars: usize, point_coords: usize },
    #[error("degenerate reduction at p = {0}: every coefficient vanishes")]
    DegenerateReduction(u64),
    #[error("projective point has no nonzero coordinate")]
    ZeroPoint,
    #[error("point {0} is not in normalized form")]
    NotNormalized(String),
    #[error("P^{dim}(F_{p}) has {count} points, above the enumeration cap {cap}")]
    EnumerationCap { p: u64, dim: usize, count: u128, cap: u128 },
    #[error("the zero polynomial has no well-defined degree")]
    ZeroPolynomial,
    #[error("polynomial must have positive degree")]
    ConstantPolynomial,
    #[error("monomial {monomial} has degree {found}, expected {expected} (input is not homogeneous)")]
    NonHomogeneous { monomial: String, found: u32, expected: u32 },
    #[error("exponent vector {exponents:?} does not have {num_vars} entries")]
    ExponentArity { exponents: Vec<u32>, num_vars: usize },
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("variable {name} is out of range for {num_vars} variables")]
    UnknownVariable { name: String, num_vars: usize },
    #[error("rational-root search exceeded its factoring budget ({bits}-bit coefficient)")]
    RootSearchBudget { bits: u64 },
}
