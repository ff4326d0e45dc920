//! Genus-0 dynamical towers over Q: rational self-maps of P^1, orbits,
//! heights, periodic points and rational preimage trees.

mod form;
mod height;
mod periodic;

pub use form::{resultant, BinaryForm};
pub use height::{
    big_ln, canonical_height, classify_orbit, naive_height, HeightConfig, HeightEstimate, OrbitClassification,
    OrbitKind,
};
pub use periodic::{periodic_points, preimage_chain, rational_preimages, PreimageNode, PreimageTree};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{
    parse_terms, AlgebraError, HomogeneousPolynomial, PrimeField, ProjectivePoint, RationalPoint, Scalar,
};

/// Default coordinate/coefficient size budget, in bits.
pub const DEFAULT_MAX_BITS: u64 = 4096;
pub const DEFAULT_ORBIT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("rational map must have degree > 1, got {0}")]
    Degree(usize),
    #[error("numerator and denominator share a root in P^1 (zero resultant)")]
    NotAMorphism,
    #[error("numerator and denominator have different formal degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("expected a point of P^1, got one with {0} coordinates")]
    NotP1Point(usize),
    #[error("precision budget exceeded: {bits} bits > cap {cap}{}", partial.map(|v| format!(" (partial estimate {v})")).unwrap_or_default())]
    PrecisionExceeded { bits: u64, cap: u64, partial: Option<f64> },
    #[error("map sequence has {len} maps, level {needed} requested")]
    SequenceTooShort { needed: usize, len: usize },
    #[error("map has bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("cannot parse rational map: {0}")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A morphism `[X:Y] -> [F(X,Y) : G(X,Y)]` of P^1 over Q of degree at least 2.
///
/// Stored with the common content of F and G removed and the sign fixed so
/// that the leading nonzero coefficient of G (highest power of X first) is
/// positive.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    num: BinaryForm,
    den: BinaryForm,
}

impl RationalMap {
    pub fn new(num: BinaryForm, den: BinaryForm) -> Result<Self, DynamicsError> {
        if num.degree() != den.degree() {
            return Err(DynamicsError::DegreeMismatch(num.degree(), den.degree()));
        }
        if num.degree() < 2 {
            return Err(DynamicsError::Degree(num.degree()));
        }
        Self::from_forms_unchecked(num, den)
    }

    // Skips the degree floor so iterates and auxiliary maps can reuse the
    // normalization; the resultant is still checked.
    fn from_forms_unchecked(num: BinaryForm, den: BinaryForm) -> Result<Self, DynamicsError> {
        if resultant(&num, &den).is_zero() {
            return Err(DynamicsError::NotAMorphism);
        }
        let g = num.content().gcd(&den.content());
        let (mut num, mut den) = (num.scale_down(&g), den.scale_down(&g));
        let lead_neg = den.coeffs().iter().rev().find(|c| !c.is_zero()).map(|c| c.is_negative()).unwrap_or(false);
        if lead_neg {
            num = num.negate();
            den = den.negate();
        }
        Ok(Self { num, den })
    }

    /// Polynomial map `x -> sum c_i x^i` (constant term first).
    pub fn polynomial(coeffs: &[i64]) -> Result<Self, DynamicsError> {
        let d = coeffs.len() - 1;
        Self::new(BinaryForm::from_i64s(coeffs), BinaryForm::monomial(d, 0))
    }

    /// `x -> x^d`
    pub fn power(d: usize) -> Result<Self, DynamicsError> {
        Self::new(BinaryForm::monomial(d, d), BinaryForm::monomial(d, 0))
    }

    /// Parse either a homogeneous pair `(F)/(G)` in `X`, `Y`, or an affine
    /// expression in `x` such as `x^2-1` or `(x^2+1)/(2*x)`.
    pub fn parse(text: &str) -> Result<Self, DynamicsError> {
        let (top, bottom) = split_fraction(text)?;
        let homogeneous = text.contains('X') || text.contains('Y');
        if homogeneous {
            let num = parse_binary(&top)?;
            let den = match bottom {
                Some(b) => parse_binary(&b)?,
                None => return Err(DynamicsError::Parse("homogeneous map needs the form (F)/(G)".into())),
            };
            Self::new(num, den)
        } else {
            let p = parse_affine(&top)?;
            let q = match bottom {
                Some(b) => parse_affine(&b)?,
                None => vec![BigInt::from(1)],
            };
            let d = p.len().max(q.len()) - 1;
            let pad = |mut v: Vec<BigInt>| {
                v.resize(d + 1, BigInt::zero());
                BinaryForm::new(v)
            };
            Self::new(pad(p), pad(q))
        }
    }

    pub fn degree(&self) -> usize {
        self.num.degree()
    }

    pub fn numerator(&self) -> &BinaryForm {
        &self.num
    }

    pub fn denominator(&self) -> &BinaryForm {
        &self.den
    }

    pub fn max_bits(&self) -> u64 {
        self.num.max_bits().max(self.den.max_bits())
    }

    pub fn to_polynomials(&self) -> (HomogeneousPolynomial, HomogeneousPolynomial) {
        let conv = |f: &BinaryForm| {
            let d = f.degree() as u32;
            let terms = f.coeffs().iter().enumerate().map(|(i, c)| (vec![i as u32, d - i as u32], c.clone()));
            HomogeneousPolynomial::new(2, terms)
        };
        (conv(&self.num).expect("nonzero form"), conv(&self.den).expect("nonzero form"))
    }

    /// `[F(a,b) : G(a,b)]` in lowest terms.
    pub fn apply(&self, p: &RationalPoint) -> Result<RationalPoint, DynamicsError> {
        let c = p.coords();
        if c.len() != 2 {
            return Err(DynamicsError::NotP1Point(c.len()));
        }
        let a = self.num.eval(&c[0], &c[1]);
        let b = self.den.eval(&c[0], &c[1]);
        Ok(RationalPoint::new(vec![a, b]).expect("nonzero resultant rules out [0:0]"))
    }

    /// Apply in an arbitrary coordinate ring (used for reductions mod p).
    pub fn apply_scalar<F: Scalar>(&self, p: &ProjectivePoint<F>) -> Result<ProjectivePoint<F>, DynamicsError> {
        let c = p.coords();
        if c.len() != 2 {
            return Err(DynamicsError::NotP1Point(c.len()));
        }
        let a = self.num.eval_scalar(&c[0], &c[1]);
        let b = self.den.eval_scalar(&c[0], &c[1]);
        ProjectivePoint::new(vec![a, b]).map_err(DynamicsError::from)
    }

    /// Reduction mod p is a morphism of the same degree iff p does not
    /// divide the resultant.
    pub fn has_good_reduction(&self, field: PrimeField) -> bool {
        let r = resultant(&self.num, &self.den);
        !field.from_bigint(&r).is_zero()
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap, DynamicsError> {
        let num = self.num.compose(&inner.num, &inner.den);
        let den = self.den.compose(&inner.num, &inner.den);
        Self::from_forms_unchecked(num, den)
    }

    /// n-th iterate as a polynomial pair, failing once coefficients exceed
    /// `max_bits`.
    pub fn iterate(&self, n: usize, max_bits: u64) -> Result<RationalMap, DynamicsError> {
        assert!(n >= 1);
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose_raw(&acc);
            let bits = acc.max_bits();
            if bits > max_bits {
                return Err(DynamicsError::PrecisionExceeded { bits, cap: max_bits, partial: None });
            }
        }
        Ok(acc)
    }

    // composition of two morphisms is a morphism: skip the resultant check
    fn compose_raw(&self, inner: &RationalMap) -> RationalMap {
        let num = self.num.compose(&inner.num, &inner.den);
        let den = self.den.compose(&inner.num, &inner.den);
        let g = num.content().gcd(&den.content());
        RationalMap { num: num.scale_down(&g), den: den.scale_down(&g) }
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num.render("X", "Y"), self.den.render("X", "Y"))
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMap{self}")
    }
}

/// The maps `f_1, f_2, ...` of a dynamical tower, `f_n` going from level n
/// to level n - 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSequence {
    Constant(RationalMap),
    Explicit(Vec<RationalMap>),
}

impl MapSequence {
    /// The map from level `n` down to level `n - 1` (n >= 1).
    pub fn level_map(&self, n: usize) -> Result<&RationalMap, DynamicsError> {
        assert!(n >= 1, "level maps start at level 1");
        match self {
            MapSequence::Constant(f) => Ok(f),
            MapSequence::Explicit(v) => v.get(n - 1).ok_or(DynamicsError::SequenceTooShort { needed: n, len: v.len() }),
        }
    }

    pub fn maps(&self) -> Vec<&RationalMap> {
        match self {
            MapSequence::Constant(f) => vec![f],
            MapSequence::Explicit(v) => v.iter().collect(),
        }
    }
}

/// Print an exact point of P^1 as `a/b`, an integer, or `∞`.
pub fn format_p1(p: &RationalPoint) -> String {
    match p.affine_value() {
        None => "∞".to_string(),
        Some(r) if r.is_integer() => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// Parse `a`, `a/b`, `inf` or `∞` as a point of P^1.
pub fn parse_p1(text: &str) -> Result<RationalPoint, DynamicsError> {
    let t = text.trim();
    if t == "inf" || t == "∞" || t == "infinity" {
        return Ok(RationalPoint::from_i64s(&[1, 0])?);
    }
    let bad = || DynamicsError::Parse(format!("not a rational number: {t}"));
    let (a, b) = match t.split_once('/') {
        Some((a, b)) => (a.trim().parse::<BigInt>().map_err(|_| bad())?, b.trim().parse::<BigInt>().map_err(|_| bad())?),
        None => (t.parse::<BigInt>().map_err(|_| bad())?, BigInt::from(1)),
    };
    if b.is_zero() {
        return Err(bad());
    }
    Ok(RationalPoint::new(vec![a, b])?)
}

fn strip_parens(s: &str) -> String {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        // only strip if the outer pair matches
        let inner = &t[1..t.len() - 1];
        let mut depth = 0i32;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return t.to_string();
                    }
                }
                _ => {}
            }
        }
        return inner.trim().to_string();
    }
    t.to_string()
}

fn split_fraction(text: &str) -> Result<(String, Option<String>), DynamicsError> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                if split.is_some() {
                    return Err(DynamicsError::Parse("more than one '/' at top level".into()));
                }
                split = Some(i);
            }
            _ => {}
        }
        if depth < 0 {
            return Err(DynamicsError::Parse("unbalanced parentheses".into()));
        }
    }
    if depth != 0 {
        return Err(DynamicsError::Parse("unbalanced parentheses".into()));
    }
    Ok(match split {
        Some(i) => (strip_parens(&text[..i]), Some(strip_parens(&text[i + 1..]))),
        None => (strip_parens(text), None),
    })
}

fn parse_binary(text: &str) -> Result<BinaryForm, DynamicsError> {
    let terms = parse_terms(text, 2, |n| match n {
        "X" => Some(0),
        "Y" => Some(1),
        _ => None,
    })?;
    let mut degree = None;
    let mut coeffs: Vec<BigInt> = Vec::new();
    for t in terms {
        let (mut ex, mut ey) = (0u32, 0u32);
        for (v, e) in t.factors {
            if v == 0 {
                ex += e
            } else {
                ey += e
            }
        }
        let d = (ex + ey) as usize;
        match degree {
            None => {
                degree = Some(d);
                coeffs = vec![BigInt::zero(); d + 1];
            }
            Some(d0) if d0 != d => {
                return Err(AlgebraError::NonHomogeneous { monomial: t.text, found: d as u32, expected: d0 as u32 }.into())
            }
            _ => {}
        }
        coeffs[ex as usize] += t.coeff;
    }
    if coeffs.is_empty() {
        return Err(DynamicsError::Parse("empty form".into()));
    }
    Ok(BinaryForm::new(coeffs))
}

fn parse_affine(text: &str) -> Result<Vec<BigInt>, DynamicsError> {
    let terms = parse_terms(text, 1, |n| (n == "x").then_some(0))?;
    let deg = terms.iter().map(|t| t.factors.iter().map(|f| f.1 as usize).sum::<usize>()).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for t in terms {
        let k: usize = t.factors.iter().map(|f| f.1 as usize).sum();
        coeffs[k] += t.coeff;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    Ok(coeffs)
}
