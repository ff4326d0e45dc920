use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::Serialize;

use super::field::{Fp, PrimeField};
use super::AlgebraError;

/// Default upper bound on the size of an enumerated projective space.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Coordinate rings for projective points: the integers (standing in for Q
/// via coprime representatives) and prime fields.
pub trait Scalar:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Add<Output = Self> + Mul<Output = Self>
{
    /// Image of an integer in the same ring as `self`.
    fn embed(&self, c: &BigInt) -> Self;
    fn is_zero_scalar(&self) -> bool;
    fn pow_u32(&self, e: u32) -> Self;
    fn normalize(coords: Vec<Self>) -> Result<Vec<Self>, AlgebraError>;
    fn is_normalized(coords: &[Self]) -> bool;
}

impl Scalar for BigInt {
    fn embed(&self, c: &BigInt) -> Self {
        c.clone()
    }

    fn is_zero_scalar(&self) -> bool {
        self.is_zero()
    }

    fn pow_u32(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }

    fn normalize(mut coords: Vec<Self>) -> Result<Vec<Self>, AlgebraError> {
        let lead = coords.iter().find(|c| !c.is_zero()).ok_or(AlgebraError::ZeroPoint)?;
        let mut g = coords.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if lead.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in coords.iter_mut() {
                *c = &*c / &g;
            }
        }
        Ok(coords)
    }

    fn is_normalized(coords: &[Self]) -> bool {
        match coords.iter().find(|c| !c.is_zero()) {
            None => false,
            Some(lead) => lead.is_positive() && coords.iter().fold(BigInt::zero(), |g, c| g.gcd(c)).is_one(),
        }
    }
}

impl Scalar for Fp {
    fn embed(&self, c: &BigInt) -> Self {
        self.field().from_bigint(c)
    }

    fn is_zero_scalar(&self) -> bool {
        self.is_zero()
    }

    fn pow_u32(&self, e: u32) -> Self {
        self.pow(e as u64)
    }

    fn normalize(mut coords: Vec<Self>) -> Result<Vec<Self>, AlgebraError> {
        let lead = *coords.iter().find(|c| !c.is_zero()).ok_or(AlgebraError::ZeroPoint)?;
        if lead.value() != 1 {
            let inv = lead.inverse().expect("nonzero element of a field is invertible");
            for c in coords.iter_mut() {
                *c = *c * inv;
            }
        }
        Ok(coords)
    }

    fn is_normalized(coords: &[Self]) -> bool {
        matches!(coords.iter().find(|c| !c.is_zero()), Some(l) if l.value() == 1)
    }
}

/// A point of projective space, stored in its normalized representative.
///
/// Over the rationals (`F = BigInt`) the coordinates are coprime integers
/// whose first nonzero entry is positive. Over F_p the first nonzero
/// coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint<F> {
    coords: Vec<F>,
}

pub type RationalPoint = ProjectivePoint<BigInt>;
pub type FpPoint = ProjectivePoint<Fp>;

impl<F: Scalar> ProjectivePoint<F> {
    /// Build a point from any nonzero representative.
    pub fn new(coords: Vec<F>) -> Result<Self, AlgebraError> {
        Ok(Self { coords: F::normalize(coords)? })
    }

    /// Accept only coordinates that are already normalized.
    pub fn new_normalized(coords: Vec<F>) -> Result<Self, AlgebraError> {
        if coords.iter().all(|c| c.is_zero_scalar()) {
            return Err(AlgebraError::ZeroPoint);
        }
        if !F::is_normalized(&coords) {
            return Err(AlgebraError::NotNormalized(format_coords(&coords)));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<F> {
        self.coords
    }

    /// Dimension n of the ambient P^n.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Scale every coordinate by `lambda` and renormalize.
    pub fn scaled(&self, lambda: &F) -> Result<Self, AlgebraError> {
        Self::new(self.coords.iter().map(|c| c.clone() * lambda.clone()).collect())
    }

    /// Drop the last coordinate. Fails if what remains is the zero vector.
    pub fn forget_last(&self) -> Result<Self, AlgebraError> {
        Self::new(self.coords[..self.coords.len() - 1].to_vec())
    }
}

impl RationalPoint {
    pub fn from_i64s(coords: &[i64]) -> Result<Self, AlgebraError> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Clear denominators of a rational representative.
    pub fn from_rationals(coords: &[BigRational]) -> Result<Self, AlgebraError> {
        let l = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        Self::new(coords.iter().map(|c| c.numer() * (&l / c.denom())).collect())
    }

    /// `[a:b]` as the affine value a/b, or `None` at infinity.
    pub fn affine_value(&self) -> Option<BigRational> {
        let n = self.coords.len();
        let den = &self.coords[n - 1];
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(self.coords[0].clone(), den.clone()))
        }
    }

    /// Reduce modulo `p`. Coprimality guarantees the result is a point.
    pub fn reduce(&self, field: PrimeField) -> FpPoint {
        let coords = self.coords.iter().map(|c| field.from_bigint(c)).collect();
        FpPoint::new(coords).expect("coprime representative has a unit coordinate mod p")
    }
}

impl FpPoint {
    pub fn field(&self) -> PrimeField {
        self.coords[0].field()
    }

    pub fn values(&self) -> Vec<u64> {
        self.coords.iter().map(|c| c.value()).collect()
    }

    pub fn from_values(field: PrimeField, values: &[u64]) -> Result<Self, AlgebraError> {
        Self::new(values.iter().map(|&v| field.element(v)).collect())
    }
}

fn format_coords<F: fmt::Display>(coords: &[F]) -> String {
    let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(":"))
}

impl<F: fmt::Display> fmt::Display for ProjectivePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_coords(&self.coords))
    }
}

impl<F: fmt::Display> fmt::Debug for ProjectivePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_coords(&self.coords))
    }
}

impl Serialize for FpPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            seq.serialize_element(&c.value())?;
        }
        seq.end()
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

/// Number of points of P^n(F_p), i.e. (p^{n+1} - 1)/(p - 1).
pub fn projective_point_count(p: u64, dim: usize) -> u128 {
    let p = p as u128;
    let mut total = 0u128;
    let mut pow = 1u128;
    for _ in 0..=dim {
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(p);
    }
    total
}

/// Lexicographic stream of the normalized points of P^n(F_p).
///
/// Points are grouped into strata by the position of their leading 1; the
/// stratum with the leading 1 in the last slot comes first. Each stratum can
/// also be walked on its own with [`enumerate_stratum`].
pub struct ProjectiveEnumerator {
    field: PrimeField,
    dim: usize,
    lead: usize,
    last_lead: usize,
    tail: Vec<u64>,
    done: bool,
}

impl ProjectiveEnumerator {
    fn stratum_range(field: PrimeField, dim: usize, first: usize, last: usize) -> Self {
        Self { field, dim, lead: first, last_lead: last, tail: vec![0; dim - first], done: false }
    }

    /// Next point as raw residues, without allocating a point.
    pub fn next_raw(&mut self, buf: &mut Vec<u64>) -> bool {
        if self.done {
            return false;
        }
        buf.clear();
        buf.resize(self.lead, 0);
        buf.push(1);
        buf.extend_from_slice(&self.tail);
        // advance the odometer over the free tail
        let p = self.field.modulus();
        let mut i = self.tail.len();
        loop {
            if i == 0 {
                if self.lead == self.last_lead {
                    self.done = true;
                } else {
                    self.lead -= 1;
                    self.tail = vec![0; self.dim - self.lead];
                }
                break;
            }
            i -= 1;
            self.tail[i] += 1;
            if self.tail[i] < p {
                break;
            }
            self.tail[i] = 0;
        }
        true
    }
}

impl Iterator for ProjectiveEnumerator {
    type Item = FpPoint;

    fn next(&mut self) -> Option<FpPoint> {
        let mut buf = Vec::with_capacity(self.dim + 1);
        if self.next_raw(&mut buf) {
            let coords = buf.iter().map(|&v| self.field.element(v)).collect();
            Some(ProjectivePoint { coords })
        } else {
            None
        }
    }
}

/// Every point of P^n(F_p) exactly once, in lexicographic order of
/// normalized coordinates.
pub fn enumerate_projective(
    field: PrimeField,
    dim: usize,
    cap: u128,
) -> Result<ProjectiveEnumerator, AlgebraError> {
    let count = projective_point_count(field.modulus(), dim);
    if count > cap {
        return Err(AlgebraError::EnumerationCap { p: field.modulus(), dim, count, cap });
    }
    Ok(ProjectiveEnumerator::stratum_range(field, dim, dim, 0))
}

/// The points whose first nonzero coordinate sits at index `lead`
/// (p^{dim - lead} of them), in lexicographic order.
pub fn enumerate_stratum(field: PrimeField, dim: usize, lead: usize) -> ProjectiveEnumerator {
    assert!(lead <= dim, "stratum index {lead} out of range for P^{dim}");
    ProjectiveEnumerator::stratum_range(field, dim, lead, lead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn p1_over_f3() {
        let pts: Vec<String> = enumerate_projective(f(3), 1, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(pts, vec!["[0:1]", "[1:0]", "[1:1]", "[1:2]"]);
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_projective(f(3), 2, DEFAULT_ENUMERATION_CAP).unwrap().count(), 13);
        assert_eq!(enumerate_projective(f(5), 4, DEFAULT_ENUMERATION_CAP).unwrap().count(), 781);
    }

    #[test]
    fn cap_reports_exact_count() {
        let e = enumerate_projective(f(5), 4, 780).err().unwrap();
        assert_eq!(e, AlgebraError::EnumerationCap { p: 5, dim: 4, count: 781, cap: 780 });
    }

    #[test]
    fn counts_and_uniqueness_for_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            for n in 1..=4usize {
                let expected = projective_point_count(p, n);
                if expected > 1_000_000 {
                    continue;
                }
                let pts: Vec<FpPoint> = enumerate_projective(f(p), n, DEFAULT_ENUMERATION_CAP).unwrap().collect();
                assert_eq!(pts.len() as u128, expected, "p={p} n={n}");
                let set: HashSet<_> = pts.iter().cloned().collect();
                assert_eq!(set.len(), pts.len());
                assert!(pts.windows(2).all(|w| w[0] < w[1]), "lexicographic order p={p} n={n}");
                assert!(pts.iter().all(|q| Fp::is_normalized(q.coords())));
            }
        }
    }

    #[test]
    fn strata_partition_the_space() {
        let field = f(5);
        let mut all: Vec<FpPoint> = Vec::new();
        for lead in (0..=3).rev() {
            let s: Vec<_> = enumerate_stratum(field, 3, lead).collect();
            assert_eq!(s.len() as u64, 5u64.pow(3 - lead as u32));
            all.extend(s);
        }
        let full: Vec<_> = enumerate_projective(field, 3, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(all, full);
    }

    #[test]
    fn rational_normalization() {
        let p = RationalPoint::from_i64s(&[-2, 4, 6]).unwrap();
        assert_eq!(p.to_string(), "[1:-2:-3]");
        let q = RationalPoint::from_i64s(&[0, -3, 0]).unwrap();
        assert_eq!(q.to_string(), "[0:1:0]");
        assert_eq!(RationalPoint::from_i64s(&[0, 0]), Err(AlgebraError::ZeroPoint));
        let r = RationalPoint::from_rationals(&[
            BigRational::new(1.into(), 2.into()),
            BigRational::new((-1).into(), 3.into()),
        ])
        .unwrap();
        assert_eq!(r.to_string(), "[3:-2]");
    }

    #[test]
    fn strict_constructor_rejects_unnormalized() {
        let c = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert!(RationalPoint::new_normalized(c(&[5, 10, 15])).is_err());
        assert!(RationalPoint::new_normalized(c(&[-1, 0, 1])).is_err());
        assert!(RationalPoint::new_normalized(c(&[5, 10, 3])).is_ok());
        let field = f(7);
        let v = vec![field.element(2), field.element(1)];
        assert!(FpPoint::new_normalized(v.clone()).is_err());
        assert_eq!(FpPoint::new(v).unwrap().values(), vec![1, 4]);
    }

    #[test]
    fn reduction_renormalizes() {
        let p = RationalPoint::from_i64s(&[3, 1, 2]).unwrap();
        assert_eq!(p.reduce(f(3)).to_string(), "[0:1:2]");
        let q = RationalPoint::from_i64s(&[1, 0, 1]).unwrap();
        assert_eq!(q.reduce(f(3)).to_string(), "[1:0:1]");
    }
}
