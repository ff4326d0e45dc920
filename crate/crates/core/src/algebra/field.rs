use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Largest modulus accepted by [`PrimeField::new`]. Products of two residues
/// are formed in `u128`, so this is a sanity limit for trial division rather
/// than an arithmetic one.
pub const MAX_PRIME: u64 = 1 << 40;

/// Deterministic trial division up to `sqrt(n)`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn element(&self, v: u64) -> Fp {
        Fp { value: v % self.p, modulus: self.p }
    }

    pub fn from_i64(&self, v: i64) -> Fp {
        let m = self.p as i128;
        let r = (v as i128).rem_euclid(m) as u64;
        Fp { value: r, modulus: self.p }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Fp {
        let m = BigInt::from(self.p);
        let r = v.mod_floor(&m);
        Fp { value: r.to_u64().expect("residue fits in u64"), modulus: self.p }
    }

    #[inline]
    pub fn zero(&self) -> Fp {
        Fp { value: 0, modulus: self.p }
    }

    #[inline]
    pub fn one(&self) -> Fp {
        Fp { value: 1 % self.p, modulus: self.p }
    }

    /// All elements in increasing order of representative.
    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| Fp { value: v, modulus: self.p })
    }

    // raw residue arithmetic, used on hot enumeration paths
    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub(crate) fn pow_raw(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }

    pub(crate) fn inv_raw(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow_raw(a, self.p - 2))
        }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// An element of F_p, always fully reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, exp: u64) -> Fp {
        Fp { value: self.field().pow_raw(self.value, exp), modulus: self.modulus }
    }

    pub fn inverse(&self) -> Option<Fp> {
        self.field().inv_raw(self.value).map(|v| Fp { value: v, modulus: self.modulus })
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn centered(&self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }

    #[inline]
    fn check(&self, other: &Fp) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli in F_p arithmetic");
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.check(&rhs);
        Fp { value: self.field().add_raw(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        let v = if self.value == 0 { 0 } else { self.modulus - self.value };
        Fp { value: v, modulus: self.modulus }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.check(&rhs);
        Fp { value: self.field().mul_raw(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Serialize for Fp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

/// Reduce a (possibly negative) big integer modulo `p` into `[0, p)`.
pub(crate) fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = if v.is_negative() { v.mod_floor(&m) } else { v % &m };
    if r.is_zero() {
        0
    } else {
        r.to_u64().expect("residue fits")
    }
}
